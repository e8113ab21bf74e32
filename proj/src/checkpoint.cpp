#include "ftsurf/checkpoint.hpp"

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <fstream>

namespace ftsurf {

namespace {

constexpr char kMagic[4] = {'F', 'T', 'S', 'F'};

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_string(std::string& buf, const std::string& s) {
  put_u32(buf, static_cast<std::uint32_t>(s.size()));
  buf.append(s);
}

void put_f64(std::string& buf, double v) {
  static_assert(sizeof(double) == 8);
  char raw[8];
  std::memcpy(raw, &v, 8);
  buf.append(raw, 8);  // little-endian host assumed (checked at load)
}

class Cursor {
 public:
  Cursor(const std::string& buf, std::size_t pos) : buf_(buf), pos_(pos) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  double f64() {
    need(8);
    double v;
    std::memcpy(&v, buf_.data() + pos_, 8);
    pos_ += 8;
    return v;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  void need(std::size_t n) {
    if (pos_ + n > buf_.size())
      throw CheckpointError(CheckpointError::Kind::corrupt,
                            "checkpoint: record extends past end of file");
  }
  const std::string& buf_;
  std::size_t pos_;
};

std::uint32_t crc_of(const std::string& buf, std::size_t from, std::size_t len) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(buf.data() + from), static_cast<uInt>(len));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::string body;  // everything after the magic, before the trailing crc
  put_u32(body, ckpt.version);
  put_u32(body, static_cast<std::uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    put_string(body, k);
    put_string(body, v);
  }
  put_u32(body, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const NamedTensor& t : ckpt.tensors) {
    put_string(body, t.name);
    put_u32(body, static_cast<std::uint32_t>(t.data.rows()));
    put_u32(body, static_cast<std::uint32_t>(t.data.cols()));
    for (Eigen::Index i = 0; i < t.data.rows(); ++i)
      for (Eigen::Index j = 0; j < t.data.cols(); ++j) put_f64(body, t.data(i, j));
  }

  std::string out;
  out.append(kMagic, 4);
  out.append(body);
  put_u32(out, crc_of(out, 4, body.size()));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointError(CheckpointError::Kind::io, "checkpoint: cannot open " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw CheckpointError(CheckpointError::Kind::io, "checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError(CheckpointError::Kind::io, "checkpoint: cannot open " + path);
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  if (buf.size() < 4 + 4 + 4 || std::memcmp(buf.data(), kMagic, 4) != 0)
    throw CheckpointError(CheckpointError::Kind::corrupt,
                          "checkpoint: bad magic or file too small: " + path);

  // CRC covers bytes [4, size-4); a truncated or bit-flipped file fails here
  // before any tensor is interpreted.
  Cursor tail(buf, buf.size() - 4);
  const std::uint32_t stored_crc = tail.u32();
  const std::uint32_t actual_crc = crc_of(buf, 4, buf.size() - 8);
  Cursor cur(buf, 4);
  const std::uint32_t version = cur.u32();
  if (version != kCheckpointVersion)
    throw CheckpointError(CheckpointError::Kind::version_mismatch,
                          "checkpoint: format version " + std::to_string(version) +
                              " not supported (expected " +
                              std::to_string(kCheckpointVersion) + ")");
  if (stored_crc != actual_crc)
    throw CheckpointError(CheckpointError::Kind::checksum_mismatch,
                          "checkpoint: CRC mismatch (file truncated or corrupted): " + path);

  Checkpoint ckpt;
  ckpt.version = version;
  const std::uint32_t n_meta = cur.u32();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = cur.str();
    ckpt.meta[k] = cur.str();
  }
  const std::uint32_t n_tensors = cur.u32();
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    NamedTensor t;
    t.name = cur.str();
    const std::uint32_t rows = cur.u32();
    const std::uint32_t cols = cur.u32();
    if (static_cast<std::uint64_t>(rows) * cols * 8 > cur.remaining())
      throw CheckpointError(CheckpointError::Kind::corrupt,
                            "checkpoint: tensor " + t.name + " larger than file");
    t.data.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint32_t c = 0; c < cols; ++c) t.data(r, c) = cur.f64();
    ckpt.tensors.push_back(std::move(t));
  }
  if (cur.pos() != buf.size() - 4)
    throw CheckpointError(CheckpointError::Kind::corrupt,
                          "checkpoint: trailing bytes after last tensor");
  return ckpt;
}

Checkpoint checkpoint_from_weights(const PolicyWeights& w,
                                   const std::map<std::string, std::string>& extra_meta) {
  Checkpoint ckpt;
  ckpt.meta = extra_meta;
  ckpt.meta["obs_dim"] = std::to_string(w.cfg.obs_dim);
  ckpt.meta["hidden"] = std::to_string(w.cfg.hidden);
  ckpt.meta["layers"] = std::to_string(w.cfg.layers);
  ckpt.meta["act_dim"] = std::to_string(w.cfg.act_dim);
  for (const ParamRef& p : w.param_refs()) {
    NamedTensor t;
    t.name = p.name;
    t.data = Eigen::Map<const Eigen::MatrixXd>(p.data, p.rows, p.cols);
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

PolicyWeights weights_from_checkpoint(const Checkpoint& ckpt) {
  std::map<std::string, const Eigen::MatrixXd*> by_name;
  for (const NamedTensor& t : ckpt.tensors) by_name[t.name] = &t.data;

  auto find = [&](const std::string& name) -> const Eigen::MatrixXd& {
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw CheckpointError(CheckpointError::Kind::shape_mismatch,
                            "checkpoint: missing tensor " + name);
    return *it->second;
  };

  NetConfig cfg;
  int layers = 0;
  while (by_name.count("actor/lstm_" + std::to_string(layers + 1) + "/w_in")) ++layers;
  if (layers == 0)
    throw CheckpointError(CheckpointError::Kind::shape_mismatch,
                          "checkpoint: no LSTM layers found");
  cfg.layers = layers;
  cfg.obs_dim = static_cast<int>(find("actor/lstm_1/w_in").cols());
  cfg.hidden = static_cast<int>(find("actor/lstm_1/w_rec").cols());
  cfg.act_dim = static_cast<int>(find("actor/mean/w").rows());

  PolicyWeights w = PolicyWeights::zeros(cfg);
  std::string shape_log;
  bool ok = true;
  for (ParamRef& p : w.param_refs()) {
    const Eigen::MatrixXd& src = find(p.name);
    char line[160];
    std::snprintf(line, sizeof(line), "  %-24s expected %ldx%ld, file has %ldx%ld\n",
                  p.name.c_str(), static_cast<long>(p.rows), static_cast<long>(p.cols),
                  static_cast<long>(src.rows()), static_cast<long>(src.cols()));
    shape_log += line;
    if (src.rows() != p.rows || src.cols() != p.cols) {
      ok = false;
      continue;
    }
    Eigen::Map<Eigen::MatrixXd>(p.data, p.rows, p.cols) = src;
  }
  if (!ok)
    throw CheckpointError(CheckpointError::Kind::shape_mismatch,
                          "checkpoint: tensor shapes inconsistent with inferred network:\n" +
                              shape_log);
  return w;
}

void save_weights(const PolicyWeights& w, const std::string& path,
                  const std::map<std::string, std::string>& extra_meta) {
  save_checkpoint(checkpoint_from_weights(w, extra_meta), path);
}

PolicyWeights load_weights(const std::string& path,
                           std::map<std::string, std::string>* meta_out) {
  Checkpoint ckpt = load_checkpoint(path);
  if (meta_out) *meta_out = ckpt.meta;
  return weights_from_checkpoint(ckpt);
}

}  // namespace ftsurf
