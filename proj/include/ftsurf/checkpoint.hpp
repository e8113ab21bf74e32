#ifndef FTSURF_CHECKPOINT_HPP
#define FTSURF_CHECKPOINT_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftsurf/net.hpp"

// Versioned binary checkpoint: magic "FTSF", format version, a string
// metadata map, named float64 tensors (row-major, little-endian), and a
// trailing CRC-32 over everything after the magic. Every load failure mode
// gets its own error kind so callers can tell corruption from version skew.

namespace ftsurf {

class CheckpointError : public std::runtime_error {
 public:
  enum class Kind { corrupt, version_mismatch, checksum_mismatch, shape_mismatch, io };
  CheckpointError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct NamedTensor {
  std::string name;
  Eigen::MatrixXd data;
};

struct Checkpoint {
  std::uint32_t version = 1;
  std::map<std::string, std::string> meta;
  std::vector<NamedTensor> tensors;
};

constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Convenience wrappers for policy weights. Metadata records the platform
// name and network dimensions; extra entries are carried through verbatim.
void save_weights(const PolicyWeights& w, const std::string& path,
                  const std::map<std::string, std::string>& extra_meta = {});
PolicyWeights load_weights(const std::string& path,
                           std::map<std::string, std::string>* meta_out = nullptr);

// Reconstructs weights from named tensors, inferring the layer count and
// sizes; throws CheckpointError{shape_mismatch} with a per-tensor listing if
// the set is inconsistent.
PolicyWeights weights_from_checkpoint(const Checkpoint& ckpt);
Checkpoint checkpoint_from_weights(const PolicyWeights& w,
                                   const std::map<std::string, std::string>& extra_meta);

}  // namespace ftsurf

#endif
