#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctsn/numerics.hpp"

namespace ctsn {

enum class DataKind { static_images, neuromorphic };

struct Sample {
  Tensor x;  // static: image shape; neuromorphic: [T x D] frames
  int label = 0;
};

struct Dataset {
  std::vector<Sample> samples;
  DataKind kind = DataKind::static_images;
  std::size_t num_classes = 0;

  std::size_t size() const { return samples.size(); }
  const Shape& sample_shape() const { return samples.at(0).x.shape(); }
  // Width of one timestep's input after flattening.
  std::size_t feature_dim() const;
  // Throws ArgumentError on mixed shapes or labels outside [0, num_classes).
  void validate() const;
};

class IdxError : public std::runtime_error {
 public:
  enum class Kind { io, format, length, consistency };
  IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// One IDX file: unsigned-byte payload (type code 0x08) with big-endian
// 32-bit dimensions.
struct IdxArray {
  std::vector<std::uint32_t> dims;
  std::vector<std::uint8_t> payload;
};

IdxArray parse_idx(std::span<const std::uint8_t> bytes, const std::string& name);
std::vector<std::uint8_t> serialize_idx(const IdxArray& array);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

// Images file with magic 0x00000803, labels file with 0x00000801. Pixels are
// scaled to [0, 1].
Dataset load_idx(const std::string& images_path, const std::string& labels_path);
// Inverse of load_idx for datasets whose values are k/255.
void write_idx(const Dataset& ds, const std::string& images_path, const std::string& labels_path);
IdxArray idx_images(const Dataset& ds);
IdxArray idx_labels(const Dataset& ds);

struct CorpusStats {
  double mean;
  double std;
};

CorpusStats corpus_stats(const Dataset& ds);

// (x - mean) / std. One value of each applies to every element; otherwise the
// sizes must equal the first axis of the sample shape (the channel axis).
Dataset normalize(const Dataset& ds, std::span<const double> mean, std::span<const double> std);

// The same static input at every timestep.
std::vector<Tensor> direct_encode(const Tensor& x, std::size_t T);

// Gaussian blobs: each class owns `blobs` centres, each a random direction
// scaled to `margin`, and each sample adds unit-variance noise. Labels and
// then centres within a class are assigned round-robin.
Dataset synth_static(std::size_t n, std::size_t dims, std::size_t classes, double margin,
                     Rng& rng, std::size_t blobs = 1);

// Signed sparse frames [T x dims]. Every pixel is independently nonzero with
// probability `rate`; the sign follows a per-class spatiotemporal pattern with
// probability `fidelity` and is flipped otherwise.
Dataset synth_event_frames(std::size_t n, std::size_t dims, std::size_t T, double rate,
                           std::size_t classes, Rng& rng, double fidelity = 0.75);

struct Batch {
  std::vector<Tensor> inputs;  // T tensors of [B x D]
  std::vector<int> labels;
};

// Direct encoding for static samples, frame-per-timestep for neuromorphic.
Batch make_batch(const Dataset& ds, std::span<const std::size_t> indices, std::size_t T);

// key=value lines in key order.
std::string format_manifest(const std::map<std::string, std::string>& entries);

}  // namespace ctsn
