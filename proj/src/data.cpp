#include "ctsn/data.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "ctsn/errors.hpp"

namespace ctsn {

std::size_t Dataset::feature_dim() const {
  const Shape& s = sample_shape();
  if (kind == DataKind::neuromorphic) {
    if (s.size() != 2) throw DimensionError("neuromorphic samples must be [T x D]");
    return s[1];
  }
  return shape_numel(s);
}

void Dataset::validate() const {
  if (samples.empty()) throw ArgumentError("dataset is empty");
  const Shape& s = sample_shape();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].x.shape() != s) {
      throw ArgumentError("sample " + std::to_string(i) + " has shape " +
                          shape_str(samples[i].x.shape()) + ", expected " + shape_str(s));
    }
    if (samples[i].label < 0 || static_cast<std::size_t>(samples[i].label) >= num_classes) {
      throw ArgumentError("sample " + std::to_string(i) + " label " +
                          std::to_string(samples[i].label) + " outside [0, " +
                          std::to_string(num_classes) + ")");
    }
  }
}

namespace {

constexpr std::uint8_t kUnsignedByte = 0x08;

std::uint32_t read_be32(std::span<const std::uint8_t> b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::string hex32(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex;
  os.width(8);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace

IdxArray parse_idx(std::span<const std::uint8_t> bytes, const std::string& name) {
  if (bytes.size() < 4) {
    throw IdxError(IdxError::Kind::length, name + ": file too short for an IDX magic number");
  }
  const std::uint32_t magic = read_be32(bytes, 0);
  if (bytes[0] != 0 || bytes[1] != 0 || bytes[2] != kUnsignedByte || bytes[3] == 0) {
    throw IdxError(IdxError::Kind::format, name + ": bad IDX magic " + hex32(magic) +
                                               " at offset 0 (expected 0x000008NN)");
  }
  const std::size_t rank = bytes[3];
  const std::size_t header = 4 + 4 * rank;
  if (bytes.size() < header) {
    throw IdxError(IdxError::Kind::length, name + ": header truncated at offset " +
                                               std::to_string(bytes.size()) + ", need " +
                                               std::to_string(header) + " bytes");
  }
  IdxArray out;
  std::size_t count = 1;
  for (std::size_t d = 0; d < rank; ++d) {
    const std::uint32_t v = read_be32(bytes, 4 + 4 * d);
    out.dims.push_back(v);
    count *= v;
  }
  if (bytes.size() - header < count) {
    throw IdxError(IdxError::Kind::length,
                   name + ": payload truncated at offset " + std::to_string(bytes.size()) +
                       ", expected " + std::to_string(header + count) + " bytes");
  }
  if (bytes.size() - header > count) {
    throw IdxError(IdxError::Kind::length, name + ": " +
                                               std::to_string(bytes.size() - header - count) +
                                               " trailing bytes after offset " +
                                               std::to_string(header + count));
  }
  out.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return out;
}

std::vector<std::uint8_t> serialize_idx(const IdxArray& array) {
  std::vector<std::uint8_t> out{0, 0, kUnsignedByte, static_cast<std::uint8_t>(array.dims.size())};
  for (auto d : array.dims) put_be32(out, d);
  out.insert(out.end(), array.payload.begin(), array.payload.end());
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Kind::io, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IdxError(IdxError::Kind::io, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  const auto img_bytes = read_file_bytes(images_path);
  const auto lbl_bytes = read_file_bytes(labels_path);
  const IdxArray images = parse_idx(img_bytes, images_path);
  const IdxArray labels = parse_idx(lbl_bytes, labels_path);
  if (images.dims.size() != 3) {
    throw IdxError(IdxError::Kind::format, images_path + ": expected magic 0x00000803 (3 dims), got " +
                                               std::to_string(images.dims.size()) + " dims");
  }
  if (labels.dims.size() != 1) {
    throw IdxError(IdxError::Kind::format, labels_path + ": expected magic 0x00000801 (1 dim), got " +
                                               std::to_string(labels.dims.size()) + " dims");
  }
  const std::size_t n = images.dims[0];
  if (labels.dims[0] != n) {
    throw IdxError(IdxError::Kind::consistency, "image count " + std::to_string(n) +
                                                    " does not match label count " +
                                                    std::to_string(labels.dims[0]));
  }
  const std::size_t rows = images.dims[1], cols = images.dims[2];
  if (n == 0 || rows == 0 || cols == 0) {
    throw IdxError(IdxError::Kind::format, images_path + ": zero-sized dimension");
  }
  Dataset ds;
  ds.kind = DataKind::static_images;
  int max_label = 0;
  const std::size_t per = rows * cols;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> px(per);
    for (std::size_t k = 0; k < per; ++k) px[k] = images.payload[i * per + k] / 255.0;
    const int y = labels.payload[i];
    max_label = std::max(max_label, y);
    ds.samples.push_back({Tensor({rows, cols}, std::move(px)), y});
  }
  ds.num_classes = static_cast<std::size_t>(max_label) + 1;
  return ds;
}

IdxArray idx_images(const Dataset& ds) {
  if (ds.samples.empty()) throw ArgumentError("idx_images: empty dataset");
  const Shape& s = ds.sample_shape();
  if (s.size() != 2) throw DimensionError("idx_images: samples must be 2-D images");
  IdxArray out;
  out.dims = {static_cast<std::uint32_t>(ds.size()), static_cast<std::uint32_t>(s[0]),
              static_cast<std::uint32_t>(s[1])};
  out.payload.reserve(ds.size() * s[0] * s[1]);
  for (const auto& smp : ds.samples) {
    for (double v : smp.x.data()) {
      const long q = std::lround(v * 255.0);
      if (q < 0 || q > 255) throw ArgumentError("idx_images: pixel outside [0, 1]");
      out.payload.push_back(static_cast<std::uint8_t>(q));
    }
  }
  return out;
}

IdxArray idx_labels(const Dataset& ds) {
  IdxArray out;
  out.dims = {static_cast<std::uint32_t>(ds.size())};
  for (const auto& smp : ds.samples) {
    if (smp.label < 0 || smp.label > 255) throw ArgumentError("idx_labels: label out of byte range");
    out.payload.push_back(static_cast<std::uint8_t>(smp.label));
  }
  return out;
}

void write_idx(const Dataset& ds, const std::string& images_path, const std::string& labels_path) {
  write_file_bytes(images_path, serialize_idx(idx_images(ds)));
  write_file_bytes(labels_path, serialize_idx(idx_labels(ds)));
}

CorpusStats corpus_stats(const Dataset& ds) {
  if (ds.samples.empty()) throw ArgumentError("corpus_stats: empty dataset");
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& smp : ds.samples) {
    s += sum(smp.x);
    n += smp.x.size();
  }
  const double mean = s / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& smp : ds.samples) {
    for (double v : smp.x.data()) ss += (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(n))};
}

Dataset normalize(const Dataset& ds, std::span<const double> mean, std::span<const double> std) {
  if (mean.size() != std.size() || mean.empty()) {
    throw ArgumentError("normalize: mean and std must be non-empty and of equal length");
  }
  for (double s : std) {
    if (!(s > 0.0)) throw ArgumentError("normalize: std must be positive");
  }
  Dataset out = ds;
  if (out.samples.empty()) return out;
  const Shape& shape = out.sample_shape();
  const std::size_t channels = mean.size();
  if (channels > 1 && shape[0] != channels) {
    throw DimensionError("normalize: " + std::to_string(channels) +
                         " channel statistics for samples of shape " + shape_str(shape));
  }
  const std::size_t per_channel = shape_numel(shape) / (channels > 1 ? channels : shape_numel(shape));
  for (auto& smp : out.samples) {
    auto d = smp.x.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::size_t c = channels > 1 ? i / per_channel : 0;
      d[i] = (d[i] - mean[c]) / std[c];
    }
  }
  return out;
}

std::vector<Tensor> direct_encode(const Tensor& x, std::size_t T) {
  if (T == 0) throw ArgumentError("direct_encode: T must be at least 1");
  return std::vector<Tensor>(T, x);
}

Dataset synth_static(std::size_t n, std::size_t dims, std::size_t classes, double margin,
                     Rng& rng, std::size_t blobs) {
  if (n == 0 || dims == 0 || classes == 0 || blobs == 0) {
    throw ArgumentError("synth_static: n, dims, classes and blobs must be positive");
  }
  std::vector<std::vector<double>> centers(classes * blobs, std::vector<double>(dims));
  for (auto& c : centers) {
    double norm = 0.0;
    for (auto& v : c) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : c) v *= margin / norm;
  }
  Dataset ds;
  ds.kind = DataKind::static_images;
  ds.num_classes = classes;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t y = i % classes;
    const auto& c = centers[y + classes * ((i / classes) % blobs)];
    std::vector<double> x(dims);
    for (std::size_t d = 0; d < dims; ++d) x[d] = c[d] + rng.normal();
    ds.samples.push_back({Tensor({dims}, std::move(x)), static_cast<int>(y)});
  }
  return ds;
}

Dataset synth_event_frames(std::size_t n, std::size_t dims, std::size_t T, double rate,
                           std::size_t classes, Rng& rng, double fidelity) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ArgumentError("synth_event_frames: rate must lie in [0, 1]");
  if (n == 0 || dims == 0 || T == 0 || classes == 0) {
    throw ArgumentError("synth_event_frames: n, dims, T and classes must be positive");
  }
  std::vector<std::vector<double>> pattern(classes, std::vector<double>(T * dims));
  for (auto& p : pattern) {
    for (auto& v : p) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  Dataset ds;
  ds.kind = DataKind::neuromorphic;
  ds.num_classes = classes;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t y = i % classes;
    std::vector<double> frames(T * dims, 0.0);
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const bool active = rng.uniform() < rate;
      const bool faithful = rng.uniform() < fidelity;
      if (active) frames[k] = faithful ? pattern[y][k] : -pattern[y][k];
    }
    ds.samples.push_back({Tensor({T, dims}, std::move(frames)), static_cast<int>(y)});
  }
  return ds;
}

Batch make_batch(const Dataset& ds, std::span<const std::size_t> indices, std::size_t T) {
  if (indices.empty()) throw ArgumentError("make_batch: empty index list");
  const std::size_t B = indices.size();
  const std::size_t D = ds.feature_dim();
  Batch batch;
  batch.inputs.assign(T, Tensor({B, D}));
  for (std::size_t b = 0; b < B; ++b) {
    const Sample& s = ds.samples.at(indices[b]);
    batch.labels.push_back(s.label);
    if (ds.kind == DataKind::neuromorphic) {
      if (s.x.dim(0) != T) {
        throw DimensionError("make_batch: sample has " + std::to_string(s.x.dim(0)) +
                             " frames, network expects T=" + std::to_string(T));
      }
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t d = 0; d < D; ++d) batch.inputs[t].at(b, d) = s.x[t * D + d];
      }
    } else {
      const auto seq = direct_encode(s.x, T);
      for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t d = 0; d < D; ++d) batch.inputs[t].at(b, d) = seq[t][d];
      }
    }
  }
  return batch;
}

std::string format_manifest(const std::map<std::string, std::string>& entries) {
  std::string out;
  for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
  return out;
}

}  // namespace ctsn
