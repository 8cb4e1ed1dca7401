#include "ctsn/numerics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ctsn/errors.hpp"

namespace ctsn {

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

namespace {

void check_dims(const Shape& shape) {
  if (shape.empty()) throw DimensionError("tensor shape must have at least one dimension");
  for (auto d : shape) {
    if (d == 0) throw DimensionError("tensor dimension must be positive, got " + shape_str(shape));
  }
}

void require_rank2(const Tensor& t, std::string_view what) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(what) + ": expected a matrix, got " + shape_str(t.shape()));
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  check_dims(shape_);
  data_.assign(shape_numel(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_dims(shape_);
  if (data_.size() != shape_numel(shape_)) {
    throw DimensionError("data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str(shape_));
  }
}

Tensor Tensor::reshaped(Shape shape) const {
  return Tensor(std::move(shape), data_);
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_shape(const Tensor& a, const Tensor& b, std::string_view what) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(what) + ": shape mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul lhs");
  require_rank2(b, "matmul rhs");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: inner dimensions differ, " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
  }
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a.at(i, p) * b.at(p, j);
      out.at(i, j) = acc;
    }
  }
  return out;
}

Tensor matmul_at_b(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_at_b lhs");
  require_rank2(b, "matmul_at_b rhs");
  const std::size_t k = a.dim(0), m = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul_at_b: leading dimensions differ, " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
  }
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a.at(p, i) * b.at(p, j);
      out.at(i, j) = acc;
    }
  }
  return out;
}

Tensor matmul_a_bt(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul_a_bt lhs");
  require_rank2(b, "matmul_a_bt rhs");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(0);
  if (b.dim(1) != k) {
    throw DimensionError("matmul_a_bt: trailing dimensions differ, " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
  }
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a.at(i, p) * b.at(j, p);
      out.at(i, j) = acc;
    }
  }
  return out;
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor elementwise(Op op, const Tensor& a, double factor) {
  Tensor out = Tensor::zeros_like(a);
  auto src = a.data();
  auto dst = out.data();
  switch (op) {
    case Op::relu:
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = relu(src[i]);
      break;
    case Op::sigmoid:
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = sigmoid(src[i]);
      break;
    case Op::square:
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * src[i];
      break;
    case Op::scale:
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = factor * src[i];
      break;
    default:
      throw ArgumentError("elementwise: binary op used with a single operand");
  }
  return out;
}

Tensor elementwise(Op op, const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "elementwise");
  Tensor out = Tensor::zeros_like(a);
  auto x = a.data();
  auto y = b.data();
  auto dst = out.data();
  switch (op) {
    case Op::add:
      for (std::size_t i = 0; i < x.size(); ++i) dst[i] = x[i] + y[i];
      break;
    case Op::sub:
      for (std::size_t i = 0; i < x.size(); ++i) dst[i] = x[i] - y[i];
      break;
    case Op::mul:
      for (std::size_t i = 0; i < x.size(); ++i) dst[i] = x[i] * y[i];
      break;
    default:
      throw ArgumentError("elementwise: unary op used with two operands");
  }
  return out;
}

Tensor add_row_vector(const Tensor& a, const Tensor& bias) {
  require_rank2(a, "add_row_vector");
  if (bias.size() != a.dim(1)) {
    throw DimensionError("add_row_vector: bias " + shape_str(bias.shape()) +
                         " does not match columns of " + shape_str(a.shape()));
  }
  Tensor out = a;
  for (std::size_t i = 0; i < a.dim(0); ++i) {
    for (std::size_t j = 0; j < a.dim(1); ++j) out.at(i, j) += bias[j];
  }
  return out;
}

Tensor sum_rows(const Tensor& a) {
  require_rank2(a, "sum_rows");
  Tensor out({a.dim(1)});
  for (std::size_t i = 0; i < a.dim(0); ++i) {
    for (std::size_t j = 0; j < a.dim(1); ++j) out[j] += a.at(i, j);
  }
  return out;
}

double sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  return acc;
}

double sum_squares(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v * v;
  return acc;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below: n must be positive");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

std::uint64_t Rng::derive(std::uint64_t root, std::string_view tag) {
  // FNV-1a over the tag, then one splitmix64 finalisation of the mix.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = root ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ctsn
