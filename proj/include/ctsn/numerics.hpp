#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctsn {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

// Dense row-major array of doubles. Every dimension is positive and
// data().size() == product of dimensions.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }
  static Tensor scalar(double v) { return Tensor({1}, std::vector<double>{v}); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Rank-2 element access.
  double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

  // Same flat data under a new shape with the same element count.
  Tensor reshaped(Shape shape) const;

  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// a[m×k] · b[k×n]. Summation runs left to right over k.
Tensor matmul(const Tensor& a, const Tensor& b);
// aᵀ · b for a[k×m], b[k×n] -> [m×n].
Tensor matmul_at_b(const Tensor& a, const Tensor& b);
// a · bᵀ for a[m×k], b[n×k] -> [m×n].
Tensor matmul_a_bt(const Tensor& a, const Tensor& b);

enum class Op { add, sub, mul, relu, sigmoid, square, scale };

double relu(double x);
double sigmoid(double x);

// Unary form: relu, sigmoid, square; scale takes `factor`.
Tensor elementwise(Op op, const Tensor& a, double factor = 1.0);
// Binary form: add, sub, mul. Shapes must be equal.
Tensor elementwise(Op op, const Tensor& a, const Tensor& b);

inline Tensor add(const Tensor& a, const Tensor& b) { return elementwise(Op::add, a, b); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(Op::sub, a, b); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(Op::mul, a, b); }
inline Tensor relu(const Tensor& a) { return elementwise(Op::relu, a); }
inline Tensor sigmoid(const Tensor& a) { return elementwise(Op::sigmoid, a); }
inline Tensor square(const Tensor& a) { return elementwise(Op::square, a); }
inline Tensor scale(const Tensor& a, double f) { return elementwise(Op::scale, a, f); }

// a[m×n] + bias[n] broadcast over rows.
Tensor add_row_vector(const Tensor& a, const Tensor& bias);
// Column sums of a[m×n] -> [n].
Tensor sum_rows(const Tensor& a);

double sum(const Tensor& a);
double sum_squares(const Tensor& a);

void require_same_shape(const Tensor& a, const Tensor& b, std::string_view what);

// Deterministic generator: std::mt19937_64 (its output sequence is fixed by
// the C++ standard), with uniform doubles taken from the top 53 bits and
// normals from Box-Muller. No std::*_distribution is used, so the integer
// and uniform streams are identical on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }
  // [0, 1)
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  // Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n);
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Sub-seed for a named component of a run, stable across platforms.
  static std::uint64_t derive(std::uint64_t root, std::string_view tag);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ctsn
