#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "radonkit/errors.hpp"
#include "radonkit/half.hpp"

namespace radonkit {

enum class Precision { Half, Single, Double };

const char* precision_name(Precision p);
Precision precision_from_name(const std::string& name);

using Shape = std::vector<int64_t>;

int64_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);
bool same_shape(const Shape& a, const Shape& b);

// Dense row-major array with explicit storage precision. Shapes are
// batch-first: images are B x H x W, sinograms B x angles x det_count,
// shearlet coefficients B x K x H x W.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, Precision p = Precision::Single);
  static Tensor full(Shape shape, double value, Precision p = Precision::Single);
  static Tensor from_vec(Shape shape, std::vector<float> data);
  static Tensor from_vec(Shape shape, std::vector<double> data);
  static Tensor from_half_bits(Shape shape, std::vector<uint16_t> bits);
  // Narrows a double buffer into the requested storage precision. Values
  // that overflow half round to inf (no error); see to_half_storage for the
  // checked conversion.
  static Tensor from_double_as(Shape shape, const std::vector<double>& data, Precision p);
  static Tensor from_float_as(Shape shape, const std::vector<float>& data, Precision p);

  bool defined() const { return !shape_.empty(); }
  const Shape& shape() const { return shape_; }
  int ndim() const { return int(shape_.size()); }
  int64_t dim(int i) const { return shape_[size_t(i)]; }
  int64_t size() const { return numel_; }
  int64_t batch() const { return shape_.empty() ? 0 : shape_[0]; }
  Precision precision() const { return precision_; }

  const std::vector<uint16_t>& half_bits() const;
  const std::vector<float>& float_data() const;
  const std::vector<double>& double_data() const;
  std::vector<uint16_t>& half_bits();
  std::vector<float>& float_data();
  std::vector<double>& double_data();

  // Widening copies. Half -> float is exact; float -> double is exact.
  std::vector<float> to_float_vec() const;
  std::vector<double> to_double_vec() const;

  double at(int64_t flat) const;  // widened scalar read
  void set(int64_t flat, double value);

  bool bit_equal(const Tensor& other) const;

 private:
  Shape shape_;
  int64_t numel_ = 0;
  Precision precision_ = Precision::Single;
  std::variant<std::vector<uint16_t>, std::vector<float>, std::vector<double>> data_;
};

// Storage conversion. Widening is exact. Narrowing float/double -> half
// raises HalfOverflowError (naming the first offending flat index) when a
// finite value rounds to infinity; NaN and inf inputs pass through.
// Applying it to a tensor already in half storage is the identity.
Tensor to_half_storage(const Tensor& x);
Tensor convert(const Tensor& x, Precision target);  // unchecked narrowing

// Elementwise ops. Both operands must share shape and precision; arithmetic
// runs in the storage's compute precision (float for half and single,
// double for double) and results keep the operands' storage precision.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor axpy(double alpha, const Tensor& x, const Tensor& y);  // alpha*x + y
Tensor clamp_min(const Tensor& a, double lo);

bool all_finite(const Tensor& a);

// Reductions in double regardless of storage precision.
double dot(const Tensor& a, const Tensor& b);
double norm2(const Tensor& a);
// Per batch element, reducing over all trailing dims.
std::vector<double> batch_dot(const Tensor& a, const Tensor& b);
std::vector<double> batch_norm2(const Tensor& a);

// Metrics, accumulated in double: ||a-b||_2 / ||b||_2 and mean((a-b)^2).
// Shapes must match; precisions may differ (both are widened).
double relative_error(const Tensor& a, const Tensor& b);
double mse(const Tensor& a, const Tensor& b);

}  // namespace radonkit
