#include "radonkit/tensor.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace radonkit {

const char* precision_name(Precision p) {
  switch (p) {
    case Precision::Half: return "half";
    case Precision::Single: return "single";
    case Precision::Double: return "double";
  }
  return "?";
}

Precision precision_from_name(const std::string& name) {
  if (name == "half") return Precision::Half;
  if (name == "single" || name == "float") return Precision::Single;
  if (name == "double") return Precision::Double;
  throw ValidationError("unknown precision '" + name + "' (expected half, single, or double)");
}

int64_t shape_numel(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

bool same_shape(const Shape& a, const Shape& b) { return a == b; }

namespace {

void check_shape(const Shape& shape) {
  if (shape.empty()) throw ValidationError("tensor shape must have at least one dimension");
  for (int64_t d : shape) {
    if (d <= 0) throw ValidationError("tensor shape " + shape_str(shape) + " has a non-positive dimension");
  }
}

}  // namespace

Tensor Tensor::zeros(Shape shape, Precision p) {
  check_shape(shape);
  Tensor t;
  t.shape_ = std::move(shape);
  t.numel_ = shape_numel(t.shape_);
  t.precision_ = p;
  switch (p) {
    case Precision::Half: t.data_ = std::vector<uint16_t>(size_t(t.numel_), 0); break;
    case Precision::Single: t.data_ = std::vector<float>(size_t(t.numel_), 0.0f); break;
    case Precision::Double: t.data_ = std::vector<double>(size_t(t.numel_), 0.0); break;
  }
  return t;
}

Tensor Tensor::full(Shape shape, double value, Precision p) {
  Tensor t = zeros(std::move(shape), p);
  for (int64_t i = 0; i < t.size(); ++i) t.set(i, value);
  return t;
}

Tensor Tensor::from_vec(Shape shape, std::vector<float> data) {
  check_shape(shape);
  if (shape_numel(shape) != int64_t(data.size()))
    throw ValidationError("data length " + std::to_string(data.size()) + " does not match shape " + shape_str(shape));
  Tensor t;
  t.shape_ = std::move(shape);
  t.numel_ = int64_t(data.size());
  t.precision_ = Precision::Single;
  t.data_ = std::move(data);
  return t;
}

Tensor Tensor::from_vec(Shape shape, std::vector<double> data) {
  check_shape(shape);
  if (shape_numel(shape) != int64_t(data.size()))
    throw ValidationError("data length " + std::to_string(data.size()) + " does not match shape " + shape_str(shape));
  Tensor t;
  t.shape_ = std::move(shape);
  t.numel_ = int64_t(data.size());
  t.precision_ = Precision::Double;
  t.data_ = std::move(data);
  return t;
}

Tensor Tensor::from_half_bits(Shape shape, std::vector<uint16_t> bits) {
  check_shape(shape);
  if (shape_numel(shape) != int64_t(bits.size()))
    throw ValidationError("data length " + std::to_string(bits.size()) + " does not match shape " + shape_str(shape));
  Tensor t;
  t.shape_ = std::move(shape);
  t.numel_ = int64_t(bits.size());
  t.precision_ = Precision::Half;
  t.data_ = std::move(bits);
  return t;
}

Tensor Tensor::from_double_as(Shape shape, const std::vector<double>& data, Precision p) {
  check_shape(shape);
  if (shape_numel(shape) != int64_t(data.size()))
    throw ValidationError("data length " + std::to_string(data.size()) + " does not match shape " + shape_str(shape));
  if (p == Precision::Double) return from_vec(std::move(shape), data);
  if (p == Precision::Single) {
    std::vector<float> f(data.size());
    for (size_t i = 0; i < data.size(); ++i) f[i] = float(data[i]);
    return from_vec(std::move(shape), std::move(f));
  }
  std::vector<uint16_t> h(data.size());
  for (size_t i = 0; i < data.size(); ++i) h[i] = float_to_half(float(data[i]));
  return from_half_bits(std::move(shape), std::move(h));
}

Tensor Tensor::from_float_as(Shape shape, const std::vector<float>& data, Precision p) {
  check_shape(shape);
  if (shape_numel(shape) != int64_t(data.size()))
    throw ValidationError("data length " + std::to_string(data.size()) + " does not match shape " + shape_str(shape));
  if (p == Precision::Single) return from_vec(std::move(shape), data);
  if (p == Precision::Double) {
    std::vector<double> d(data.begin(), data.end());
    return from_vec(std::move(shape), std::move(d));
  }
  std::vector<uint16_t> h(data.size());
  for (size_t i = 0; i < data.size(); ++i) h[i] = float_to_half(data[i]);
  return from_half_bits(std::move(shape), std::move(h));
}

const std::vector<uint16_t>& Tensor::half_bits() const {
  if (precision_ != Precision::Half) throw ValidationError("tensor is not half precision");
  return std::get<std::vector<uint16_t>>(data_);
}
const std::vector<float>& Tensor::float_data() const {
  if (precision_ != Precision::Single) throw ValidationError("tensor is not single precision");
  return std::get<std::vector<float>>(data_);
}
const std::vector<double>& Tensor::double_data() const {
  if (precision_ != Precision::Double) throw ValidationError("tensor is not double precision");
  return std::get<std::vector<double>>(data_);
}
std::vector<uint16_t>& Tensor::half_bits() {
  if (precision_ != Precision::Half) throw ValidationError("tensor is not half precision");
  return std::get<std::vector<uint16_t>>(data_);
}
std::vector<float>& Tensor::float_data() {
  if (precision_ != Precision::Single) throw ValidationError("tensor is not single precision");
  return std::get<std::vector<float>>(data_);
}
std::vector<double>& Tensor::double_data() {
  if (precision_ != Precision::Double) throw ValidationError("tensor is not double precision");
  return std::get<std::vector<double>>(data_);
}

std::vector<float> Tensor::to_float_vec() const {
  std::vector<float> out(static_cast<size_t>(numel_));
  switch (precision_) {
    case Precision::Half: {
      const auto& h = std::get<std::vector<uint16_t>>(data_);
      for (size_t i = 0; i < h.size(); ++i) out[i] = half_to_float(h[i]);
      break;
    }
    case Precision::Single:
      out = std::get<std::vector<float>>(data_);
      break;
    case Precision::Double: {
      const auto& d = std::get<std::vector<double>>(data_);
      for (size_t i = 0; i < d.size(); ++i) out[i] = float(d[i]);
      break;
    }
  }
  return out;
}

std::vector<double> Tensor::to_double_vec() const {
  std::vector<double> out(static_cast<size_t>(numel_));
  switch (precision_) {
    case Precision::Half: {
      const auto& h = std::get<std::vector<uint16_t>>(data_);
      for (size_t i = 0; i < h.size(); ++i) out[i] = double(half_to_float(h[i]));
      break;
    }
    case Precision::Single: {
      const auto& f = std::get<std::vector<float>>(data_);
      for (size_t i = 0; i < f.size(); ++i) out[i] = double(f[i]);
      break;
    }
    case Precision::Double:
      out = std::get<std::vector<double>>(data_);
      break;
  }
  return out;
}

double Tensor::at(int64_t flat) const {
  switch (precision_) {
    case Precision::Half: return double(half_to_float(std::get<std::vector<uint16_t>>(data_)[size_t(flat)]));
    case Precision::Single: return double(std::get<std::vector<float>>(data_)[size_t(flat)]);
    case Precision::Double: return std::get<std::vector<double>>(data_)[size_t(flat)];
  }
  return 0.0;
}

void Tensor::set(int64_t flat, double value) {
  switch (precision_) {
    case Precision::Half: std::get<std::vector<uint16_t>>(data_)[size_t(flat)] = float_to_half(float(value)); break;
    case Precision::Single: std::get<std::vector<float>>(data_)[size_t(flat)] = float(value); break;
    case Precision::Double: std::get<std::vector<double>>(data_)[size_t(flat)] = value; break;
  }
}

bool Tensor::bit_equal(const Tensor& other) const {
  if (shape_ != other.shape_ || precision_ != other.precision_) return false;
  switch (precision_) {
    case Precision::Half:
      return std::get<std::vector<uint16_t>>(data_) == std::get<std::vector<uint16_t>>(other.data_);
    case Precision::Single: {
      const auto& a = std::get<std::vector<float>>(data_);
      const auto& b = std::get<std::vector<float>>(other.data_);
      return std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
    }
    case Precision::Double: {
      const auto& a = std::get<std::vector<double>>(data_);
      const auto& b = std::get<std::vector<double>>(other.data_);
      return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
    }
  }
  return false;
}

Tensor to_half_storage(const Tensor& x) {
  if (x.precision() == Precision::Half) return x;  // idempotent
  std::vector<uint16_t> bits(size_t(x.size()));
  if (x.precision() == Precision::Single) {
    const auto& f = x.float_data();
    for (size_t i = 0; i < f.size(); ++i) {
      if (half_overflows(f[i]))
        throw HalfOverflowError("value " + std::to_string(f[i]) + " at flat index " + std::to_string(i) +
                                    " overflows half precision",
                                long(i));
      bits[i] = float_to_half(f[i]);
    }
  } else {
    const auto& d = x.double_data();
    for (size_t i = 0; i < d.size(); ++i) {
      float f = float(d[i]);
      if (half_overflows(f) || (std::isinf(f) && std::isfinite(d[i])))
        throw HalfOverflowError("value " + std::to_string(d[i]) + " at flat index " + std::to_string(i) +
                                    " overflows half precision",
                                long(i));
      bits[i] = float_to_half(f);
    }
  }
  return Tensor::from_half_bits(x.shape(), std::move(bits));
}

Tensor convert(const Tensor& x, Precision target) {
  if (x.precision() == target) return x;
  if (target == Precision::Double) return Tensor::from_vec(x.shape(), x.to_double_vec());
  if (target == Precision::Single) return Tensor::from_vec(x.shape(), x.to_float_vec());
  std::vector<float> f = x.to_float_vec();
  std::vector<uint16_t> bits(f.size());
  for (size_t i = 0; i < f.size(); ++i) bits[i] = float_to_half(f[i]);
  return Tensor::from_half_bits(x.shape(), std::move(bits));
}

namespace {

void check_pair(const Tensor& a, const Tensor& b, const char* op) {
  if (!same_shape(a.shape(), b.shape()))
    throw ValidationError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  if (a.precision() != b.precision())
    throw ValidationError(std::string(op) + ": precision mismatch " + precision_name(a.precision()) + " vs " +
                          precision_name(b.precision()));
}

template <class F>
Tensor elementwise2(const Tensor& a, const Tensor& b, F&& f) {
  if (a.precision() == Precision::Double) {
    const auto& da = a.double_data();
    const auto& db = b.double_data();
    std::vector<double> out(da.size());
    for (size_t i = 0; i < da.size(); ++i) out[i] = f(da[i], db[i]);
    return Tensor::from_vec(a.shape(), std::move(out));
  }
  std::vector<float> fa = a.to_float_vec();
  std::vector<float> fb = b.to_float_vec();
  std::vector<float> out(fa.size());
  for (size_t i = 0; i < fa.size(); ++i) out[i] = float(f(fa[i], fb[i]));
  return Tensor::from_float_as(a.shape(), out, a.precision());
}

template <class F>
Tensor elementwise1(const Tensor& a, F&& f) {
  if (a.precision() == Precision::Double) {
    const auto& da = a.double_data();
    std::vector<double> out(da.size());
    for (size_t i = 0; i < da.size(); ++i) out[i] = f(da[i]);
    return Tensor::from_vec(a.shape(), std::move(out));
  }
  std::vector<float> fa = a.to_float_vec();
  std::vector<float> out(fa.size());
  for (size_t i = 0; i < fa.size(); ++i) out[i] = float(f(fa[i]));
  return Tensor::from_float_as(a.shape(), out, a.precision());
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_pair(a, b, "add");
  return elementwise2(a, b, [](auto x, auto y) { return x + y; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_pair(a, b, "sub");
  return elementwise2(a, b, [](auto x, auto y) { return x - y; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_pair(a, b, "mul");
  return elementwise2(a, b, [](auto x, auto y) { return x * y; });
}

Tensor scale(const Tensor& a, double s) {
  if (a.precision() == Precision::Double)
    return elementwise1(a, [s](double x) { return x * s; });
  float sf = float(s);
  return elementwise1(a, [sf](float x) { return x * sf; });
}

Tensor axpy(double alpha, const Tensor& x, const Tensor& y) {
  check_pair(x, y, "axpy");
  if (x.precision() == Precision::Double)
    return elementwise2(x, y, [alpha](double a, double b) { return alpha * a + b; });
  float af = float(alpha);
  return elementwise2(x, y, [af](float a, float b) { return af * a + b; });
}

Tensor clamp_min(const Tensor& a, double lo) {
  if (a.precision() == Precision::Double)
    return elementwise1(a, [lo](double x) { return x < lo ? lo : x; });
  float lof = float(lo);
  return elementwise1(a, [lof](float x) { return x < lof ? lof : x; });
}

bool all_finite(const Tensor& a) {
  for (int64_t i = 0; i < a.size(); ++i)
    if (!std::isfinite(a.at(i))) return false;
  return true;
}

double dot(const Tensor& a, const Tensor& b) {
  check_pair(a, b, "dot");
  double acc = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) acc += a.at(i) * b.at(i);
  return acc;
}

double norm2(const Tensor& a) {
  double acc = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) {
    double v = a.at(i);
    acc += v * v;
  }
  return std::sqrt(acc);
}

std::vector<double> batch_dot(const Tensor& a, const Tensor& b) {
  check_pair(a, b, "batch_dot");
  int64_t nb = a.batch();
  int64_t per = a.size() / nb;
  std::vector<double> out(size_t(nb), 0.0);
  for (int64_t e = 0; e < nb; ++e) {
    double acc = 0.0;
    for (int64_t i = e * per; i < (e + 1) * per; ++i) acc += a.at(i) * b.at(i);
    out[size_t(e)] = acc;
  }
  return out;
}

std::vector<double> batch_norm2(const Tensor& a) {
  int64_t nb = a.batch();
  int64_t per = a.size() / nb;
  std::vector<double> out(size_t(nb), 0.0);
  for (int64_t e = 0; e < nb; ++e) {
    double acc = 0.0;
    for (int64_t i = e * per; i < (e + 1) * per; ++i) {
      double v = a.at(i);
      acc += v * v;
    }
    out[size_t(e)] = std::sqrt(acc);
  }
  return out;
}

double relative_error(const Tensor& a, const Tensor& b) {
  if (!same_shape(a.shape(), b.shape()))
    throw ValidationError("relative_error: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  double num = 0.0, den = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) {
    double d = a.at(i) - b.at(i);
    double r = b.at(i);
    num += d * d;
    den += r * r;
  }
  if (den == 0.0) throw ValidationError("relative_error: reference tensor is identically zero");
  return std::sqrt(num) / std::sqrt(den);
}

double mse(const Tensor& a, const Tensor& b) {
  if (!same_shape(a.shape(), b.shape()))
    throw ValidationError("mse: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  double acc = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) {
    double d = a.at(i) - b.at(i);
    acc += d * d;
  }
  return acc / double(a.size());
}

}  // namespace radonkit
