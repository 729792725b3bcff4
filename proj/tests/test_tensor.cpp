#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "radonkit/half.hpp"
#include "radonkit/tensor.hpp"

using namespace radonkit;

TEST_CASE("half conversion matches IEEE 754 binary16 round-to-nearest-even") {
  CHECK(float_to_half(1.0f) == 0x3c00);
  CHECK(float_to_half(0.3f) == 0x34cd);
  CHECK(half_to_float(0x34cd) == 0.300048828125f);
  CHECK(float_to_half(0.1f) == 0x2e66);
  CHECK(half_to_float(0x2e66) == 0.0999755859375f);
  CHECK(half_to_float(float_to_half(1e-8f)) == 0.0f);
  // 2049 ties to even: same half as 2048
  CHECK(float_to_half(2048.0f) == 0x6800);
  CHECK(float_to_half(2049.0f) == 0x6800);
  CHECK(float_to_half(65504.0f) == 0x7bff);
  CHECK(half_to_float(0x7bff) == 65504.0f);
  CHECK(half_overflows(65520.0f));
  CHECK_FALSE(half_overflows(65504.0f));
  CHECK_FALSE(half_overflows(std::numeric_limits<float>::infinity()));
  CHECK_FALSE(half_overflows(std::numeric_limits<float>::quiet_NaN()));
}

TEST_CASE("to_half_storage") {
  SUBCASE("zeros stay bitwise zero") {
    Tensor z = Tensor::zeros({2, 3});
    Tensor h = to_half_storage(z);
    CHECK(h.precision() == Precision::Half);
    for (uint16_t b : h.half_bits()) CHECK(b == 0);
  }
  SUBCASE("exact values survive and the map is idempotent") {
    Tensor x = Tensor::from_vec({4}, std::vector<float>{1.0f, -0.5f, 0.25f, 2.0f});
    Tensor h = to_half_storage(x);
    CHECK(h.half_bits() == std::vector<uint16_t>{0x3c00, 0xb800, 0x3400, 0x4000});
    CHECK(to_half_storage(h).bit_equal(h));
  }
  SUBCASE("finite overflow raises with the flat index") {
    Tensor x = Tensor::from_vec({3}, std::vector<float>{1.0f, 65520.0f, 2.0f});
    CHECK_THROWS_AS(to_half_storage(x), HalfOverflowError);
    try {
      to_half_storage(x);
    } catch (const HalfOverflowError& e) {
      CHECK(e.index == 1);
    }
  }
  SUBCASE("inf and nan pass through") {
    float inf = std::numeric_limits<float>::infinity();
    float nan = std::numeric_limits<float>::quiet_NaN();
    Tensor x = Tensor::from_vec({2}, std::vector<float>{inf, nan});
    Tensor h = to_half_storage(x);
    CHECK(h.half_bits()[0] == 0x7c00);
    CHECK(std::isnan(half_to_float(h.half_bits()[1])));
  }
  SUBCASE("unchecked convert rounds overflow to inf instead") {
    Tensor x = Tensor::from_vec({1}, std::vector<float>{65520.0f});
    Tensor h = convert(x, Precision::Half);
    CHECK(h.half_bits()[0] == 0x7c00);
  }
  SUBCASE("widening is exact") {
    Tensor h = Tensor::from_half_bits({2}, {0x34cd, 0x2e66});
    Tensor f = convert(h, Precision::Single);
    CHECK(f.float_data()[0] == 0.300048828125f);
    CHECK(f.float_data()[1] == 0.0999755859375f);
    Tensor d = convert(f, Precision::Double);
    CHECK(d.double_data()[0] == 0.300048828125);
  }
}

TEST_CASE("construction and validation") {
  CHECK_THROWS_AS(Tensor::zeros({}), ValidationError);
  CHECK_THROWS_AS(Tensor::zeros({2, 0}), ValidationError);
  CHECK_THROWS_AS(Tensor::zeros({-1}), ValidationError);
  CHECK_THROWS_AS(Tensor::from_vec({3}, std::vector<float>{1.0f, 2.0f}), ValidationError);
  Tensor t = Tensor::full({2, 2}, 0.5, Precision::Double);
  CHECK(t.size() == 4);
  CHECK(t.batch() == 2);
  for (int64_t i = 0; i < 4; ++i) CHECK(t.at(i) == 0.5);
  t.set(3, -1.25);
  CHECK(t.at(3) == -1.25);
  CHECK_THROWS_AS(t.float_data(), ValidationError);
}

TEST_CASE("from_double_as narrows per target precision") {
  std::vector<double> v{0.3, 1.0};
  Tensor d = Tensor::from_double_as({2}, v, Precision::Double);
  CHECK(d.double_data()[0] == 0.3);
  Tensor s = Tensor::from_double_as({2}, v, Precision::Single);
  CHECK(s.float_data()[0] == 0.3f);
  Tensor h = Tensor::from_double_as({2}, v, Precision::Half);
  CHECK(h.half_bits()[0] == 0x34cd);
  CHECK(h.half_bits()[1] == 0x3c00);
}

TEST_CASE("elementwise ops") {
  Tensor a = Tensor::from_vec({2, 2}, std::vector<float>{1.0f, -2.0f, 3.0f, 0.5f});
  Tensor b = Tensor::from_vec({2, 2}, std::vector<float>{0.5f, 4.0f, -1.0f, 0.25f});
  SUBCASE("hand values") {
    CHECK(add(a, b).float_data() == std::vector<float>{1.5f, 2.0f, 2.0f, 0.75f});
    CHECK(sub(a, b).float_data() == std::vector<float>{0.5f, -6.0f, 4.0f, 0.25f});
    CHECK(mul(a, b).float_data() == std::vector<float>{0.5f, -8.0f, -3.0f, 0.125f});
    CHECK(scale(a, -2.0).float_data() == std::vector<float>{-2.0f, 4.0f, -6.0f, -1.0f});
    CHECK(axpy(2.0, a, b).float_data() == std::vector<float>{2.5f, 0.0f, 5.0f, 1.25f});
    CHECK(clamp_min(a, 0.0).float_data() == std::vector<float>{1.0f, 0.0f, 3.0f, 0.5f});
  }
  SUBCASE("mismatch raises") {
    Tensor c = Tensor::zeros({4});
    CHECK_THROWS_AS(add(a, c), ValidationError);
    Tensor d = Tensor::zeros({2, 2}, Precision::Double);
    CHECK_THROWS_AS(add(a, d), ValidationError);
  }
  SUBCASE("half ops run in float and store half") {
    Tensor ha = to_half_storage(Tensor::from_vec({2}, std::vector<float>{1.5f, 0.25f}));
    Tensor hb = to_half_storage(Tensor::from_vec({2}, std::vector<float>{0.25f, 0.25f}));
    Tensor s = add(ha, hb);
    CHECK(s.precision() == Precision::Half);
    CHECK(s.half_bits() == std::vector<uint16_t>{float_to_half(1.75f), float_to_half(0.5f)});
  }
}

TEST_CASE("all_finite") {
  Tensor a = Tensor::from_vec({3}, std::vector<float>{1.0f, 2.0f, -3.0f});
  CHECK(all_finite(a));
  a.set(1, std::numeric_limits<double>::infinity());
  CHECK_FALSE(all_finite(a));
  Tensor n = Tensor::from_vec({1}, std::vector<float>{std::numeric_limits<float>::quiet_NaN()});
  CHECK_FALSE(all_finite(n));
  Tensor h = Tensor::from_half_bits({2}, {0x7c00, 0x3c00});
  CHECK_FALSE(all_finite(h));
}

TEST_CASE("reductions") {
  Tensor a = Tensor::from_vec({2, 3}, std::vector<float>{1.0f, 2.0f, 3.0f, 4.0f, 5.0f, 6.0f});
  Tensor b = Tensor::from_vec({2, 3}, std::vector<float>{6.0f, 5.0f, 4.0f, 3.0f, 2.0f, 1.0f});
  CHECK(dot(a, b) == 56.0);
  CHECK(norm2(a) == doctest::Approx(std::sqrt(91.0)).epsilon(1e-15));
  std::vector<double> bd = batch_dot(a, b);
  REQUIRE(bd.size() == 2);
  CHECK(bd[0] == 28.0);
  CHECK(bd[1] == 28.0);
  std::vector<double> bn = batch_norm2(a);
  CHECK(bn[0] == doctest::Approx(std::sqrt(14.0)).epsilon(1e-15));
  CHECK(bn[1] == doctest::Approx(std::sqrt(77.0)).epsilon(1e-15));
  CHECK_THROWS_AS(dot(a, Tensor::zeros({3})), ValidationError);
}

TEST_CASE("relative_error") {
  Tensor b = Tensor::from_vec({4}, std::vector<float>{1.0f, -2.0f, 3.0f, 0.5f});
  CHECK(relative_error(b, b) == 0.0);
  CHECK(relative_error(scale(b, 2.0), b) == doctest::Approx(1.0).epsilon(1e-12));
  // precisions may differ: both sides widened
  CHECK(relative_error(convert(b, Precision::Double), b) == 0.0);
  CHECK_THROWS_AS(relative_error(b, Tensor::zeros({2})), ValidationError);
  CHECK_THROWS_AS(relative_error(b, Tensor::zeros({4})), ValidationError);
}

TEST_CASE("mse") {
  Tensor a = Tensor::from_vec({2, 2}, std::vector<float>{1.0f, 2.0f, 3.0f, 4.0f});
  CHECK(mse(a, a) == 0.0);
  Tensor shifted = add(a, Tensor::full({2, 2}, 0.5));
  CHECK(mse(shifted, a) == doctest::Approx(0.25).epsilon(1e-12));
  SUBCASE("brute-force double oracle on an 8x8 pair") {
    std::vector<double> va(64), vb(64);
    for (int i = 0; i < 64; ++i) {
      va[size_t(i)] = std::sin(0.1 * i) * 3.0;
      vb[size_t(i)] = std::cos(0.07 * i) - 0.4;
    }
    double acc = 0.0;
    for (int i = 0; i < 64; ++i) {
      double d = va[size_t(i)] - vb[size_t(i)];
      acc += d * d;
    }
    Tensor ta = Tensor::from_vec({8, 8}, va);
    Tensor tb = Tensor::from_vec({8, 8}, vb);
    CHECK(mse(ta, tb) == doctest::Approx(acc / 64.0).epsilon(1e-15));
  }
}

TEST_CASE("bit_equal") {
  Tensor a = Tensor::from_vec({2}, std::vector<float>{1.0f, 2.0f});
  Tensor b = Tensor::from_vec({2}, std::vector<float>{1.0f, 2.0f});
  CHECK(a.bit_equal(b));
  b.set(1, 2.5);
  CHECK_FALSE(a.bit_equal(b));
  CHECK_FALSE(a.bit_equal(convert(a, Precision::Double)));
  CHECK_FALSE(a.bit_equal(Tensor::from_vec({1, 2}, std::vector<float>{1.0f, 2.0f})));
  // negative zero differs bitwise from zero
  Tensor z = Tensor::from_vec({1}, std::vector<float>{0.0f});
  Tensor nz = Tensor::from_vec({1}, std::vector<float>{-0.0f});
  CHECK_FALSE(z.bit_equal(nz));
}

TEST_CASE("precision names round-trip") {
  CHECK(precision_from_name("half") == Precision::Half);
  CHECK(precision_from_name("single") == Precision::Single);
  CHECK(precision_from_name("double") == Precision::Double);
  CHECK(precision_from_name(precision_name(Precision::Half)) == Precision::Half);
  CHECK_THROWS_AS(precision_from_name("float128"), ValidationError);
}
