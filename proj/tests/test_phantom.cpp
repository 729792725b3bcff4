#include <cmath>

#include "doctest.h"
#include "radonkit/phantom.hpp"
#include "radonkit/tensor.hpp"

using namespace radonkit;

namespace {

double px(const Tensor& p, int64_t i, int64_t j) {
  int64_t s = p.dim(1);
  return p.at(i * s + j);
}

}  // namespace

TEST_CASE("shepp_logan shape, range, determinism") {
  Tensor p = shepp_logan(64);
  CHECK(p.shape() == Shape{1, 64, 64});
  CHECK(p.precision() == Precision::Single);
  double lo = 1.0, hi = 0.0;
  for (int64_t i = 0; i < p.size(); ++i) {
    lo = std::min(lo, p.at(i));
    hi = std::max(hi, p.at(i));
  }
  // cancellation inside overlapping ellipses can leave values a few ulp
  // below zero (1 - 0.8 - 0.2 in floating point)
  CHECK(lo >= -1e-6);
  CHECK(hi <= 1.0);
  CHECK(hi == 1.0);
  CHECK(p.bit_equal(shepp_logan(64)));
}

TEST_CASE("shepp_logan frozen samples at the native 400 grid") {
  Tensor p = shepp_logan(400, Precision::Double);
  CHECK(px(p, 0, 0) == 0.0);
  CHECK(px(p, 21, 176) == 0x1.0p+0);
  CHECK(px(p, 35, 165) == 0x1.9999999999998p-3);
  CHECK(px(p, 84, 187) == 0x1.3333333333332p-2);
  CHECK(px(p, 147, 165) == 0x1.9999999999996p-4);
  CHECK(px(p, 175, 198) == 0x1.9999999999998p-2);
  double row200 = 0.0;
  for (int64_t j = 0; j < 400; ++j) row200 += px(p, 200, j);
  CHECK(row200 == doctest::Approx(0x1.5199999999998p+5).epsilon(1e-9));
}

TEST_CASE("shepp_logan frozen samples at 512 (bilinear resample)") {
  Tensor p = shepp_logan(512, Precision::Double);
  CHECK(px(p, 0, 0) == 0.0);
  CHECK(px(p, 21, 242) == 0x1.3p-2);
  CHECK(px(p, 21, 253) == 0x1.0p+0);
  CHECK(px(p, 28, 209) == 0x1.0d8p-3);
  CHECK(px(p, 35, 319) == 0x1.ab8p-3);
  CHECK(px(p, 42, 220) == 0x1.cp-2);
  CHECK(px(p, 42, 231) == 0x1.9999999999998p-3);
  CHECK(px(p, 42, 330) == 0x1.68p-1);
  // fractional blend positions
  CHECK(px(p, 21, 232) == 0x1.56p-5);
  CHECK(px(p, 21, 279) == 0x1.56p-5);
  CHECK(px(p, 22, 226) == 0x1.22p-5);
  double row256 = 0.0, total = 0.0;
  for (int64_t j = 0; j < 512; ++j) row256 += px(p, 256, j);
  for (int64_t i = 0; i < p.size(); ++i) total += p.at(i);
  CHECK(row256 == doctest::Approx(0x1.afdae66666666p+5).epsilon(1e-9));
  CHECK(total == doctest::Approx(0x1.fbdd018666665p+14).epsilon(1e-9));
}

TEST_CASE("shepp_logan frozen samples at 64") {
  Tensor p = shepp_logan(64, Precision::Double);
  CHECK(px(p, 0, 0) == 0.0);
  CHECK(px(p, 7, 22) == 0x1.ecccccccccccdp-1);
  CHECK(px(p, 7, 33) == 0x1.9999999999998p-3);
  CHECK(px(p, 14, 33) == 0x1.3333333333332p-2);
  CHECK(px(p, 21, 11) == 0x1.0p+0);
  CHECK(px(p, 28, 33) == 0x1.3ffffffffffffp-2);
  CHECK(px(p, 35, 33) == 0x1.b333333333332p-3);
  double total = 0.0;
  for (int64_t i = 0; i < p.size(); ++i) total += p.at(i);
  CHECK(total == doctest::Approx(0x1.ffc5999999998p+8).epsilon(1e-9));
}

TEST_CASE("shepp_logan corners are outside every ellipse") {
  for (int64_t s : {32, 400, 512}) {
    Tensor p = shepp_logan(s);
    CHECK(px(p, 0, 0) == 0.0);
    CHECK(px(p, 0, s - 1) == 0.0);
    CHECK(px(p, s - 1, 0) == 0.0);
    CHECK(px(p, s - 1, s - 1) == 0.0);
  }
}

TEST_CASE("shepp_logan mirror symmetry away from the asymmetric ellipses") {
  // the standard modified table is not exactly left-right symmetric: the
  // rotated pair has different semi-axes and the bottom trio sits off
  // axis, so only rows clear of those ellipses mirror bitwise
  struct Cfg {
    int64_t size;
    int64_t top_rows;
    int64_t bottom_rows;
  };
  for (Cfg c : {Cfg{400, 100, 50}, Cfg{512, 128, 64}, Cfg{64, 15, 8}}) {
    Tensor p = shepp_logan(c.size, Precision::Double);
    int64_t top_bad = 0, bottom_bad = 0, asym = 0;
    for (int64_t i = 0; i < c.size; ++i) {
      int64_t row_bad = 0;
      for (int64_t j = 0; j < c.size; ++j) row_bad += px(p, i, j) != px(p, i, c.size - 1 - j);
      if (i < c.top_rows) top_bad += row_bad;
      if (i >= c.size - c.bottom_rows) bottom_bad += row_bad;
      asym += row_bad;
    }
    CHECK(top_bad == 0);
    CHECK(bottom_bad == 0);
    CHECK(double(asym) / double(c.size * c.size) < 0.10);
  }
}

TEST_CASE("shepp_logan size 1 samples the origin") {
  Tensor p = shepp_logan(1, Precision::Double);
  CHECK(p.shape() == Shape{1, 1, 1});
  // origin lies inside ellipses with intensities 1, -0.8: value 0.2
  CHECK(p.at(0) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("shepp_logan validation") {
  CHECK_THROWS_AS(shepp_logan(0), ValidationError);
  CHECK_THROWS_AS(shepp_logan(-8), ValidationError);
}

TEST_CASE("shepp_logan precision variants") {
  Tensor s = shepp_logan(512);
  Tensor d = shepp_logan(512, Precision::Double);
  Tensor h = shepp_logan(512, Precision::Half);
  CHECK(s.precision() == Precision::Single);
  CHECK(d.precision() == Precision::Double);
  CHECK(h.precision() == Precision::Half);
  CHECK(relative_error(s, d) < 1e-7);
  CHECK(relative_error(h, d) == doctest::Approx(1.3603301311629248e-4).epsilon(1e-9));
  CHECK(relative_error(h, s) == doctest::Approx(1.360358209014672e-4).epsilon(1e-9));
}
