#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "radonkit/errors.hpp"
#include "radonkit/npy.hpp"
#include "radonkit/rng.hpp"
#include "radonkit/tensor.hpp"

using namespace radonkit;
namespace fs = std::filesystem;

namespace {

// numpy-generated reference files, frozen as hex
const char* kGoldenF32 =
    "934e554d5059010076007b276465736372273a20273c6634272c2027666f727472616e5f6f72646572273a2046616c73652c2027736861"
    "7065273a2028322c2033292c207d20202020202020202020202020202020202020202020202020202020202020202020202020202020202"
    "0202020202020202020202020202020200a0000c03f000010c0000000000000484000009040000060bf";
const char* kGoldenF64 =
    "934e554d5059010076007b276465736372273a20273c6638272c2027666f727472616e5f6f72646572273a2046616c73652c20277368617065273a2028332c292c207d20202020202020202020202020202020202020202020202020202020202020202020202020202020202020"
    "20202020202020202020202020202020200a9a9999999999b93f9a9999999999c9bf333333333333d33f"
    "";
const char* kGoldenF16 =
    "934e554d5059010076007b276465736372273a20273c6632272c2027666f727472616e5f6f72646572273a2046616c73652c2027736861"
    "7065273a2028322c2032292c207d20202020202020202020202020202020202020202020202020202020202020202020202020202020202"
    "0202020202020202020202020202020200a003c00b800340040";

std::vector<unsigned char> from_hex(const std::string& h) {
  std::vector<unsigned char> out(h.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) out[i] = (unsigned char)std::stoi(h.substr(2 * i, 2), nullptr, 16);
  return out;
}

std::vector<unsigned char> read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return std::vector<unsigned char>((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& b) {
  std::ofstream f(p, std::ios::binary);
  REQUIRE(f.good());
  f.write(reinterpret_cast<const char*>(b.data()), std::streamsize(b.size()));
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / fs::path("radonkit_npy_" + std::to_string(uintptr_t(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// byte-level header edit: same-length substring replacement keeps HEADER_LEN valid
std::vector<unsigned char> patched(const std::vector<unsigned char>& bytes, const std::string& from,
                                   const std::string& to) {
  REQUIRE(from.size() == to.size());
  std::string s(bytes.begin(), bytes.end());
  size_t pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  s.replace(pos, from.size(), to);
  return std::vector<unsigned char>(s.begin(), s.end());
}

}  // namespace

TEST_CASE("write_array produces numpy-identical bytes") {
  TempDir d;
  SUBCASE("single 2x3") {
    Tensor t = convert(
        Tensor::from_vec({2, 3}, std::vector<double>{1.5, -2.25, 0.0, 3.125, 4.5, -0.875}), Precision::Single);
    fs::path p = d.path / "a.npy";
    write_array(p.string(), t);
    CHECK(read_bytes(p) == from_hex(kGoldenF32));
  }
  SUBCASE("double 1-d") {
    Tensor t = Tensor::from_vec({3}, std::vector<double>{0.1, -0.2, 0.3});
    fs::path p = d.path / "b.npy";
    write_array(p.string(), t);
    CHECK(read_bytes(p) == from_hex(kGoldenF64));
  }
  SUBCASE("half 2x2") {
    Tensor t = convert(Tensor::from_vec({2, 2}, std::vector<double>{1.0, -0.5, 0.25, 2.0}), Precision::Half);
    fs::path p = d.path / "c.npy";
    write_array(p.string(), t);
    CHECK(read_bytes(p) == from_hex(kGoldenF16));
  }
}

TEST_CASE("read_array parses numpy files exactly") {
  TempDir d;
  SUBCASE("single") {
    fs::path p = d.path / "a.npy";
    write_bytes(p, from_hex(kGoldenF32));
    Tensor t = read_array(p.string());
    REQUIRE(t.shape() == Shape{2, 3});
    CHECK(t.precision() == Precision::Single);
    const double want[6] = {1.5, -2.25, 0.0, 3.125, 4.5, -0.875};
    for (int64_t i = 0; i < 6; ++i) CHECK(t.at(i) == want[i]);
  }
  SUBCASE("double") {
    fs::path p = d.path / "b.npy";
    write_bytes(p, from_hex(kGoldenF64));
    Tensor t = read_array(p.string());
    REQUIRE(t.shape() == Shape{3});
    CHECK(t.precision() == Precision::Double);
    CHECK(t.at(0) == 0.1);
    CHECK(t.at(1) == -0.2);
    CHECK(t.at(2) == 0.3);
  }
  SUBCASE("half") {
    fs::path p = d.path / "c.npy";
    write_bytes(p, from_hex(kGoldenF16));
    Tensor t = read_array(p.string());
    REQUIRE(t.shape() == Shape{2, 2});
    CHECK(t.precision() == Precision::Half);
    CHECK(t.at(0) == 1.0);
    CHECK(t.at(1) == -0.5);
    CHECK(t.at(2) == 0.25);
    CHECK(t.at(3) == 2.0);
  }
}

TEST_CASE("npy roundtrip is bitwise for every precision") {
  TempDir d;
  Rng rng(42);
  for (Precision p : {Precision::Half, Precision::Single, Precision::Double}) {
    Tensor t = rng.uniform_pm1_tensor({3, 5, 7}, p);
    fs::path file = d.path / (std::string("rt_") + precision_name(p) + ".npy");
    write_array(file.string(), t);
    Tensor back = read_array(file.string());
    CHECK(back.bit_equal(t));
  }
}

TEST_CASE("read_array rejects malformed files") {
  TempDir d;
  std::vector<unsigned char> base = from_hex(kGoldenF32);

  SUBCASE("fortran_order true") {
    fs::path p = d.path / "fortran.npy";
    write_bytes(p, patched(base, "'fortran_order': False", "'fortran_order': True "));
    CHECK_THROWS_AS(read_array(p.string()), ValidationError);
  }
  SUBCASE("0-d shape") {
    fs::path p = d.path / "zerod.npy";
    write_bytes(p, patched(from_hex(kGoldenF64), "'shape': (3,),", "'shape': (),  "));
    CHECK_THROWS_AS(read_array(p.string()), ValidationError);
  }
  SUBCASE("zero-extent dimension") {
    fs::path p = d.path / "empty.npy";
    write_bytes(p, patched(base, "'shape': (2, 3)", "'shape': (3, 0)"));
    CHECK_THROWS_AS(read_array(p.string()), ValidationError);
  }
  SUBCASE("integer dtype") {
    fs::path p = d.path / "int.npy";
    write_bytes(p, patched(base, "'<f4'", "'<i4'"));
    try {
      read_array(p.string());
      FAIL("expected throw");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("<i4") != std::string::npos);
    }
  }
  SUBCASE("big-endian dtype") {
    fs::path p = d.path / "be.npy";
    write_bytes(p, patched(base, "'<f4'", "'>f4'"));
    CHECK_THROWS_AS(read_array(p.string()), ValidationError);
  }
  SUBCASE("bad magic") {
    std::vector<unsigned char> bad = base;
    bad[0] ^= 0xff;
    fs::path p = d.path / "magic.npy";
    write_bytes(p, bad);
    try {
      read_array(p.string());
      FAIL("expected throw");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("byte offset 0") != std::string::npos);
    }
  }
  SUBCASE("unsupported version") {
    std::vector<unsigned char> bad = base;
    bad[6] = 2;
    fs::path p = d.path / "v2.npy";
    write_bytes(p, bad);
    try {
      read_array(p.string());
      FAIL("expected throw");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("byte offset 6") != std::string::npos);
    }
  }
  SUBCASE("truncated payload names the byte offset") {
    std::vector<unsigned char> bad(base.begin(), base.end() - 4);
    fs::path p = d.path / "trunc.npy";
    write_bytes(p, bad);
    try {
      read_array(p.string());
      FAIL("expected throw");
    } catch (const ValidationError& e) {
      // preamble 10 + header 118 = 128, 20 of 24 payload bytes present
      CHECK(std::string(e.what()).find("byte offset 148") != std::string::npos);
    }
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(read_array((d.path / "absent.npy").string()), ValidationError); }
}

TEST_CASE("write_array is atomic and validates the destination") {
  TempDir d;
  Tensor t = Tensor::from_vec({2, 2}, std::vector<double>{1.0, 2.0, 3.0, 4.0});
  fs::path p = d.path / "out.npy";
  write_array(p.string(), t);

  // only the final file remains, no temp residue
  int entries = 0;
  bool saw_target = false;
  for (const auto& e : fs::directory_iterator(d.path)) {
    ++entries;
    saw_target = saw_target || e.path().filename() == "out.npy";
  }
  CHECK(entries == 1);
  CHECK(saw_target);

  CHECK_THROWS_AS(write_array((d.path / "no_such_dir" / "x.npy").string(), t), ValidationError);
}
