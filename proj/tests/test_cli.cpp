#include <sys/wait.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "radonkit/npy.hpp"
#include "radonkit/tensor.hpp"

using namespace radonkit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / fs::path("radonkit_cli_" + std::to_string(uintptr_t(this)));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// run the CLI in-process, capturing stdout
struct CliResult {
  int code;
  std::string out;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream captured;
  std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
  int code = cli::run(args);
  std::cout.rdbuf(old);
  return {code, captured.str()};
}

std::vector<unsigned char> file_bytes(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return std::vector<unsigned char>((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

// the installed binary, for subprocess-level checks
int run_binary(const std::string& args, const std::string& stdout_file) {
  std::string cmd = std::string("\"") + RADONKIT_CLI_PATH + "\" " + args + " > \"" + stdout_file + "\" 2>/dev/null";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json bench_json(const TempDir& d, const std::string& tag, const std::string& flags) {
  std::string out = d.file("bench_" + tag + ".json");
  REQUIRE(run_binary("--json bench --size 64 --runs 5 --warmup 1 " + flags, out) == 0);
  std::ifstream f(out);
  return json::parse(f);
}

}  // namespace

TEST_CASE("cli version flag succeeds") {
  CliResult r = run_cli({"--version"});
  CHECK(r.code == 0);
  CHECK(r.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("cli phantom project fbp pipeline") {
  TempDir d;
  REQUIRE(run_cli({"phantom", "--size", "64", "-o", d.file("ph.npy"), "--precision", "double"}).code == 0);
  Tensor ph = read_array(d.file("ph.npy"));
  REQUIRE(ph.shape() == Shape{64, 64});
  CHECK(ph.precision() == Precision::Double);

  REQUIRE(run_cli({"project", "--in", d.file("ph.npy"), "-o", d.file("sino.npy")}).code == 0);
  Tensor sino = read_array(d.file("sino.npy"));
  REQUIRE(sino.shape() == Shape{64, 64});  // angles and detectors default to the image size

  CliResult r = run_cli({"--json", "fbp", "--size", "64", "--in", d.file("sino.npy"), "-o", d.file("rec.npy"),
                         "--reference", d.file("ph.npy")});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["command"] == "fbp");
  CHECK(j["geometry"]["kind"] == "parallel");
  CHECK(j["geometry"]["n_angles"] == 64);
  // measured 6.64e-3
  CHECK(j["mse_vs_reference"].get<double>() < 1e-2);
  CHECK(j["mse_vs_reference"].get<double>() > 0.0);

  SUBCASE("fbp equals filter piped into backproject") {
    REQUIRE(run_cli({"filter", "--in", d.file("sino.npy"), "-o", d.file("filt.npy")}).code == 0);
    REQUIRE(run_cli({"backproject", "--size", "64", "--in", d.file("filt.npy"), "-o", d.file("rec2.npy")}).code == 0);
    Tensor a = read_array(d.file("rec.npy"));
    Tensor b = read_array(d.file("rec2.npy"));
    CHECK(a.bit_equal(b));
  }
}

TEST_CASE("cli solve methods reconstruct and report") {
  TempDir d;
  REQUIRE(run_cli({"phantom", "--size", "32", "-o", d.file("ph.npy")}).code == 0);
  REQUIRE(run_cli({"project", "--in", d.file("ph.npy"), "-o", d.file("sino.npy"), "--angles", "45"}).code == 0);

  auto solve = [&](const std::string& method, const std::string& out) {
    return run_cli({"--json", "solve", "--method", method, "--iterations", "30", "--size", "32", "--angles", "45",
                    "--in", d.file("sino.npy"), "-o", d.file(out), "--reference", d.file("ph.npy")});
  };

  CliResult lw = solve("landweber", "lw.npy");
  REQUIRE(lw.code == 0);
  json jl = json::parse(lw.out);
  CHECK(jl["method"] == "landweber");
  CHECK(jl["alpha"].get<double>() > 0.0);
  // measured 8.9e-3
  CHECK(jl["mse_vs_reference"].get<double>() < 2e-2);

  CliResult cgr = solve("cg", "cg.npy");
  REQUIRE(cgr.code == 0);
  // measured 4.1e-3
  CHECK(json::parse(cgr.out)["mse_vs_reference"].get<double>() < 1e-2);

  CliResult ne = solve("cgne", "cgne.npy");
  REQUIRE(ne.code == 0);
  CHECK(json::parse(ne.out)["mse_vs_reference"].get<double>() < 1e-2);

  // cg solves the normal equations, which is exactly what cgne runs
  CHECK(read_array(d.file("cg.npy")).bit_equal(read_array(d.file("cgne.npy"))));
}

TEST_CASE("cli admm reconstructs a limited-angle sinogram") {
  TempDir d;
  REQUIRE(run_cli({"phantom", "--size", "16", "-o", d.file("ph.npy")}).code == 0);
  REQUIRE(run_cli({"project", "--in", d.file("ph.npy"), "-o", d.file("sino.npy"), "--angles", "16", "--angle-start",
                   "-50", "--angle-range", "100"})
              .code == 0);
  CliResult r = run_cli({"--json", "admm", "--size", "16", "--n-angles", "16", "--angles-range", "100", "--outer",
                         "2", "--inner", "10", "--scales", "2", "--in", d.file("sino.npy"), "-o", d.file("rec.npy"),
                         "--reference", d.file("ph.npy"), "--cache-dir", d.file("cache")});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["command"] == "admm");
  CHECK(j["objective"].get<double>() > 0.0);
  // measured 2.9e-2 after two outer iterations
  CHECK(j["mse_vs_reference"].get<double>() < 0.1);
  CHECK(read_array(d.file("rec.npy")).shape() == Shape{16, 16});
  CHECK(fs::exists(d.file("cache")));
}

TEST_CASE("cli check-adjoint reports the defect and honors the tolerance") {
  TempDir d;
  // measured defect 4.8e-3 for the 32-pixel projector
  CHECK(run_cli({"check-adjoint", "--size", "32", "--trials", "5", "--tolerance", "2e-2"}).code == 0);
  CHECK(run_cli({"check-adjoint", "--size", "32", "--trials", "5", "--tolerance", "1e-9"}).code == 2);
  CHECK(run_cli({"check-adjoint", "--operator", "shearlet", "--size", "32", "--scales", "3", "--tolerance", "1e-4"})
            .code == 0);

  CliResult r = run_cli({"--json", "check-adjoint", "--size", "32", "--trials", "5"});
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["operator"] == "projector");
  CHECK(j["trials"] == 5);
  CHECK(j["defect"].get<double>() > 0.0);
  CHECK(j["defect"].get<double>() < 2e-2);
}

TEST_CASE("cli shearlet analysis and synthesis roundtrip through files") {
  TempDir d;
  REQUIRE(run_cli({"phantom", "--size", "32", "-o", d.file("ph.npy")}).code == 0);
  REQUIRE(run_cli({"shearlet", "--in", d.file("ph.npy"), "-o", d.file("co.npy"), "--scales", "3"}).code == 0);
  Tensor co = read_array(d.file("co.npy"));
  REQUIRE(co.shape() == Shape{27, 32, 32});

  REQUIRE(run_cli({"shearlet", "--inverse", "--in", d.file("co.npy"), "-o", d.file("rec.npy"), "--scales", "3"})
              .code == 0);
  Tensor rec = read_array(d.file("rec.npy"));
  Tensor ph = read_array(d.file("ph.npy"));
  // measured 1.5e-7 in single precision
  CHECK(relative_error(rec, ph) <= 1e-5);

  // synthesis with a mismatched plan is refused
  CHECK(run_cli({"shearlet", "--inverse", "--in", d.file("co.npy"), "-o", d.file("bad.npy"), "--scales", "2"})
            .code == 1);
}

TEST_CASE("cli exit codes distinguish usage, validation, and numerical failures") {
  TempDir d;
  CHECK(run_cli({"--no-such-flag"}).code == 1);
  CHECK(run_cli({"project", "--in", d.file("absent.npy"), "-o", d.file("x.npy")}).code == 1);

  REQUIRE(run_cli({"phantom", "--size", "32", "-o", d.file("ph.npy")}).code == 0);
  REQUIRE(run_cli({"project", "--in", d.file("ph.npy"), "-o", d.file("sino.npy"), "--angles", "45"}).code == 0);

  // fanbeam source inside the image is a validation error
  CHECK(run_cli({"backproject", "--size", "512", "--geometry", "fanbeam", "--source-distance", "300", "--in",
                 d.file("sino.npy"), "-o", d.file("x.npy")})
            .code == 1);

  // an overlong landweber step diverges: numerical failure
  CHECK(run_cli({"solve", "--method", "landweber", "--alpha", "1.0", "--iterations", "60", "--size", "32",
                 "--angles", "45", "--in", d.file("sino.npy"), "-o", d.file("x.npy")})
            .code == 2);
}

TEST_CASE("cli thread cap does not change results") {
  TempDir d;
  REQUIRE(run_cli({"phantom", "--size", "32", "-o", d.file("ph.npy")}).code == 0);
  REQUIRE(run_cli({"--threads", "1", "project", "--in", d.file("ph.npy"), "-o", d.file("s1.npy")}).code == 0);
  REQUIRE(run_cli({"--threads", "3", "project", "--in", d.file("ph.npy"), "-o", d.file("s3.npy")}).code == 0);
  CHECK(file_bytes(d.file("s1.npy")) == file_bytes(d.file("s3.npy")));
}

TEST_CASE("cli half precision flows end to end") {
  TempDir d;
  REQUIRE(run_cli({"phantom", "--size", "32", "-o", d.file("ph16.npy"), "--precision", "half"}).code == 0);
  CHECK(read_array(d.file("ph16.npy")).precision() == Precision::Half);

  REQUIRE(run_cli({"project", "--in", d.file("ph16.npy"), "-o", d.file("s16.npy")}).code == 0);
  CHECK(read_array(d.file("s16.npy")).precision() == Precision::Half);

  // precision conversion on read
  REQUIRE(run_cli({"fbp", "--size", "32", "--in", d.file("s16.npy"), "-o", d.file("rec.npy"), "--precision",
                   "single"})
              .code == 0);
  CHECK(read_array(d.file("rec.npy")).precision() == Precision::Single);
}

TEST_CASE("cli accepts 2-d files and batched 3-d files alike") {
  TempDir d;
  REQUIRE(run_cli({"phantom", "--size", "32", "-o", d.file("ph.npy")}).code == 0);
  REQUIRE(run_cli({"project", "--in", d.file("ph.npy"), "-o", d.file("sino2d.npy"), "--angles", "24"}).code == 0);

  Tensor sino = read_array(d.file("sino2d.npy"));
  Tensor lifted = Tensor::from_vec({1, sino.dim(0), sino.dim(1)}, sino.float_data());
  write_array(d.file("sino3d.npy"), lifted);

  REQUIRE(run_cli({"backproject", "--size", "32", "--in", d.file("sino2d.npy"), "-o", d.file("b2.npy")}).code == 0);
  REQUIRE(run_cli({"backproject", "--size", "32", "--in", d.file("sino3d.npy"), "-o", d.file("b3.npy")}).code == 0);
  CHECK(file_bytes(d.file("b2.npy")) == file_bytes(d.file("b3.npy")));
}

TEST_CASE("cli png-export writes a png") {
  TempDir d;
  REQUIRE(run_cli({"phantom", "--size", "32", "-o", d.file("ph.npy")}).code == 0);
  REQUIRE(run_cli({"png-export", "--in", d.file("ph.npy"), "-o", d.file("ph.png"), "--lo", "0", "--hi", "1"}).code ==
          0);
  std::vector<unsigned char> bytes = file_bytes(d.file("ph.png"));
  REQUIRE(bytes.size() > 8);
  CHECK(bytes[1] == 'P');
  CHECK(bytes[2] == 'N');
  CHECK(bytes[3] == 'G');
}

TEST_CASE("cli bench emits a full report and sane throughput") {
  TempDir d;
  json b1 = bench_json(d, "b1", "--batch 1 --precision single");
  json b8 = bench_json(d, "b8", "--batch 8 --precision single");
  json h8 = bench_json(d, "h8", "--batch 8 --precision half");

  for (const json& j : {b1, b8, h8}) {
    for (const char* key : {"backprojection", "batch", "forward", "geometry", "precision", "runs", "threads",
                            "version", "warmup"})
      REQUIRE(j.contains(key));
    CHECK(j["runs"] == 5);
    CHECK(j["forward"]["runs_ms"].size() == 5);
    CHECK(j["forward"]["images_per_s"].get<double>() > 0.0);
    CHECK(j["backprojection"]["images_per_s"].get<double>() > 0.0);
  }
  CHECK(b8["batch"] == 8);
  CHECK(h8["precision"] == "half");

  // measured ratios sit near 1.0; bound loosely against timer noise
  for (const char* key : {"forward", "backprojection"}) {
    double s1 = b1[key]["images_per_s"].get<double>();
    double s8 = b8[key]["images_per_s"].get<double>();
    double sh = h8[key]["images_per_s"].get<double>();
    CHECK(s8 >= 0.6 * s1);
    CHECK(sh >= 0.6 * s8);
  }
}
