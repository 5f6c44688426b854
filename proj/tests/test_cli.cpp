#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "minkvox/analytic.hpp"
#include "minkvox/minkowski.hpp"
#include "minkvox/report.hpp"
#include "minkvox/volume_io.hpp"

using namespace minkvox;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int rc;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "minkvox");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("minkvox_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

SymTensor3 tensor_of(const json& m) {
  return SymTensor3(m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2]);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("generate ball") {
  TempDir tmp;
  const Outcome o = invoke({"generate", "--shape", "ball", "--out", tmp / "ball", "--dims", "24", "--diameter", "16",
                         "--center", "12.3,12.1,12.2", "--depth", "4"});
  REQUIRE(o.rc == 0);
  const json j = o.doc();
  CHECK(j["dtype"] == to_string(lossless_sample_type(load_volume(tmp / "ball"))));
  CHECK(j["depth"] == 4);
  // (4/3) pi 8^3 / 24^3
  CHECK(j["volume_fraction"].get<double>() == doctest::Approx(0.1551).epsilon(0.005));
  CHECK(j["reference"]["qnt"][1][1].get<double>() == doctest::Approx(1.0 / 3));
  CHECK(fs::exists(tmp / "ball.json"));
  CHECK(fs::file_size(tmp / "ball.raw") == 24 * 24 * 24 * sample_bytes(sample_type_from_name(j["dtype"])));
}

TEST_CASE("generate laminate") {
  TempDir tmp;
  const Outcome o = invoke({"generate", "--shape", "laminate", "--out", tmp / "lam", "--dims", "8,8,16", "--axis-index",
                         "2", "--slabs", "4:12"});
  REQUIRE(o.rc == 0);
  CHECK(o.doc()["volume_fraction"] == 0.5);
  CHECK(o.doc()["reference"]["surface"] == 128.0);

  const Outcome a = invoke({"analyze", tmp / "lam", "--kernel", "none"});
  REQUIRE(a.rc == 0);
  CHECK(std::abs(a.doc()["surface"].get<double>() - 128.0) <= 1e-12 * 128.0);
  CHECK(tensor_error(tensor_of(a.doc()["qnt"]), SymTensor3::diag(0, 0, 1)) <= 1e-12);
}

TEST_CASE("analyze matches the library and is byte-stable") {
  TempDir tmp;
  REQUIRE(invoke({"generate", "--shape", "ball", "--out", tmp / "b", "--dims", "16", "--diameter", "9", "--center",
               "8.2,7.9,8.4", "--depth", "2"})
              .rc == 0);
  const Outcome a = invoke({"analyze", tmp / "b.json", "--kernel", "gaussian", "--sigma", "1.5"});
  REQUIRE(a.rc == 0);
  const MinkowskiSummary s = analyze(load_volume(tmp / "b"), {Kernel::gaussian(1.5), Scheme::Central, 1e-12});
  CHECK(a.doc() == to_json(s));
  CHECK(invoke({"analyze", tmp / "b.json", "--kernel", "gaussian", "--sigma", "1.5"}).out == a.out);

  const Outcome c = invoke({"analyze", tmp / "b", "--format", "csv", "--kernel", "gaussian", "--sigma", "1.5"});
  CHECK(c.out == summary_csv_header() + "\n" + summary_csv_row(s) + "\n");

  REQUIRE(invoke({"analyze", tmp / "b", "--out", tmp / "report.json"}).rc == 0);
  std::ifstream in(tmp / "report.json");
  CHECK(json::parse(in) == to_json(analyze(load_volume(tmp / "b"), {Kernel::ball(1.2)})));
}

TEST_CASE("cylinder QNT from the command line") {
  TempDir tmp;
  const Outcome g = invoke({"generate", "--shape", "cylinder", "--out", tmp / "cyl", "--dims", "128,24,24",
                         "--diameter", "12", "--length", "120", "--depth", "3"});
  REQUIRE(g.rc == 0);
  const Outcome a = invoke({"analyze", tmp / "cyl", "--kernel", "ball", "--sigma", "1.2"});
  REQUIRE(a.rc == 0);
  const SymTensor3 exact = fiber_qnt({Vec3::UnitX(), 120.0, 12.0});
  CHECK(tensor_error(tensor_of(a.doc()["qnt"]), exact) <= 0.03);
  CHECK(tensor_of(g.doc()["reference"]["qnt"]) == exact);
}

TEST_CASE("empty image is reported as degenerate with exit code 0") {
  TempDir tmp;
  store_volume(VoxelGrid::filled(Geometry(Dims{16, 16, 16}, 1.0), 0.0, Depth::levels(1)), tmp / "empty");
  const Outcome a = invoke({"analyze", tmp / "empty"});
  CHECK(a.rc == 0);
  CHECK(a.doc()["degenerate"] == true);
  CHECK(a.doc()["qnt"].is_null());
  CHECK(a.err.find("warning") != std::string::npos);

  const Outcome f = invoke({"fiber-orient", tmp / "empty", "--mu", "2"});
  CHECK(f.rc == 0);
  CHECK(f.doc()["A"].is_null());
  CHECK(f.doc()["degenerate"] == true);
}

TEST_CASE("two well separated balls have twice the surface of one") {
  TempDir tmp;
  const Ball one{Vec3(10.3, 10.1, 10.2), 4.0};
  Ball two = one;
  two.center.x() += 20.0;
  const Dims d{40, 20, 20};
  store_volume(voxelize(Shape{one}, d, 1.0, 3), tmp / "one");
  store_volume(voxelize(Shape{Union{{Shape{one}, Shape{two}}}}, d, 1.0, 3), tmp / "two");
  const json a = invoke({"analyze", tmp / "one"}).doc();
  const json b = invoke({"analyze", tmp / "two"}).doc();
  CHECK(std::abs(b["surface"].get<double>() - 2 * a["surface"].get<double>()) <=
        1e-10 * a["surface"].get<double>());
  CHECK(tensor_error(tensor_of(b["W"]), tensor_of(a["W"]) * 2.0) <= 1e-10);
  CHECK(b["volume"].get<double>() == doctest::Approx(2 * a["volume"].get<double>()).epsilon(1e-14));
}

TEST_CASE("convergence subcommand") {
  const Outcome o = invoke({"convergence", "--resolutions", "4,8,16", "--depths", "1,3", "--kernels", "none,ball:1.2",
                         "--no-timing"});
  REQUIRE(o.rc == 0);
  const auto rows = csv_rows(o.out);
  REQUIRE(rows.size() == 12);
  std::map<std::string, double> e_bar, e;
  for (const auto& r : rows) {
    CHECK(r.back() == "0");
    const std::string key = r[0] + "/" + r[1] + "/" + r[2];
    e[key] = std::stod(r[7]);
    e_bar[key] = std::stod(r[8]);
  }
  CHECK(e_bar["8/3/none"] < e_bar["4/3/none"]);
  CHECK(e_bar["16/3/none"] < e_bar["8/3/none"]);
  CHECK(e["16/3/ball"] <= 0.06);
  // binary images: the surface estimate stalls well away from 4 pi R^2
  for (const auto& r : rows)
    if (r[1] == "1" && r[2] == "none") CHECK(std::abs(std::stod(r[6]) / std::stod(r[10]) - 1.0) > 0.05);
  CHECK(invoke({"convergence", "--resolutions", "4,8,16", "--depths", "1,3", "--kernels", "none,ball:1.2",
             "--no-timing"})
            .out == o.out);
}

TEST_CASE("fiber-orient on a unidirectional array") {
  TempDir tmp;
  REQUIRE(invoke({"generate", "--shape", "parallel-fibers", "--out", tmp / "uni", "--dims", "56,60,48",
               "--axis-index", "0", "--length", "48", "--diameter", "8", "--rows", "5", "--cols", "4", "--depth",
               "2"})
              .rc == 0);
  const Outcome o = invoke({"fiber-orient", tmp / "uni", "--mu", "6", "--reference", "1,0,0,0,0,0"});
  REQUIRE(o.rc == 0);
  const json j = o.doc();
  CHECK(j["E_A"].get<double>() <= 0.09);
  CHECK(j["degenerate"] == false);

  const VoxelGrid img = load_volume(tmp / "uni");
  store_volume(shift(img, {7, -3, 11}), tmp / "moved");
  const json m = invoke({"fiber-orient", tmp / "moved", "--mu", "6", "--reference", "1,0,0,0,0,0"}).doc();
  CHECK((tensor_of(m["A"]) - tensor_of(j["A"])).frobenius() <= 1e-10);
  CHECK(m["masked_voxels"] == j["masked_voxels"]);
}

TEST_CASE("exit codes") {
  TempDir tmp;
  CHECK(invoke({}).rc == cli::kUsage);
  CHECK(invoke({"frobnicate"}).rc == cli::kUsage);
  CHECK(invoke({"generate", "--shape", "ball"}).rc == cli::kUsage);
  CHECK(invoke({"generate", "--shape", "torus", "--out", tmp / "t"}).rc == cli::kUsage);
  CHECK(invoke({"analyze", tmp / "missing"}).rc == cli::kIo);

  store_volume(VoxelGrid::filled(Geometry(Dims{4, 4, 4}, 1.0), 1.0, Depth::levels(1)), tmp / "v");
  CHECK(invoke({"analyze", tmp / "v", "--kernel", "box"}).rc == cli::kUsage);
  CHECK(invoke({"analyze", tmp / "v", "--sigma", "3"}).rc == cli::kUsage);  // support reaches n/2
  CHECK(invoke({"fiber-orient", tmp / "v"}).rc == cli::kUsage);
  fs::resize_file(tmp / "v.raw", 63);
  const Outcome short_payload = invoke({"analyze", tmp / "v"});
  CHECK(short_payload.rc == cli::kIo);
  CHECK(short_payload.err.find("expected 64") != std::string::npos);
}
