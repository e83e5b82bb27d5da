#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "app.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using meanfield::cli::RunOptions;
using meanfield::cli::run;

namespace {

struct Workspace {
  fs::path dir;
  explicit Workspace(const std::string& name) : dir(fs::temp_directory_path() / ("meanfield_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string write(const std::string& file, const std::string& text) const {
    std::ofstream(dir / file) << text;
    return (dir / file).string();
  }
  std::string read(const std::string& file) const {
    std::ifstream in(dir / file, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  json report() const { return json::parse(read("report.json")); }

  int run_command(const std::string& command, const std::string& config, std::string* diag = nullptr,
                  std::optional<double> h = std::nullopt) const {
    RunOptions opts;
    opts.command = command;
    opts.config_path = write("config.ini", config);
    opts.out_dir = dir.string();
    opts.h = h;
    opts.quiet = true;
    std::ostringstream err;
    const int status = run(opts, err);
    if (diag) *diag = err.str();
    return status;
  }
};

const char* kSquareHarmonic = R"(
[domain]
type = rectangle
lo = 0 0
hi = 1 1

[field]
type = harmonic_poly
name = x2-y2
)";

const char* kDiskTorsion = R"(
[domain]
type = disk
center = 0 0
radius = 1
h = 0.0078125
)";

}  // namespace

TEST_CASE("classify reports a harmonic verdict for x^2 - y^2") {
  Workspace ws("classify");
  REQUIRE(ws.run_command("classify", kSquareHarmonic) == 0);
  const json r = ws.report();
  CHECK(r["tool"] == "meanfield");
  CHECK(r["command"] == "classify");
  const json& f = r["results"]["fields"][0];
  CHECK(f["harmonic"]["verdict"] == "pass");
  CHECK(f["harmonic"]["worst_margin"].get<double>() <= 1e-10);
  CHECK(f["subharmonic"]["verdict"] == "pass");
  CHECK(r["config"]["tolerance"]["value"] == "auto");
  CHECK(r["config"]["quadrature"]["angular"] == 32);
  CHECK(fs::exists(ws.dir / "classify.csv"));
  CHECK(fs::exists(ws.dir / "timing.json"));
}

TEST_CASE("classify distinguishes subharmonic from harmonic") {
  Workspace ws("classify_sub");
  const std::string cfg = R"(
[domain]
type = rectangle
[field.a]
type = radial_power
p = 1
label = r2
[field.b]
type = radial_power
p = 1
affine_scale = -1
label = minus_r2
)";
  REQUIRE(ws.run_command("classify", cfg) == 0);
  const json r = ws.report()["results"]["fields"];
  CHECK(r[0]["field"] == "r2");
  CHECK(r[0]["harmonic"]["verdict"] == "fail");
  CHECK(r[0]["subharmonic"]["verdict"] == "pass");
  CHECK(r[1]["subharmonic"]["verdict"] == "fail");
}

TEST_CASE("torsion on the unit disk") {
  Workspace ws("torsion");
  REQUIRE(ws.run_command("torsion", kDiskTorsion) == 0);
  const json r = ws.report()["results"];
  CHECK(r["c1"].get<double>() >= 0.99);
  CHECK(r["c2"].get<double>() <= 1.01);
  CHECK(r["serrin_deficit"].get<double>() <= 1e-3);
  CHECK(ws.read("torsion_flux.csv").rfind("x,y,nx,ny,q,weight\n", 0) == 0);
  CHECK(fs::exists(ws.dir / "torsion_v.grid"));
}

TEST_CASE("the h flag overrides the config and is echoed") {
  Workspace ws("torsion_h");
  REQUIRE(ws.run_command("torsion", kDiskTorsion, nullptr, 1.0 / 16.0) == 0);
  const json r = ws.report();
  CHECK(r["config"]["domain"]["h"].get<double>() == 1.0 / 16.0);
  CHECK(r["results"]["h"].get<double>() == 1.0 / 16.0);
}

TEST_CASE("powers table") {
  Workspace ws("powers");
  REQUIRE(ws.run_command("powers", "[powers]\np = 1 2 3 4\nn = 2\n") == 0);
  const json rows = ws.report()["results"]["rows"];
  REQUIRE(rows.size() == 8u);
  const double expected[] = {0.70711, 0.75984, 0.79370, 0.81777};
  for (int i = 0; i < 4; ++i) {
    CHECK(rows[2 * i]["kappa_min"].get<double>() == doctest::Approx(expected[i]).epsilon(1e-5));
    CHECK(rows[2 * i]["ball_mean"].get<double>() ==
          doctest::Approx(rows[2 * i]["ball_mean_quadrature"].get<double>()).epsilon(1e-10));
  }
  CHECK(ws.read("powers.csv").rfind("p,n,r,kappa_min,ball_mean,sphere_mean", 0) == 0);
}

TEST_CASE("means, beardon, harnack and blowup commands") {
  Workspace ws("others");
  REQUIRE(ws.run_command("means", std::string(kSquareHarmonic) + "[means]\nkappa = 0.5\n") == 0);
  CHECK(ws.read("means.csv").find("sphere_mean_kappa") != std::string::npos);

  const std::string r2 = "[domain]\ntype = rectangle\n[field]\ntype = radial_power\np = 1\n";
  REQUIRE(ws.run_command("beardon", r2) == 0);
  const json b = ws.report()["results"];
  CHECK(b["fields"][0]["beardon"]["verdict"] == "pass");
  CHECK(b["fields"][0]["threshold"]["kappa"].get<double>() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-5));
  CHECK(ws.report()["config"]["beardon"].contains("center"));

  const std::string harnack = "[domain]\ntype = rectangle\nh = 0.03125\n[field]\ntype = monomial\nexponents = 1 0\n"
                              "affine_shift = 2\n";
  REQUIRE(ws.run_command("harnack", harnack) == 0);
  CHECK(ws.report()["results"]["fields"][0]["holds"] == true);

  REQUIRE(ws.run_command("blowup", "[domain]\ntype = interval\n[blowup]\nks = 3 10\n") == 0);
  const json rows = ws.report()["results"]["rows"];
  CHECK(rows[0]["volume_mean"].get<double>() == doctest::Approx(13.0 / 9.0));
  CHECK(rows[1]["surface_mean"].get<double>() == doctest::Approx(10.0));
  CHECK(ws.report()["config"]["blowup"]["deltas"] == "k^-2");
}

TEST_CASE("reports are byte-identical across runs") {
  Workspace ws("determinism");
  REQUIRE(ws.run_command("classify", kSquareHarmonic) == 0);
  const std::string first = ws.read("report.json");
  const std::string csv = ws.read("classify.csv");
  REQUIRE(ws.run_command("classify", kSquareHarmonic) == 0);
  CHECK(ws.read("report.json") == first);
  CHECK(ws.read("classify.csv") == csv);
}

TEST_CASE("configuration errors exit with status 2") {
  Workspace ws("config_errors");
  std::string diag;
  CHECK(ws.run_command("classify", "[domain]\ntype = hexagon\n[field]\ntype = exp_cos\n", &diag) == 2);
  CHECK(diag.find("status=2") != std::string::npos);
  CHECK(diag.find("kind=config") != std::string::npos);
  CHECK(ws.run_command("classify", std::string(kSquareHarmonic) + "colour = blue\n", &diag) == 2);
  CHECK(diag.find("unknown key") != std::string::npos);
  CHECK(ws.run_command("classify", "[domain]\ntype = rectangle\nlo = 0 zero\n[field]\ntype = exp_cos\n") == 2);
  CHECK(ws.run_command("classify", "[domain]\ntype = rectangle\n") == 2);
  CHECK(ws.run_command("torsion", kDiskTorsion, &diag, 10.0) == 2);
  CHECK(diag.find("h too large") != std::string::npos);
  CHECK(ws.run_command("frobnicate", kDiskTorsion) == 2);
  CHECK_FALSE(fs::exists(ws.dir / "report.json"));

  RunOptions missing;
  missing.command = "classify";
  missing.config_path = (ws.dir / "absent.ini").string();
  missing.out_dir = ws.dir.string();
  std::ostringstream err;
  CHECK(run(missing, err) == 2);
}

TEST_CASE("numerical failures exit with status 3 and write nothing") {
  Workspace ws("numerical");
  std::string diag;
  CHECK(ws.run_command("torsion", std::string(kDiskTorsion) + "[torsion]\nmax_iterations = 1\n", &diag) == 3);
  CHECK(diag.find("kind=numerical") != std::string::npos);
  CHECK_FALSE(fs::exists(ws.dir / "report.json"));

  const std::string pole_inside = "[domain]\ntype = rectangle\n[field]\ntype = fundamental_shift\npole = 0.5 0.5\n";
  CHECK(ws.run_command("classify", pole_inside) == 3);
}

TEST_CASE("argument parsing") {
  Workspace ws("argv");
  const std::string cfg = ws.write("c.ini", "[powers]\np = 1\n");
  const std::string out = ws.dir.string();
  auto call = [](std::vector<std::string> args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return meanfield::cli::main_entry(static_cast<int>(argv.size()), argv.data());
  };
  CHECK(call({"meanfield", "powers", "--config", cfg, "--out", out, "--quiet"}) == 0);
  CHECK(fs::exists(ws.dir / "powers.csv"));
  CHECK(call({"meanfield", "powers"}) == 2);
  CHECK(call({"meanfield", "nonsense", "--config", cfg}) == 2);
  CHECK(call({"meanfield", "torsion", "--config", cfg, "--h", "-1"}) == 2);
  CHECK(call({"meanfield", "--version"}) == 0);
}
