#include "app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "meanfield/classify.hpp"
#include "meanfield/constructions.hpp"
#include "meanfield/fields.hpp"
#include "meanfield/geometry.hpp"
#include "meanfield/means.hpp"
#include "meanfield/torsion.hpp"

namespace meanfield::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const std::vector<std::string> kCommands{"means", "classify", "beardon", "torsion", "harnack", "blowup", "powers"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json point_json(const Point& p) {
  json a = json::array();
  for (int i = 0; i < p.dim(); ++i) a.push_back(p[i]);
  return a;
}

json ball_json(const BallSpec& b) { return json{{"center", point_json(b.center)}, {"radius", b.radius}}; }

Point to_point(const std::vector<double>& v, const std::string& what) {
  if (v.empty() || v.size() > static_cast<std::size_t>(kMaxDim)) {
    throw ConfigError(what + " must have 1 to 3 coordinates");
  }
  Point p = Point::zeros(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<int>(i)] = v[i];
  return p;
}

std::string coordinate_header(int n) {
  static const char* names[] = {"x", "y", "z"};
  std::string s;
  for (int a = 0; a < n; ++a) s += std::string(a ? "," : "") + names[a];
  return s;
}

std::string coordinates(const Point& p) {
  std::string s;
  for (int a = 0; a < p.dim(); ++a) s += (a ? "," : "") + num(p[a]);
  return s;
}

struct NamedField {
  std::string label;
  ScalarField field;
};

/// Files produced by a command, written only after it succeeds.
using Outputs = std::map<std::string, std::string>;

class Runner {
 public:
  Runner(Config& cfg, Outputs& out) : cfg_(cfg), out_(out) {}

  json execute(const std::string& command) {
    if (command == "powers") return powers();
    if (command == "blowup") return blowup();
    read_domain();
    if (command == "torsion") return torsion();
    read_quadrature();
    read_fields();
    if (command == "harnack") return harnack();
    read_sampler();
    if (command == "means") return means();
    if (command == "classify") return classify();
    return beardon();
  }

 private:
  void read_domain() {
    const std::string type = cfg_.get_string("domain", "type");
    try {
      if (type == "interval") {
        const double a = cfg_.get_double("domain", "a", 0.0);
        domain_ = DomainSpec::interval(a, cfg_.get_double("domain", "b", 1.0));
      } else if (type == "rectangle") {
        const Point lo = to_point(cfg_.get_doubles("domain", "lo", {{0.0, 0.0}}), "domain lo");
        const Point hi = to_point(cfg_.get_doubles("domain", "hi", {{1.0, 1.0}}), "domain hi");
        domain_ = DomainSpec::rectangle(lo, hi);
      } else if (type == "disk") {
        const Point center = to_point(cfg_.get_doubles("domain", "center", {{0.0, 0.0}}), "domain center");
        domain_ = DomainSpec::disk(center, cfg_.get_double("domain", "radius", 1.0));
      } else if (type == "annulus") {
        const Point center = to_point(cfg_.get_doubles("domain", "center", {{0.0, 0.0}}), "domain center");
        const double r_in = cfg_.get_double("domain", "r_in", 0.5);
        domain_ = DomainSpec::annulus(center, r_in, cfg_.get_double("domain", "r_out", 1.0));
      } else if (type == "sdf_grid") {
        domain_ = DomainSpec::sdf_grid(read_grid_file(cfg_.get_string("domain", "path")));
      } else {
        throw ConfigError("unknown domain type '" + type + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid domain: ") + e.what());
    }
    h_ = cfg_.get_double("domain", "h", 1.0 / 64.0);
    if (!(h_ > 0.0)) throw ConfigError("[domain] h must be positive");
  }

  void read_quadrature() {
    quad_.angular = cfg_.get_int("quadrature", "angular", 32);
    quad_.radial = cfg_.get_int("quadrature", "radial", 16);
    try {
      quad_.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  void read_sampler() {
    sampler_.spacing = cfg_.get_double("sampler", "spacing", sampler_.spacing);
    sampler_.r_max = cfg_.get_double("sampler", "r_max", sampler_.r_max);
    sampler_.ratio = cfg_.get_double("sampler", "ratio", sampler_.ratio);
    sampler_.levels = cfg_.get_int("sampler", "levels", sampler_.levels);
    sampler_.r_min = cfg_.get_double("sampler", "r_min", sampler_.r_min);
    try {
      sampler_.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  ScalarField read_field(const std::string& s, int n) {
    const std::string type = cfg_.get_string(s, "type");
    auto point_or_origin = [&](const std::string& key) {
      return to_point(cfg_.get_doubles(s, key, std::vector<double>(static_cast<std::size_t>(n), 0.0)), s + " " + key);
    };
    try {
      ScalarField f = [&] {
        if (type == "constant") return constant(n, cfg_.get_double(s, "value"));
        if (type == "monomial") {
          const auto e = cfg_.get_ints(s, "exponents");
          return monomial(std::vector<int>(e.begin(), e.end()));
        }
        if (type == "harmonic_poly") return harmonic_poly(n, cfg_.get_string(s, "name"));
        if (type == "exp_cos") return exp_cos(n);
        if (type == "radial_power") {
          const Point center = point_or_origin("center");
          return radial_power(center, cfg_.get_int(s, "p"));
        }
        if (type == "fundamental_shift") {
          const Point pole = point_or_origin("pole");
          const double scale = cfg_.get_double(s, "scale", 1.0);
          const double amplitude = cfg_.get_double(s, "amplitude", 1.0);
          return fundamental_shift(pole, scale, amplitude, cfg_.get_double(s, "offset", 0.0));
        }
        if (type == "one_d_tent") return one_d_tent(cfg_.get_int(s, "k"));
        if (type == "grid") return load_grid_field(cfg_.get_string(s, "path"));
        throw ConfigError("unknown field type '" + type + "' in [" + s + "]");
      }();
      if (cfg_.has(s, "affine_shift") || cfg_.has(s, "affine_scale")) {
        const double shift = cfg_.get_double(s, "affine_shift", 0.0);
        f = affine_transform(f, shift, cfg_.get_double(s, "affine_scale", 1.0));
      }
      if (f.dim() != n) throw ConfigError("field [" + s + "] has dimension " + std::to_string(f.dim()) +
                                          ", domain has " + std::to_string(n));
      return f;
    } catch (const std::invalid_argument& e) {
      throw ConfigError("invalid field [" + s + "]: " + e.what());
    }
  }

  void read_fields() {
    const auto sections = cfg_.sections_with_prefix("field");
    if (sections.empty()) throw ConfigError("no [field] section");
    for (const auto& s : sections) {
      ScalarField f = read_field(s, domain_.dim());
      fields_.push_back({cfg_.get_string(s, "label", s), f});
    }
  }

  /// The configured tolerance, or the default for this field (1e-8 for smooth
  /// fields, 1e-4 * range over the ball centers otherwise).
  double tolerance_for(const ScalarField& f, const std::vector<BallSpec>& balls) {
    if (fixed_tol_) return *fixed_tol_;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& b : balls) {
      const double v = f(b.center);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return default_tolerance(f, balls.empty() ? 0.0 : hi - lo);
  }

  void read_tolerance() {
    if (cfg_.has("tolerance", "value")) {
      fixed_tol_ = cfg_.get_double("tolerance", "value");
      if (!(*fixed_tol_ >= 0.0)) throw ConfigError("[tolerance] value must be non-negative");
    } else {
      cfg_.record("tolerance", "value", "auto");
    }
  }

  std::vector<BallSpec> balls() {
    auto b = sampler_.balls(domain_);
    if (b.empty()) throw ConfigError("sampler produced no admissible balls for this domain");
    return b;
  }

  json report_json(const ClassificationReport& r) {
    json j{{"test", r.test},
           {"verdict", to_string(r.verdict)},
           {"worst_margin", r.worst_margin},
           {"tolerance", r.tolerance},
           {"balls_tested", r.balls_tested},
           {"witness", ball_json(r.witness)}};
    if (r.kappa) j["kappa"] = *r.kappa;
    return j;
  }

  json means() {
    const std::optional<double> kappa =
        cfg_.has("means", "kappa") ? std::optional<double>(cfg_.get_double("means", "kappa")) : std::nullopt;
    const auto sample = balls();
    const int n = domain_.dim();
    std::string csv = "field," + coordinate_header(n) + ",radius,ball_mean,sphere_mean";
    csv += kappa ? ",sphere_mean_kappa\n" : "\n";
    json results = json::array();
    for (const auto& nf : fields_) {
      const auto pairs = mean_pairs(nf.field, sample, quad_, kappa);
      double gap = 0.0;
      for (const auto& m : pairs) {
        csv += nf.label + "," + coordinates(m.ball.center) + "," + num(m.ball.radius) + "," + num(m.ball_mean) + "," +
               num(m.sphere_mean);
        csv += m.sphere_mean_at_kappa ? "," + num(*m.sphere_mean_at_kappa) + "\n" : "\n";
        gap = std::max(gap, std::abs(m.ball_mean - m.sphere_mean));
      }
      results.push_back({{"field", nf.label}, {"describe", nf.field.describe()}, {"balls", pairs.size()},
                         {"max_abs_ball_minus_sphere", gap}});
    }
    out_["means.csv"] = csv;
    return json{{"fields", results}, {"files", {"means.csv"}}};
  }

  json classify() {
    read_tolerance();
    const auto sample = balls();
    std::string csv = "field,test,verdict,worst_margin,tolerance,balls_tested," + coordinate_header(domain_.dim()) +
                      ",witness_radius\n";
    json results = json::array();
    for (const auto& nf : fields_) {
      const double tol = tolerance_for(nf.field, sample);
      const auto harmonic = test_harmonic(nf.field, domain_, sampler_, quad_, tol);
      const auto sub = test_subharmonic(nf.field, domain_, sampler_, quad_, tol);
      for (const auto* r : {&harmonic, &sub}) {
        csv += nf.label + "," + r->test + "," + to_string(r->verdict) + "," + num(r->worst_margin) + "," +
               num(r->tolerance) + "," + std::to_string(r->balls_tested) + "," + coordinates(r->witness.center) +
               "," + num(r->witness.radius) + "\n";
      }
      results.push_back({{"field", nf.label},
                         {"describe", nf.field.describe()},
                         {"harmonic", report_json(harmonic)},
                         {"subharmonic", report_json(sub)}});
    }
    out_["classify.csv"] = csv;
    return json{{"fields", results}, {"files", {"classify.csv"}}};
  }

  json beardon() {
    read_tolerance();
    const int n = domain_.dim();
    const double kappa = cfg_.get_double("beardon", "kappa", kappa_beardon(n));
    const double tol_kappa = cfg_.get_double("beardon", "tol_kappa", 1e-6);
    const auto sample = balls();
    BallSpec threshold_ball = sample.front();
    for (const auto& b : sample) {
      if (b.radius > threshold_ball.radius) threshold_ball = b;
    }
    if (cfg_.has("beardon", "center") || cfg_.has("beardon", "radius")) {
      try {
        const Point center = to_point(cfg_.get_doubles("beardon", "center"), "beardon center");
        threshold_ball = BallSpec(center, cfg_.get_double("beardon", "radius"));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid [beardon] ball: ") + e.what());
      }
    } else {
      cfg_.record("beardon", "center", point_json(threshold_ball.center));
      cfg_.record("beardon", "radius", threshold_ball.radius);
    }
    if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("[beardon] kappa must lie in (0, 1)");

    std::string csv = "field,kappa,verdict,worst_margin,tolerance,threshold_kappa,threshold_degenerate\n";
    json results = json::array();
    for (const auto& nf : fields_) {
      const double tol = tolerance_for(nf.field, sample);
      const auto r = test_beardon(nf.field, domain_, sampler_, quad_, kappa, tol);
      const auto t = beardon_threshold(nf.field, threshold_ball, quad_, tol_kappa);
      csv += nf.label + "," + num(kappa) + "," + to_string(r.verdict) + "," + num(r.worst_margin) + "," +
             num(r.tolerance) + "," + num(t.kappa) + "," + (t.degenerate ? "true" : "false") + "\n";
      results.push_back({{"field", nf.label},
                         {"describe", nf.field.describe()},
                         {"beardon", report_json(r)},
                         {"threshold", {{"ball", ball_json(threshold_ball)}, {"kappa", t.kappa},
                                        {"degenerate", t.degenerate}}}});
    }
    out_["beardon.csv"] = csv;
    return json{{"kappa_beardon", kappa_beardon(n)},
                {"kappa_one", kappa_one(n)},
                {"factor_kappa", factor_kappa(n, kappa)},
                {"fields", results},
                {"files", {"beardon.csv"}}};
  }

  TorsionSolution solve() {
    SolverOptions opts;
    opts.tol = cfg_.get_double("torsion", "tol", 1e-10);
    opts.max_iterations = cfg_.get_int("torsion", "max_iterations", 0);
    const DiscretizedDomain d = [&] {
      try {
        return discretize(domain_, h_);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }();
    return solve_torsion(d, opts);
  }

  json torsion() {
    const TorsionSolution sol = solve();
    const HarnackConstants c = harnack_constants(sol);
    const double deficit = serrin_deficit(sol);
    std::ostringstream grid;
    write_solution_grid(grid, sol);
    std::ostringstream flux;
    write_flux_csv(flux, sol);
    out_["torsion_v.grid"] = grid.str();
    out_["torsion_flux.csv"] = flux.str();
    return json{{"h", h_},
                {"interior_nodes", sol.domain.interior_count()},
                {"boundary_samples", sol.flux.size()},
                {"iterations", sol.iterations},
                {"residual", sol.residual},
                {"volume", sol.domain.volume()},
                {"surface", sol.domain.surface()},
                {"c1", c.c1},
                {"c2", c.c2},
                {"c1_minus_1", std::abs(c.c1 - 1.0)},
                {"c2_minus_1", std::abs(c.c2 - 1.0)},
                {"argmin", point_json(c.argmin)},
                {"argmax", point_json(c.argmax)},
                {"kernel_mean", c.kernel_mean},
                {"first_order_points", c.first_order_points},
                {"serrin_deficit", deficit},
                {"files", {"torsion_v.grid", "torsion_flux.csv"}}};
  }

  json harnack() {
    const TorsionSolution sol = solve();
    const HarnackConstants c = harnack_constants(sol);
    std::string csv = "field,volume_mean,surface_mean,lower,upper,slack,holds\n";
    json results = json::array();
    for (const auto& nf : fields_) {
      const HarnackCheck h = harnack_verify(sol, c, nf.field);
      csv += nf.label + "," + num(h.volume_mean) + "," + num(h.surface_mean) + "," + num(h.lower) + "," +
             num(h.upper) + "," + num(h.slack) + "," + (h.holds ? "true" : "false") + "\n";
      results.push_back({{"field", nf.label},
                         {"describe", nf.field.describe()},
                         {"volume_mean", h.volume_mean},
                         {"surface_mean", h.surface_mean},
                         {"lower", h.lower},
                         {"upper", h.upper},
                         {"slack", h.slack},
                         {"holds", h.holds}});
    }
    out_["harnack.csv"] = csv;
    return json{{"h", h_}, {"c1", c.c1}, {"c2", c.c2}, {"fields", results}, {"files", {"harnack.csv"}}};
  }

  json blowup() {
    read_domain();
    const auto ks = cfg_.get_ints("blowup", "ks", {{10, 20, 40}});
    BlowupOptions opts;
    opts.max_anchors = static_cast<std::size_t>(cfg_.get_int("blowup", "max_anchors", 1 << 21));
    DeltaSchedule schedule = default_delta;
    if (cfg_.has("blowup", "deltas")) {
      const auto deltas = cfg_.get_doubles("blowup", "deltas");
      if (deltas.size() != ks.size()) throw ConfigError("[blowup] deltas must match ks in length");
      schedule = [ks, deltas](int k) {
        for (std::size_t i = 0; i < ks.size(); ++i) {
          if (ks[i] == k) return deltas[i];
        }
        return default_delta(k);
      };
    } else {
      cfg_.record("blowup", "deltas", "k^-2");
    }
    for (int k : ks) {
      if (k <= 2) throw ConfigError("[blowup] ks must be integers > 2");
    }
    const BlowupTable table = verify_blowup(domain_, ks, schedule, opts);
    std::ostringstream csv;
    write_blowup_csv(csv, table);
    out_["blowup.csv"] = csv.str();
    json rows = json::array();
    for (const auto& r : table.rows) {
      rows.push_back({{"k", r.k}, {"delta_k", r.delta}, {"surface_mean", r.surface_mean},
                      {"volume_mean", r.volume_mean}, {"anchors", r.anchors}});
    }
    json psi{{"1", "rho"}, {"2", "ln(rho)/(2 pi)"}, {"n>=3", "-rho^(2-n)/((n-2)|S^(n-1)|)"}};
    return json{{"psi_normalization", psi},
                {"interior_threshold_k", blowup_interior_threshold(domain_.dim())},
                {"schedule_bounded", table.schedule_bounded},
                {"rows", rows},
                {"files", {"blowup.csv"}}};
  }

  json powers() {
    read_quadrature();
    const auto ps = cfg_.get_ints("powers", "p", {{1, 2, 3, 4}});
    const int n = cfg_.get_int("powers", "n", 2);
    const auto radii = cfg_.get_doubles("powers", "radii", {{0.5, 1.0}});
    for (int p : ps) {
      if (p < 1) throw ConfigError("[powers] p values must be >= 1");
    }
    if (n < 1 || n > kMaxDim) throw ConfigError("[powers] n must be 1, 2 or 3");
    for (double r : radii) {
      if (!(r > 0.0)) throw ConfigError("[powers] radii must be positive");
    }
    std::string csv = "p,n,r,kappa_min,ball_mean,sphere_mean,ball_mean_quadrature,sphere_mean_quadrature\n";
    json rows = json::array();
    for (int p : ps) {
      const PowerFamily fam = power_family(p, n);
      for (double r : radii) {
        const BallSpec ball(Point::zeros(n), r);
        const double bq = ball_average(fam.field, ball, quad_);
        const double sq = sphere_average(fam.field, ball, quad_);
        csv += std::to_string(p) + "," + std::to_string(n) + "," + num(r) + "," + num(fam.kappa_min()) + "," +
               num(fam.ball_mean(r)) + "," + num(fam.sphere_mean(r)) + "," + num(bq) + "," + num(sq) + "\n";
        rows.push_back({{"p", p}, {"n", n}, {"r", r}, {"kappa_min", fam.kappa_min()},
                        {"ball_mean", fam.ball_mean(r)}, {"sphere_mean", fam.sphere_mean(r)},
                        {"ball_mean_quadrature", bq}, {"sphere_mean_quadrature", sq}});
      }
    }
    out_["powers.csv"] = csv;
    return json{{"rows", rows}, {"files", {"powers.csv"}}};
  }

  Config& cfg_;
  Outputs& out_;
  DomainSpec domain_ = DomainSpec::interval(0.0, 1.0);
  double h_ = 0.0;
  QuadratureSpec quad_;
  BallSampler sampler_;
  std::vector<NamedField> fields_;
  std::optional<double> fixed_tol_;
};

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string quoted(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += (c == '\n' ? ' ' : c);
  }
  return q + "\"";
}

int fail(std::ostream& diag, int status, const char* kind, const std::string& reason) {
  diag << "meanfield: error status=" << status << " kind=" << kind << " reason=" << quoted(reason) << '\n';
  return status;
}

}  // namespace

int run(const RunOptions& options, std::ostream& diag) {
  const auto start = std::chrono::steady_clock::now();
  if (std::find(kCommands.begin(), kCommands.end(), options.command) == kCommands.end()) {
    return fail(diag, kConfigError, "config", "unknown command '" + options.command + "'");
  }
  Outputs outputs;
  json report;
  bool in_setup = true;
  try {
    Config cfg = Config::load(options.config_path);
    if (options.h) cfg.set("domain", "h", num(*options.h));
    Runner runner(cfg, outputs);
    in_setup = false;
    json results = runner.execute(options.command);
    cfg.check_consumed();
    report = json{{"tool", "meanfield"},
                  {"version", kVersion},
                  {"command", options.command},
                  {"config", cfg.effective()},
                  {"results", std::move(results)}};
  } catch (const ConfigError& e) {
    return fail(diag, kConfigError, "config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(diag, in_setup ? kConfigError : kNumericalFailure, in_setup ? "config" : "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(diag, kNumericalFailure, "numerical", e.what());
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    const fs::path dir(options.out_dir);
    fs::create_directories(dir);
    for (const auto& [name, content] : outputs) write_atomic(dir / name, content);
    write_atomic(dir / "report.json", report.dump(2) + "\n");
    write_atomic(dir / "timing.json", json{{"command", options.command}, {"wall_time_s", wall}}.dump(2) + "\n");
  } catch (const std::exception& e) {
    return fail(diag, kNumericalFailure, "io", e.what());
  }
  if (!options.quiet) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", wall);
    diag << "meanfield: ok command=" << options.command << " wall_time_s=" << buf << " out=" << quoted(options.out_dir)
         << '\n';
  }
  return kOk;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Ball and sphere means, subharmonicity tests and torsion-based Harnack constants"};
  app.set_help_flag("--help", "print this help and exit");
  RunOptions options;
  double h = 0.0;
  app.add_option("command", options.command, "means | classify | beardon | torsion | harnack | blowup | powers")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", options.config_path, "INI run configuration")->required();
  app.add_option("--out", options.out_dir, "output directory")->capture_default_str();
  auto* h_opt = app.add_option("--h", h, "grid spacing override for [domain] h")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", options.quiet, "suppress the success line on stderr");
  app.set_version_flag("--version", kVersion);
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(std::cerr, kConfigError, "usage", e.what());
  }
  if (h_opt->count() > 0) options.h = h;
  return run(options, std::cerr);
}

}  // namespace meanfield::cli
