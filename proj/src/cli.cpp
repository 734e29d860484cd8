#include "rkhsdiag/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rkhsdiag/errors.hpp"
#include "rkhsdiag/fiber.hpp"
#include "rkhsdiag/spectral.hpp"

namespace rkhsdiag::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kSchemaVersion = "1";
// Below this a frequency outside Omega counts as carrying no fiber.
constexpr double kOutsideTol = 1e-8;

struct Options {
  std::string model;
  std::string out_path;
  bool json_out = false;
  bool csv_out = false;
  std::uint64_t seed = kDefaultSeed;
  double tol = FiberTolerances{}.dimension;
  double schwarz_tol = FiberTolerances{}.schwarz;
  std::string symbol;
  std::string xi_set;
  std::string y_set;
  std::optional<double> xi_min, xi_max;
  int samples = 5;
};

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  while (pos < s.size() && s[pos] == ' ') ++pos;
  if (s.empty() || pos != s.size() || !std::isfinite(v))
    throw Error(Errc::invalid_param, "not a finite number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// "a,b,c" with ';' between the coordinates of one point; a single coordinate is
// repeated across all `dim` coordinates.
std::vector<Point> parse_points(const std::string& text, std::size_t dim) {
  std::vector<Point> out;
  for (const std::string& item : split(text, ',')) {
    const std::vector<std::string> coords = split(item, ';');
    if (coords.size() != 1 && coords.size() != dim)
      throw Error(Errc::invalid_param, "point '" + item + "' needs 1 or " + std::to_string(dim) +
                                           " coordinates");
    Point p = Point::filled(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) p[i] = parse_double(coords[coords.size() == 1 ? 0 : i]);
    out.push_back(p);
  }
  if (out.empty()) throw Error(Errc::invalid_param, "empty point list");
  return out;
}

std::vector<Frequency> frequency_grid(const KernelModel& m, const Options& o, bool omega_only) {
  const GroupModel& g = m.group();
  const auto dim = static_cast<std::size_t>(g.dimension());
  std::vector<Frequency> grid;
  if (!o.xi_set.empty()) {
    for (const Point& p : parse_points(o.xi_set, dim)) grid.emplace_back(p);
  } else if (o.xi_min || o.xi_max) {
    if (!o.xi_min || !o.xi_max) throw Error(Errc::invalid_param, "--xi-min and --xi-max go together");
    if (o.samples < 1) throw Error(Errc::invalid_param, "--samples must be positive");
    for (int i = 0; i < o.samples; ++i) {
      const double t = o.samples == 1 ? 0.0 : static_cast<double>(i) / (o.samples - 1);
      double x = *o.xi_min + t * (*o.xi_max - *o.xi_min);
      if (g.dual_is_integer()) x = std::round(x);
      const Frequency xi(Point::filled(dim, x));
      if (grid.empty() || !(grid.back() == xi)) grid.push_back(xi);
    }
  } else {
    for (const Frequency& xi : default_xi_grid(m))
      if (!omega_only || m.omega_contains(xi)) grid.push_back(xi);
    return grid;
  }
  for (const Frequency& xi : grid) {
    g.check_frequency(xi);
    if (omega_only && !m.omega_contains(xi))
      throw Error(Errc::frequency_outside_omega,
                  "frequency " + fmt17(xi[0]) + " lies outside Omega of " + m.spec_string());
  }
  return grid;
}

json point_json(const Point& p) {
  if (p.size() == 1) return p[0];
  json a = json::array();
  for (std::size_t i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}
json point_json(const Frequency& f) { return point_json(f.components()); }

std::string point_csv(const Point& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + fmt17(p[i]);
  return s;
}

json params_json(const ModelParams& params) {
  json o = json::object();
  for (const auto& [k, v] : params) o[k] = v;
  return o;
}

json quad_json(const quad::QuadSpec& s) {
  return json{{"abs_tol", s.abs_tol},
              {"rel_tol", s.rel_tol},
              {"max_subdivisions", s.max_subdivisions},
              {"truncation_eps", s.truncation_eps},
              {"circle_nodes", s.circle_nodes},
              {"xi_max", s.xi_max}};
}

json header(const std::string& command, const KernelModel& m, const quad::QuadSpec& spec) {
  return json{{"schema_version", kSchemaVersion},
              {"command", command},
              {"model_id", m.spec_string()},
              {"params", params_json(m.params())},
              {"quad_spec", quad_json(spec)}};
}

// ---------------------------------------------------------------------------
// Verification reports.

struct Assessment {
  bool pass = true;
  double worst = 0.0;
};

Assessment assess(const FiberReport& r, const FiberTolerances& tol) {
  Assessment a;
  if (!r.converged) {
    a.pass = false;
    return a;
  }
  if (r.verdict == Verdict::outside_omega) {
    a.worst = std::max(std::abs(r.numeric_dimension), r.fourier_residual_max);
    a.pass = std::abs(r.numeric_dimension) <= kOutsideTol &&
             r.fourier_residual_max <= tol.fourier;
    return a;
  }
  const double dim_res = std::abs(r.numeric_dimension - r.declared_dimension);
  a.worst = std::max({dim_res, r.normalization_residual, r.fourier_residual_max,
                      r.repro_residual_max});
  if (r.declared_dimension == 1) a.worst = std::max(a.worst, r.schwarz_residual_max);
  const bool by_dim = std::abs(r.numeric_dimension - 1.0) <= tol.dimension;
  const bool by_schwarz = r.schwarz_residual_max <= tol.schwarz;
  const bool by_rank = r.gram_rank == 1;
  const bool agree = by_dim == by_schwarz && by_schwarz == by_rank &&
                     by_rank == (r.verdict == Verdict::commutative);
  a.pass = agree && dim_res <= tol.dimension &&
           r.normalization_residual <= tol.dimension && r.fourier_residual_max <= tol.fourier &&
           r.repro_residual_max <= tol.repro && r.gram_rank == r.declared_dimension;
  return a;
}

json report_json(const FiberReport& r, const Assessment& a) {
  json o{{"xi", point_json(r.xi)},
         {"numeric_dimension", r.numeric_dimension},
         {"declared_dimension", r.declared_dimension},
         {"normalization_residual", r.normalization_residual},
         {"schwarz_residual_max", r.schwarz_residual_max},
         {"repro_residual_max", r.repro_residual_max},
         {"fourier_residual_max", r.fourier_residual_max},
         {"gram_rank", r.gram_rank},
         {"verdict", to_string(r.verdict)},
         {"converged", r.converged},
         {"pass", a.pass}};
  if (!r.error.empty()) o["error"] = r.error;
  return o;
}

struct Emitted {
  std::string text;
  int code = kPass;
};

Emitted run_reports(const KernelModel& m, const std::vector<Frequency>& grid, const Options& o,
                    const std::string& command) {
  const quad::QuadSpec spec = quad::default_spec();
  ReportOptions ro;
  ro.tol.dimension = o.tol;
  ro.tol.schwarz = o.schwarz_tol;
  const std::vector<FiberReport> reports =
      commutativity_report(m, grid, default_yv_grid(m, o.seed), spec, ro);

  bool all_pass = true, all_converged = true, any_inside = false, any_non = false;
  double worst = 0.0;
  json doc = header(command, m, spec);
  doc["seed"] = o.seed;
  doc["tolerances"] = json{{"dimension", ro.tol.dimension},
                           {"schwarz", ro.tol.schwarz},
                           {"fourier", ro.tol.fourier},
                           {"repro", ro.tol.repro}};
  json list = json::array();
  for (const FiberReport& r : reports) {
    const Assessment a = assess(r, ro.tol);
    all_pass = all_pass && a.pass;
    all_converged = all_converged && r.converged;
    worst = std::max(worst, a.worst);
    any_inside = any_inside || r.verdict != Verdict::outside_omega;
    any_non = any_non || r.verdict == Verdict::non_commutative;
    list.push_back(report_json(r, a));
  }
  doc["fiber_reports"] = std::move(list);
  std::string verdict = !all_converged ? "undetermined"
                        : !any_inside  ? to_string(Verdict::outside_omega)
                        : any_non      ? to_string(Verdict::non_commutative)
                                       : to_string(Verdict::commutative);
  doc["summary"] = json{{"all_pass", all_pass}, {"worst_residual", worst}, {"verdict", verdict}};

  Emitted e;
  e.code = !all_converged ? kNumericFailure : all_pass ? kPass : kResidualFailure;
  if (o.csv_out) {
    e.text = "xi,numeric_dimension,declared_dimension,normalization_residual,schwarz_residual_max,"
             "repro_residual_max,fourier_residual_max,gram_rank,verdict,converged\n";
    for (const FiberReport& r : reports)
      e.text += point_csv(r.xi.components()) + "," + fmt17(r.numeric_dimension) + "," +
                std::to_string(r.declared_dimension) + "," + fmt17(r.normalization_residual) +
                "," + fmt17(r.schwarz_residual_max) + "," + fmt17(r.repro_residual_max) + "," +
                fmt17(r.fourier_residual_max) + "," + std::to_string(r.gram_rank) + "," +
                to_string(r.verdict) + "," + (r.converged ? "true" : "false") + "\n";
  } else {
    e.text = doc.dump(2) + "\n";
  }
  return e;
}

// ---------------------------------------------------------------------------
// Commands.

Emitted cmd_list(bool as_json) {
  Emitted e;
  if (as_json) {
    json a = json::array();
    for (const ModelFamily& f : model_families())
      a.push_back(json{{"id", f.id}, {"params", params_json(f.defaults)}, {"description", f.description}});
    e.text = a.dump(2) + "\n";
    return e;
  }
  for (const ModelFamily& f : model_families()) {
    std::string params;
    for (const auto& [k, v] : f.defaults) params += (params.empty() ? "" : ",") + k + "=" + fmt17(v);
    e.text += f.id + (params.empty() ? "" : ":" + params) + "  " + f.description + "\n";
  }
  return e;
}

Emitted cmd_gamma(const Options& o) {
  const ModelPtr m = parse_model_spec(o.model);
  const SymbolSpec psi = parse_symbol(o.symbol);
  const std::vector<Frequency> grid = frequency_grid(*m, o, true);
  const quad::QuadSpec spec = quad::default_spec();
  std::vector<MatrixValue> values;
  for (const Frequency& xi : grid) values.push_back(gamma_matrix(*m, psi, xi, spec));

  Emitted e;
  if (o.json_out) {
    json doc = header("gamma", *m, spec);
    doc["symbol"] = psi.to_string();
    json rows = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const MatrixValue& g = values[i];
      json re = json::array(), im = json::array();
      for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index c = 0; c < g.cols(); ++c) {
          re.push_back(g(r, c).real());
          im.push_back(g(r, c).imag());
        }
      rows.push_back(json{{"xi", point_json(grid[i])}, {"d", g.rows()}, {"re", re}, {"im", im},
                          {"converged", true}});
    }
    doc["samples"] = std::move(rows);
    e.text = doc.dump(2) + "\n";
    return e;
  }
  // CSV: one row per frequency, entries flattened row-major.
  const auto dim = m->group().dimension();
  std::string xi_cols = dim == 1 ? "xi" : "";
  for (int i = 0; dim > 1 && i < dim; ++i) xi_cols += (i ? ",xi" : "xi") + std::to_string(i + 1);
  Eigen::Index d_prev = -1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const MatrixValue& g = values[i];
    if (g.rows() != d_prev) {
      d_prev = g.rows();
      e.text += "# d=" + std::to_string(d_prev) + "\n" + xi_cols;
      for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index c = 0; c < g.cols(); ++c) {
          const std::string idx = g.rows() == 1 ? "" : "_" + std::to_string(r + 1) + std::to_string(c + 1);
          e.text += ",re_gamma" + idx + ",im_gamma" + idx;
        }
      e.text += "\n";
    }
    e.text += point_csv(grid[i].components());
    for (Eigen::Index r = 0; r < g.rows(); ++r)
      for (Eigen::Index c = 0; c < g.cols(); ++c)
        e.text += "," + fmt17(g(r, c).real()) + "," + fmt17(g(r, c).imag());
    e.text += "\n";
  }
  return e;
}

Emitted cmd_berezin(const Options& o) {
  const ModelPtr m = parse_model_spec(o.model);
  const SymbolSpec psi = parse_symbol(o.symbol);
  const auto ydim = static_cast<std::size_t>(m->y_dimension());
  std::vector<Point> ys;
  if (!o.y_set.empty()) {
    ys = parse_points(o.y_set, ydim);
  } else {
    const auto [lo, hi] = m->sample_region();
    for (double t : {0.25, 0.5, 0.75}) ys.push_back(Point::filled(ydim, lo + t * (hi - lo)));
  }
  for (const Point& y : ys) m->check_y(y);
  const quad::QuadSpec spec = quad::default_spec();
  std::vector<BerezinResult> res;
  for (const Point& y : ys) res.push_back(berezin(*m, psi, y, spec));

  Emitted e;
  bool converged = true;
  for (const BerezinResult& b : res) converged = converged && b.converged;
  e.code = converged ? kPass : kNumericFailure;
  if (o.json_out) {
    json doc = header("berezin", *m, spec);
    doc["symbol"] = psi.to_string();
    json rows = json::array();
    for (std::size_t i = 0; i < ys.size(); ++i)
      rows.push_back(json{{"y", point_json(ys[i])},
                          {"re", res[i].value.real()},
                          {"im", res[i].value.imag()},
                          {"denominator", res[i].denominator},
                          {"converged", res[i].converged}});
    doc["samples"] = std::move(rows);
    e.text = doc.dump(2) + "\n";
    return e;
  }
  std::string y_cols = ydim == 1 ? "y" : "y1,y2";
  e.text = y_cols + ",re_berezin,im_berezin,denominator,converged\n";
  for (std::size_t i = 0; i < ys.size(); ++i)
    e.text += point_csv(ys[i]) + "," + fmt17(res[i].value.real()) + "," +
              fmt17(res[i].value.imag()) + "," + fmt17(res[i].denominator) + "," +
              (res[i].converged ? "true" : "false") + "\n";
  return e;
}

void add_output_flags(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out_path, "Write the report to this file");
  auto* j = sub->add_flag("--json", o.json_out, "JSON output");
  auto* c = sub->add_flag("--csv", o.csv_out, "CSV output");
  j->excludes(c);
}

void add_grid_flags(CLI::App* sub, Options& o) {
  sub->add_option("--xi-set", o.xi_set, "Comma-separated frequencies (';' between coordinates)");
  sub->add_option("--xi-min", o.xi_min, "Smallest frequency of an evenly spaced grid");
  sub->add_option("--xi-max", o.xi_max, "Largest frequency of an evenly spaced grid");
  sub->add_option("--samples", o.samples, "Number of grid frequencies")->check(CLI::PositiveNumber);
}

void add_tolerance_flags(CLI::App* sub, Options& o) {
  sub->add_option("--tol", o.tol, "Tolerance on the fiber dimension")->check(CLI::NonNegativeNumber);
  sub->add_option("--schwarz-tol", o.schwarz_tol, "Tolerance on the Schwarz residual")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", o.seed, "Seed of the (y, v) sample grid");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fiber kernels, commutativity checks and spectral functions of invariant RKHS models",
               "rkhsdiag"};
  app.require_subcommand(1);
  Options o;

  auto* list = app.add_subcommand("list", "List the model families");
  list->add_flag("--json", o.json_out, "JSON output");

  auto* verify = app.add_subcommand("verify", "Commutativity report on a frequency grid");
  verify->add_option("model", o.model, "Model, e.g. vertical-poly:n=2")->required();
  add_tolerance_flags(verify, o);
  add_grid_flags(verify, o);
  add_output_flags(verify, o);

  auto* fiber = app.add_subcommand("fiber", "Report for a single frequency");
  fiber->add_option("model", o.model, "Model")->required();
  fiber->add_option("--xi", o.xi_set, "Frequency (';' between coordinates)")->required();
  add_tolerance_flags(fiber, o);
  add_output_flags(fiber, o);

  auto* gamma = app.add_subcommand("gamma", "Spectral function of a Toeplitz operator");
  gamma->add_option("model", o.model, "Model")->required();
  gamma->add_option("--symbol", o.symbol, "const:c | indicator:a,b | expdecay:alpha | power:p")
      ->required();
  add_grid_flags(gamma, o);
  add_output_flags(gamma, o);

  auto* ber = app.add_subcommand("berezin", "Berezin transform of a Toeplitz operator");
  ber->add_option("model", o.model, "Model")->required();
  ber->add_option("--symbol", o.symbol, "const:c | indicator:a,b | expdecay:alpha | power:p")
      ->required();
  ber->add_option("--y-set", o.y_set, "Comma-separated points of Y (';' between coordinates)");
  add_output_flags(ber, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  Emitted e;
  try {
    if (list->parsed()) {
      e = cmd_list(o.json_out);
    } else if (verify->parsed()) {
      const ModelPtr m = parse_model_spec(o.model);
      e = run_reports(*m, frequency_grid(*m, o, false), o, "verify");
    } else if (fiber->parsed()) {
      const ModelPtr m = parse_model_spec(o.model);
      e = run_reports(*m, frequency_grid(*m, o, false), o, "fiber");
    } else if (gamma->parsed()) {
      e = cmd_gamma(o);
    } else {
      e = cmd_berezin(o);
    }
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return is_numeric_failure(ex.code()) ? kNumericFailure : kUsage;
  }

  if (!o.out_path.empty()) {
    std::ofstream f(o.out_path, std::ios::binary);
    if (!(f << e.text)) {
      err << "error: cannot write " << o.out_path << "\n";
      return kUsage;
    }
  } else {
    out << e.text;
  }
  return e.code;
}

}  // namespace rkhsdiag::cli
