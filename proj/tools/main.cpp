#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lpmk/acceptance.hpp"
#include "lpmk/counterexample.hpp"
#include "lpmk/io.hpp"
#include "lpmk/ode_oracle.hpp"
#include "lpmk/pohozaev.hpp"
#include "lpmk/sphere_function.hpp"
#include "lpmk/support_function.hpp"
#include "lpmk/symmetry.hpp"
#include "lpmk/variational.hpp"

namespace {

constexpr int kSchemaVersion = 1;

struct Options {
  int n = 1;
  double p = -8.0;
  int resolution = 0;  ///< 0 selects the per-subcommand default
  int degree = 0;      ///< basis degree L; 0 selects the default
  std::string mode = "full";
  double seed_amplitude = 0.05;
  double tol = 0.0;  ///< 0 selects the per-subcommand default
  int max_iter = 0;
  std::string out = ".";
  int workers = 0;
  std::string config_path;
};

/// Flags override the config file: only options absent from the command line
/// are filled from JSON.
void apply_config(const CLI::App& app, Options& opt) {
  if (opt.config_path.empty()) return;
  std::ifstream in(opt.config_path);
  if (!in) throw std::invalid_argument("cannot open config file " + opt.config_path);
  nlohmann::json cfg;
  try {
    in >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config parse failure: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  const auto fill = [&](const char* flag, const char* key, auto& slot) {
    if (app.count(flag) == 0 && cfg.contains(key)) {
      try {
        cfg.at(key).get_to(slot);
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config key '" + std::string(key) + "': " + e.what());
      }
    }
  };
  fill("--n", "n", opt.n);
  fill("--p", "p", opt.p);
  fill("--resolution", "resolution", opt.resolution);
  fill("--L", "L", opt.degree);
  fill("--mode", "mode", opt.mode);
  fill("--seed-amplitude", "seed-amplitude", opt.seed_amplitude);
  fill("--tol", "tol", opt.tol);
  fill("--max-iter", "max-iter", opt.max_iter);
  fill("--out", "out", opt.out);
  fill("--workers", "workers", opt.workers);
}

lpmk::JsonValue config_json(const Options& opt, const std::string& subcommand) {
  lpmk::JsonValue c = lpmk::JsonValue::object();
  c.add("subcommand", lpmk::JsonValue::string(subcommand));
  c.add("n", lpmk::JsonValue::integer(opt.n));
  c.add("p", lpmk::JsonValue::number(opt.p));
  c.add("resolution", lpmk::JsonValue::integer(opt.resolution));
  c.add("L", lpmk::JsonValue::integer(opt.degree));
  c.add("mode", lpmk::JsonValue::string(opt.mode));
  c.add("seed_amplitude", lpmk::JsonValue::number(opt.seed_amplitude));
  c.add("tol", lpmk::JsonValue::number(opt.tol));
  c.add("max_iter", lpmk::JsonValue::integer(opt.max_iter));
  c.add("workers", lpmk::JsonValue::integer(opt.workers));
  return c;
}

void emit(const Options& opt, const std::string& filename, lpmk::JsonValue payload) {
  std::filesystem::create_directories(opt.out);
  lpmk::write_text_file((std::filesystem::path(opt.out) / filename).string(), payload.dump());
}

bool special_mode(const Options& opt) {
  if (opt.mode == "full") return false;
  if (opt.mode == "special") return true;
  throw std::invalid_argument("mode must be 'full' or 'special'");
}

int run_eigen(Options opt) {
  if (opt.degree == 0) opt.degree = 6;
  const lpmk::SymmetryGroup g = lpmk::build_group(lpmk::simplex_vertices(opt.n), special_mode(opt));
  const double l1 = lpmk::lambda1(opt.n, g, opt.degree);
  lpmk::JsonValue dims = lpmk::JsonValue::array();
  int first_degree = 0;
  for (int mu = 1; mu <= opt.degree; ++mu) {
    const int dim = lpmk::invariant_dimension(opt.n, mu, g).dimension;
    if (dim > 0 && first_degree == 0) first_degree = mu;
    lpmk::JsonValue entry = lpmk::JsonValue::object();
    entry.add("degree", lpmk::JsonValue::integer(mu));
    entry.add("dimension", lpmk::JsonValue::integer(dim));
    dims.push(std::move(entry));
  }
  lpmk::JsonValue doc = lpmk::JsonValue::object();
  doc.add("schema_version", lpmk::JsonValue::integer(kSchemaVersion));
  doc.add("config", config_json(opt, "eigen"));
  doc.add("lambda1", lpmk::JsonValue::number(l1));
  doc.add("first_invariant_degree", lpmk::JsonValue::integer(first_degree));
  doc.add("group_order", lpmk::JsonValue::integer(static_cast<long long>(g.order())));
  doc.add("invariant_dimensions", std::move(dims));
  std::cout << "lambda1 = " << lpmk::format_double(l1) << "\n";
  emit(opt, "eigen.json", std::move(doc));
  return 0;
}

int run_second_variation(Options opt) {
  if (opt.resolution == 0) opt.resolution = opt.n == 1 ? 512 : 64;
  const lpmk::VariationalProblem prob(opt.n, opt.p, 3, opt.resolution);
  std::vector<double> unit(prob.basis_size(), 0.0);
  unit[1] = 1.0;
  const lpmk::SupportFunction xi = prob.to_support(unit);
  const double formula = lpmk::second_variation_formula(xi, opt.p, prob.grid(), opt.workers);
  const double fd =
      lpmk::second_variation_fd(xi, opt.p, prob.grid(), {1e-2, 5e-3}, opt.workers);
  const double gap = std::abs(fd - formula) / std::max(1e-300, std::abs(formula));
  lpmk::JsonValue doc = lpmk::JsonValue::object();
  doc.add("schema_version", lpmk::JsonValue::integer(kSchemaVersion));
  doc.add("config", config_json(opt, "second-variation"));
  doc.add("formula", lpmk::JsonValue::number(formula));
  doc.add("finite_difference", lpmk::JsonValue::number(fd));
  doc.add("relative_gap", lpmk::JsonValue::number(gap));
  doc.add("instability_threshold", lpmk::JsonValue::number(lpmk::instability_threshold(opt.n)));
  std::cout << "second variation: formula " << lpmk::format_double(formula) << ", fd "
            << lpmk::format_double(fd) << "\n";
  emit(opt, "second_variation.json", std::move(doc));
  return 0;
}

int run_verify_pohozaev(Options opt) {
  if (opt.resolution == 0) opt.resolution = opt.n == 1 ? 512 : 64;
  const lpmk::SphereGrid grid(opt.n, opt.resolution);
  const lpmk::ConstantFunction f(opt.n, 1.0);
  const lpmk::SupportFunction one = lpmk::SupportFunction::constant(opt.n, 1.0);

  lpmk::JsonValue fields = lpmk::JsonValue::array();
  double max_abs = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const lpmk::ProjectiveField pf = lpmk::random_projective_field(opt.n, seed);
    const double value = lpmk::identity_integral(f, one, opt.p, pf, grid, opt.workers);
    max_abs = std::max(max_abs, std::abs(value));
    lpmk::JsonValue entry = lpmk::JsonValue::object();
    entry.add("seed", lpmk::JsonValue::integer(static_cast<long long>(seed)));
    entry.add("value", lpmk::JsonValue::number(value));
    fields.push(std::move(entry));
  }

  lpmk::JsonValue doc = lpmk::JsonValue::object();
  doc.add("schema_version", lpmk::JsonValue::integer(kSchemaVersion));
  doc.add("config", config_json(opt, "verify-pohozaev"));
  doc.add("constant_body_values", std::move(fields));
  doc.add("constant_body_max_abs", lpmk::JsonValue::number(max_abs));
  if (opt.n == 1) {
    lpmk::JsonValue ellipses = lpmk::JsonValue::array();
    double ellipse_max = 0.0;
    for (double a : {1.1, 1.3, 2.0}) {
      const lpmk::SupportFunction h = lpmk::SupportFunction::ellipse(a, 1.0 / a);
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const lpmk::ProjectiveField pf = lpmk::random_projective_field(1, seed);
        const double value = lpmk::identity_integral(f, h, -2.0, pf, grid, opt.workers);
        ellipse_max = std::max(ellipse_max, std::abs(value));
        lpmk::JsonValue entry = lpmk::JsonValue::object();
        entry.add("a", lpmk::JsonValue::number(a));
        entry.add("seed", lpmk::JsonValue::integer(static_cast<long long>(seed)));
        entry.add("value", lpmk::JsonValue::number(value));
        ellipses.push(std::move(entry));
      }
    }
    doc.add("ellipse_values", std::move(ellipses));
    doc.add("ellipse_max_abs", lpmk::JsonValue::number(ellipse_max));
  }
  std::cout << "max |identity integral| = " << lpmk::format_double(max_abs) << "\n";
  emit(opt, "verify_pohozaev.json", std::move(doc));
  return 0;
}

const char* policy_name(lpmk::Beta0Policy policy) {
  switch (policy) {
    case lpmk::Beta0Policy::kUser: return "user";
    case lpmk::Beta0Policy::kMatched: return "matched";
    case lpmk::Beta0Policy::kDefault: return "default";
  }
  return "unknown";
}

int run_build_counterexample(Options opt) {
  if (opt.resolution == 0) opt.resolution = 512;
  lpmk::RadialWeight w;
  w.n = opt.n;
  w.p = opt.p;
  const lpmk::RadialWeightFunction f = lpmk::resolve_radial_f(w);

  lpmk::CsvWriter csv({"r", "phi", "f", "kf_plus_phi"});
  const std::size_t stride = 256;
  for (std::size_t j = 0; j < f.table_size(); j += stride) {
    const double r = f.table_radius(j);
    const double value = f.table_value(j);
    const double kf = -f.log_derivative(r) +
                      f.gamma() * (r * r - opt.n) / (1.0 + r * r) * value;
    csv.add_row({r, f.phi(r), value, kf + f.phi(r)});
  }
  std::filesystem::create_directories(opt.out);
  lpmk::write_text_file((std::filesystem::path(opt.out) / "counterexample.csv").string(),
                        csv.dump());

  const lpmk::SphereGrid grid(opt.n, opt.resolution);
  const lpmk::InsolvabilityCertificate cert =
      lpmk::certify_insolvability(f, opt.p, grid, opt.workers);
  lpmk::JsonValue cj = lpmk::JsonValue::object();
  cj.add("max_kf", lpmk::JsonValue::number(cert.max_kf));
  cj.add("strict_fraction", lpmk::JsonValue::number(cert.strict_fraction));
  cj.add("strict_count", lpmk::JsonValue::integer(static_cast<long long>(cert.strict_count)));
  cj.add("node_count", lpmk::JsonValue::integer(static_cast<long long>(cert.node_count)));
  cj.add("sign_ok", lpmk::JsonValue::boolean(cert.sign_ok));
  cj.add("strict_ok", lpmk::JsonValue::boolean(cert.strict_ok));
  cj.add("certified", lpmk::JsonValue::boolean(cert.certified));

  lpmk::JsonValue doc = lpmk::JsonValue::object();
  doc.add("schema_version", lpmk::JsonValue::integer(kSchemaVersion));
  doc.add("config", config_json(opt, "build-counterexample"));
  doc.add("gamma", lpmk::JsonValue::number(f.gamma()));
  doc.add("pole_exponent", lpmk::JsonValue::number(opt.n * std::abs(f.gamma())));
  doc.add("phi_k", lpmk::JsonValue::integer(f.phi_k()));
  doc.add("beta0", lpmk::JsonValue::number(f.beta0()));
  doc.add("beta0_policy", lpmk::JsonValue::string(policy_name(f.beta0_policy())));
  doc.add("beta0_lower_bound", lpmk::JsonValue::number(f.beta0_lower_bound()));
  doc.add("f_at_1", lpmk::JsonValue::number(f.radial_value(1.0)));
  doc.add("f_limit", lpmk::JsonValue::number(f.phi_inf() / std::abs(f.gamma())));
  doc.add("certificate", std::move(cj));
  std::cout << "counterexample resolved: gamma = " << lpmk::format_double(f.gamma())
            << ", certified = " << (cert.certified ? "true" : "false") << "\n";
  emit(opt, "counterexample.json", std::move(doc));
  return 0;
}

int run_minimize(Options opt) {
  if (opt.resolution == 0) opt.resolution = opt.n == 1 ? 512 : 64;
  if (opt.degree == 0) opt.degree = opt.n == 1 ? 24 : 14;
  lpmk::OptimizerSettings st;
  if (opt.tol > 0.0) st.tolerance = opt.tol;
  if (opt.max_iter > 0) st.max_iterations = opt.max_iter;
  st.workers = opt.workers;
  const lpmk::VariationalProblem prob(opt.n, opt.p, opt.degree, opt.resolution, st);
  const lpmk::CriticalPoint cp = lpmk::minimize(prob, opt.seed_amplitude);

  lpmk::JsonValue doc = lpmk::JsonValue::object();
  doc.add("schema_version", lpmk::JsonValue::integer(kSchemaVersion));
  doc.add("config", config_json(opt, "minimize"));
  doc.add("objective", lpmk::JsonValue::number(cp.objective));
  doc.add("lambda", lpmk::JsonValue::number(cp.lambda));
  doc.add("el_residual", lpmk::JsonValue::number(cp.el_residual));
  doc.add("nonconstancy", lpmk::JsonValue::number(cp.nonconstancy));
  doc.add("min_w_eigenvalue", lpmk::JsonValue::number(cp.min_w_eigenvalue));
  doc.add("max_u", lpmk::JsonValue::number(cp.max_u));
  doc.add("min_u", lpmk::JsonValue::number(cp.min_u));
  doc.add("iterations", lpmk::JsonValue::integer(cp.iterations));
  doc.add("gradient_norm", lpmk::JsonValue::number(cp.gradient_norm));
  doc.add("lp_constraint_error", lpmk::JsonValue::number(cp.lp_constraint_error));
  lpmk::JsonValue degrees = lpmk::JsonValue::array();
  for (int i = 0; i < prob.basis_size(); ++i)
    degrees.push(lpmk::JsonValue::integer(prob.mode_degree(i)));
  doc.add("mode_degrees", std::move(degrees));
  doc.add("coefficients", lpmk::JsonValue::number_array(cp.coefficients));

  const lpmk::SphereGrid& grid = prob.grid();
  std::filesystem::create_directories(opt.out);
  if (opt.n == 1) {
    lpmk::CsvWriter csv({"theta", "u"});
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double theta = std::atan2(grid.node(j)[1], grid.node(j)[0]);
      csv.add_row({theta, cp.u.value(grid.node(j))});
    }
    lpmk::write_text_file((std::filesystem::path(opt.out) / "minimize_u.csv").string(),
                          csv.dump());
  } else {
    lpmk::CsvWriter csv({"x", "y", "z", "u"});
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double* X = grid.node(j);
      csv.add_row({X[0], X[1], X[2], cp.u.value(X)});
    }
    lpmk::write_text_file((std::filesystem::path(opt.out) / "minimize_u.csv").string(),
                          csv.dump());
  }
  std::cout << "objective = " << lpmk::format_double(cp.objective)
            << ", nonconstancy = " << lpmk::format_double(cp.nonconstancy) << "\n";
  emit(opt, "minimize.json", std::move(doc));
  return 0;
}

int run_oracle(Options opt) {
  const std::optional<lpmk::SymmetricSolution> sol = lpmk::find_symmetric_solution(opt.p);
  lpmk::JsonValue doc = lpmk::JsonValue::object();
  doc.add("schema_version", lpmk::JsonValue::integer(kSchemaVersion));
  doc.add("config", config_json(opt, "oracle"));
  doc.add("exists", lpmk::JsonValue::boolean(sol.has_value()));
  if (sol) {
    doc.add("h0", lpmk::JsonValue::number(sol->h0));
    doc.add("period", lpmk::JsonValue::number(sol->period));
    doc.add("h_min", lpmk::JsonValue::number(sol->h_min));
    doc.add("h_max", lpmk::JsonValue::number(sol->h_max));
    doc.add("objective", lpmk::JsonValue::number(sol->objective));
    doc.add("lift_residual", lpmk::JsonValue::number(sol->lift_residual));
    doc.add("coefficients", lpmk::JsonValue::number_array(sol->lift.coefficients()));
  }
  std::cout << (sol ? "solution found" : "no symmetric solution") << "\n";
  emit(opt, "oracle.json", std::move(doc));
  return 0;
}

int run_bifurcation(Options opt) {
  const double tol = opt.tol > 0.0 ? opt.tol : 1e-3;
  const double threshold = lpmk::bifurcation_point(-8.0, -6.0, tol);
  lpmk::JsonValue doc = lpmk::JsonValue::object();
  doc.add("schema_version", lpmk::JsonValue::integer(kSchemaVersion));
  doc.add("config", config_json(opt, "bifurcation"));
  doc.add("threshold", lpmk::JsonValue::number(threshold));
  doc.add("tolerance", lpmk::JsonValue::number(tol));
  std::cout << "threshold = " << lpmk::format_double(threshold) << "\n";
  emit(opt, "bifurcation.json", std::move(doc));
  return 0;
}

int run_report(Options opt) {
  const std::vector<lpmk::acceptance::CheckResult> results =
      lpmk::acceptance::run_all(opt.workers);
  lpmk::JsonValue arr = lpmk::JsonValue::array();
  for (const lpmk::acceptance::CheckResult& r : results) {
    std::cout << lpmk::acceptance::summary_line(r) << "\n";
    lpmk::JsonValue entry = lpmk::JsonValue::object();
    entry.add("name", lpmk::JsonValue::string(r.name));
    entry.add("passed", lpmk::JsonValue::boolean(r.passed));
    entry.add("detail", lpmk::JsonValue::string(r.detail));
    entry.add("seconds", lpmk::JsonValue::number(r.seconds));
    arr.push(std::move(entry));
  }
  const bool ok = lpmk::acceptance::all_passed(results);
  lpmk::JsonValue doc = lpmk::JsonValue::object();
  doc.add("schema_version", lpmk::JsonValue::integer(kSchemaVersion));
  doc.add("config", config_json(opt, "report"));
  doc.add("all_passed", lpmk::JsonValue::boolean(ok));
  doc.add("results", std::move(arr));
  emit(opt, "report.json", std::move(doc));
  std::cout << (ok ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the L_p Minkowski equation in the deeply negative "
               "exponent range"};
  app.fallthrough();
  Options opt;
  app.add_option("--n", opt.n, "Sphere dimension (1 or 2)");
  app.add_option("--p", opt.p, "Exponent of the equation");
  app.add_option("--resolution", opt.resolution, "Grid resolution (0 = default)");
  app.add_option("--L", opt.degree, "Basis degree cutoff (0 = default)");
  app.add_option("--mode", opt.mode, "Symmetry group mode: full or special");
  app.add_option("--seed-amplitude", opt.seed_amplitude, "Seed perturbation amplitude");
  app.add_option("--tol", opt.tol, "Tolerance (0 = default)");
  app.add_option("--max-iter", opt.max_iter, "Iteration budget (0 = default)");
  app.add_option("--out", opt.out, "Output directory");
  app.add_option("--workers", opt.workers, "Worker threads (0 = all cores)");
  app.add_option("--config", opt.config_path, "JSON config file (flags take precedence)");

  CLI::App* sc_eigen =
      app.add_subcommand("eigen", "First symmetric eigenvalue and invariant dimensions");
  CLI::App* sc_sv = app.add_subcommand(
      "second-variation", "Second variation at the constant: formula and finite difference");
  CLI::App* sc_poh =
      app.add_subcommand("verify-pohozaev", "Integral identity checks for random fields");
  CLI::App* sc_ce = app.add_subcommand("build-counterexample",
                                       "Resolve a radial insolvable weight and certify it");
  CLI::App* sc_min =
      app.add_subcommand("minimize", "Constrained descent to a non-constant critical point");
  CLI::App* sc_oracle =
      app.add_subcommand("oracle", "Planar periodic-orbit solution via the shooting oracle");
  CLI::App* sc_bif =
      app.add_subcommand("bifurcation", "Bisect the onset exponent of symmetric solutions");
  CLI::App* sc_report = app.add_subcommand("report", "Run the full release gate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "\nerror: " << e.what() << "\n";
    return 1;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 1;
  }

  try {
    apply_config(app, opt);
    if (sc_eigen->parsed()) return run_eigen(opt);
    if (sc_sv->parsed()) return run_second_variation(opt);
    if (sc_poh->parsed()) return run_verify_pohozaev(opt);
    if (sc_ce->parsed()) return run_build_counterexample(opt);
    if (sc_min->parsed()) return run_minimize(opt);
    if (sc_oracle->parsed()) return run_oracle(opt);
    if (sc_bif->parsed()) return run_bifurcation(opt);
    if (sc_report->parsed()) return run_report(opt);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  std::cerr << app.help();
  return 1;
}
