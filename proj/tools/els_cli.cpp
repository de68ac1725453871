// els: batch runner for the nematic flow simulator.
//
//   els validate --config run.cfg
//   els simulate --config run.cfg [--out DIR] [--seed N] [--quiet]
//   els steady   --config run.cfg [--out DIR] [--seed N]
//   els eigen    [--config run.cfg] [--n N]
//   els analyze  diagnostics.csv [--model exponential|algebraic] [--column NAME]

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "els/config.hpp"
#include "els/io.hpp"
#include "els/longtime.hpp"
#include "els/presets.hpp"
#include "els/steady.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace els;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeFailure = 1;
constexpr int kValidationFailure = 2;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::ParodiViolation:
    case ErrorCode::NonPositiveGamma1:
    case ErrorCode::DissipationViolation:
    case ErrorCode::RangeError:
    case ErrorCode::InvalidGrid:
      return kValidationFailure;
    default:
      return kRuntimeFailure;
  }
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

RunConfig load(const Common& opt) {
  RunConfig c = load_config(opt.config);
  if (opt.seed) c.initial.seed = *opt.seed;
  if (!opt.out.empty()) c.output_dir = opt.out;
  return c;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

int cmd_validate(const Common& opt) {
  const RunConfig c = load(opt);
  const ValidationReport r = validate_config(c);
  std::printf("gamma1 = %.17g\ngamma2 = %.17g\nmu1 = %.17g\nmu2 = %.17g\n", r.gamma1, r.gamma2, r.mu1, r.mu2);
  std::printf("beta = (%.17g, %.17g, %.17g)\n", r.beta1, r.beta2, r.beta3);
  for (const auto& ch : r.checks)
    std::printf("%s %s: %s\n", ch.pass ? "PASS" : "FAIL", ch.name.c_str(), ch.detail.c_str());
  std::printf("%s\n", r.ok ? "config valid" : "config INVALID");
  return r.ok ? kOk : kValidationFailure;
}

void dump_state(const fs::path& path, const SimState& s, const std::string& hash) {
  write_snapshot(path.string(), snapshot_of(s));
  write_sidecar(path.string(), hash, {"v1", "v2", "theta_remainder"}, s.t);
}

int cmd_simulate(const Common& opt) {
  const RunConfig c = load(opt);
  const MaterialParams p = material_of(c);
  const std::string hash = config_hash(c);
  prepare_output_dir(c.output_dir, hash);
  const fs::path dir = c.output_dir;
  std::ofstream(dir / "config.cfg", std::ios::trunc) << serialize_config(c);

  const SimState s0 = make_initial_state(c, p);
  std::optional<SteadySolution> ref;
  if (c.reference == "steady") {
    const SteadyProblem prob{s0.grid(), p.h_field, c.winding};
    ref = solve_gradient_flow(prob, psi_from_theta(s0.theta), c.steady.tol, c.steady.max_time,
                              GradientFlowOptions{c.steady.tau});
    if (!ref->converged) throw Error(ErrorCode::NotConverged, "reference steady state did not converge");
  }

  std::ofstream csv(dir / "diagnostics.csv", std::ios::trunc | std::ios::binary);
  if (!csv) throw Error(ErrorCode::IoError, "cannot write diagnostics.csv");
  csv << kCsvHeader << "\n";

  RunOptions ro;
  ro.dt = c.dt;
  ro.t_end = c.t_end;
  ro.sample_every = c.sample_every;
  if (ref) ro.distance = [&](const SimState& s) -> std::optional<double> { return distance_to_steady_orbit(s, *ref, p); };
  ro.on_sample = [&](const SimState& s, const DiagnosticsRecord& rec, long long step) {
    csv << csv_row(rec) << "\n";
    if (c.snapshot_every > 0 && step % c.snapshot_every == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "snap_%09lld.els", step);
      dump_state(dir / name, s, hash);
    }
    if (!opt.quiet && step % (static_cast<long long>(c.sample_every) * 100) == 0)
      std::fprintf(stderr, "t = %.6g  E = %.6e  E_H = %.3e\n", rec.t, rec.energy_E, rec.energy_EH);
  };
  ro.on_failure = [&](const SimState& s) {
    csv.flush();
    dump_state(dir / "failure.els", s, hash);
    std::fprintf(stderr, "last good state written to %s\n", (dir / "failure.els").string().c_str());
  };

  const RunResult r = run(s0, p, ro, c.mode);
  csv.close();
  dump_state(dir / "final.els", r.final_state, hash);

  const DiagnosticsRecord& last = r.records.back();
  json summary;
  summary["config_hash"] = hash;
  summary["t_final"] = r.final_state.t;
  summary["samples"] = r.records.size();
  summary["energy_E"] = last.energy_E;
  summary["energy_EH"] = last.energy_EH;
  summary["theta_residual"] = last.theta_residual;
  write_json(dir / "run.json", summary);
  if (!opt.quiet) std::cout << summary.dump(2) << "\n";
  return kOk;
}

AngleField steady_initial(const RunConfig& c, const Grid& g) {
  const Winding psi_winding{2 * c.winding.a1, 2 * c.winding.a2};
  const double amp = c.steady.amplitude;
  if (c.steady.init == "cos")
    return AngleField(ScalarField::sample(g, [amp](double x, double) { return amp * std::cos(kTwoPi * x); }), psi_winding);
  if (c.steady.init == "random") {
    std::mt19937_64 rng(c.initial.seed);
    return AngleField(band_limited_noise(g, rng, amp), psi_winding);
  }
  return AngleField::constant(g, amp, psi_winding);
}

int cmd_steady(const Common& opt) {
  const RunConfig c = load(opt);
  const MaterialParams p = material_of(c);
  const Grid g(c.n);
  const SteadyProblem prob{g, p.h_field, c.winding};
  const AngleField init = steady_initial(c, g);
  const SteadySolution sol = c.steady.method == "newton"
                                 ? solve_newton(prob, init, c.steady.tol)
                                 : solve_gradient_flow(prob, init, c.steady.tol, c.steady.max_time,
                                                       GradientFlowOptions{c.steady.tau});
  json j;
  j["method"] = c.steady.method;
  j["converged"] = sol.converged;
  if (sol.converged) j["class"] = to_string(classify(sol));
  j["residual"] = sol.residual_l2;
  j["iterations"] = sol.iterations;
  j["energy_I"] = energy_I(sol.psi, p.h_field);
  j["h_squared"] = prob.h_squared();
  j["lambda2"] = lambda2(g);
  j["winding"] = {c.winding.a1, c.winding.a2};
  ScalarField dev = sol.psi.remainder();
  dev += -dev.mean();
  j["psi_deviation_l2"] = std::sqrt(inner(dev, dev));

  const std::string hash = config_hash(c);
  prepare_output_dir(c.output_dir, hash);
  const fs::path dir = c.output_dir;
  const fs::path snap = dir / "steady_psi.els";
  const Winding w = sol.psi.winding();
  write_snapshot(snap.string(), Snapshot{static_cast<std::uint32_t>(g.n()), w.a1, w.a2, 0.0,
                                         {std::vector<double>(sol.psi.remainder().values().begin(),
                                                              sol.psi.remainder().values().end())}});
  write_sidecar(snap.string(), hash, {"psi_remainder"}, 0.0);
  j["config_hash"] = hash;
  write_json(dir / "steady.json", j);
  std::cout << j.dump() << "\n";
  if (!sol.converged) {
    std::fprintf(stderr, "NotConverged: best residual %.3e\n", sol.residual_l2);
    return kRuntimeFailure;
  }
  return kOk;
}

int cmd_eigen(const Common& opt, std::optional<int> n) {
  int size = 64;
  if (!opt.config.empty()) size = load(opt).n;
  if (n) size = *n;
  json j;
  j["n"] = size;
  j["lambda2"] = lambda2(Grid(size));
  std::cout << j.dump() << "\n";
  return kOk;
}

std::optional<double> column_value(const DiagnosticsRecord& r, const std::string& column) {
  if (column == "dist_h2") return r.dist_h2;
  if (column == "energy_E") return r.energy_E;
  if (column == "dissipation_D") return r.dissipation_D;
  if (column == "energy_EH") return r.energy_EH;
  if (column == "v_l2") return r.v_l2;
  if (column == "v_h1") return r.v_h1;
  if (column == "theta_residual") return r.theta_residual;
  throw Error(ErrorCode::InvalidArgument, "unknown column " + column);
}

int cmd_analyze(const std::string& file, const std::string& model, const std::string& column, double lo,
                double hi) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file);
  const std::vector<DiagnosticsRecord> records = read_diagnostics_csv(in);
  std::vector<double> t, y;
  for (const auto& r : records) {
    if (const auto v = column_value(r, column)) {
      t.push_back(r.t);
      y.push_back(*v);
    }
  }
  if (t.empty()) throw Error(ErrorCode::InsufficientSamples, "column " + column + " has no values");

  const DecayModel primary = model == "algebraic" ? DecayModel::algebraic : DecayModel::exponential;
  const DecayModel other = primary == DecayModel::exponential ? DecayModel::algebraic : DecayModel::exponential;
  const FitBand band{lo, hi};
  json j = fit_report(fit_decay(t, y, primary, band));
  j["column"] = column;
  try {
    const DecayFit alt = fit_decay(t, y, other, band);
    j["alternative"] = fit_report(alt);
    j["better_model"] = alt.r_squared > j["r_squared"].get<double>() ? to_string(other) : to_string(primary);
  } catch (const Error&) {
  }
  if (!records.empty()) {
    const LimitStatus lim = detect_limit(records);
    j["limit"] = {{"converged", lim.converged}, {"residual", lim.residual}};
  }
  std::cout << j.dump() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral Ericksen-Leslie simulator"};
  app.require_subcommand(1);
  Common opt;
  app.add_flag("--quiet", opt.quiet, "Suppress progress output");

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* cfg = sub->add_option("--config", opt.config, "Run configuration (key = value)");
    if (need_config) cfg->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (overrides output.dir)");
    sub->add_option("--seed", opt.seed, "Random seed (overrides initial.seed)");
    sub->add_flag("--quiet", opt.quiet, "Suppress progress output");
  };

  auto* validate = app.add_subcommand("validate", "Check material coefficients and print derived constants");
  add_common(validate, true);
  auto* simulate = app.add_subcommand("simulate", "Run the coupled flow and write diagnostics");
  add_common(simulate, true);
  auto* steady = app.add_subcommand("steady", "Solve the steady sine-Gordon problem");
  add_common(steady, true);
  auto* eigen = app.add_subcommand("eigen", "Principal periodic eigenvalue");
  add_common(eigen, false);
  std::optional<int> eigen_n;
  eigen->add_option("--n", eigen_n, "Grid size");

  auto* analyze = app.add_subcommand("analyze", "Fit decay rates in a diagnostics CSV");
  std::string csv_file, model = "exponential", column = "dist_h2";
  double band_lo = 1e-8, band_hi = 1e-1;
  analyze->add_option("file", csv_file, "diagnostics.csv")->required()->check(CLI::ExistingFile);
  analyze->add_option("--model", model, "exponential or algebraic")
      ->check(CLI::IsMember({"exponential", "algebraic"}));
  analyze->add_option("--column", column, "Series to fit");
  analyze->add_option("--band-lo", band_lo, "Lower edge of the fit band");
  analyze->add_option("--band-hi", band_hi, "Upper edge of the fit band");
  analyze->add_flag("--quiet", opt.quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidationFailure;
  }

  try {
    if (*validate) return cmd_validate(opt);
    if (*simulate) return cmd_simulate(opt);
    if (*steady) return cmd_steady(opt);
    if (*eigen) return cmd_eigen(opt, eigen_n);
    if (*analyze) return cmd_analyze(csv_file, model, column, band_lo, band_hi);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeFailure;
  }
  return kRuntimeFailure;
}
