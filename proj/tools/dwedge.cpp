// dwedge: command-line front end.
//
// Config resolution: command defaults, then --config JSON (merge patch), then
// flags. The resolved config (minus the worker count, which never changes
// results) is embedded in every JSON summary.
//
// Exit codes: 0 ok, 1 numerical failure, 2 config error, 3 verify failure.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "dwedge/dwedge.hpp"

using namespace dwedge;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;

// ---------------------------------------------------------------------------
// Flags recorded as JSON patches, applied only when given on the command line

struct FlagPatch {
  CLI::Option* opt;
  std::function<void(Json&)> apply;
};

using Patches = std::vector<FlagPatch>;

template <class T>
CLI::Option* flag(CLI::App* app, Patches& reg, const std::string& name, const std::string& ptr,
                  const std::string& desc) {
  auto v = std::make_shared<T>();
  CLI::Option* o = app->add_option(name, *v, desc);
  reg.push_back({o, [v, ptr](Json& j) { j[Json::json_pointer(ptr)] = *v; }});
  return o;
}

// A measure flag takes either inline JSON or a bare kind name.
Json measure_arg(const std::string& s, const std::string& field) {
  if (!s.empty() && s.front() == '{') {
    try {
      return Json::parse(s);
    } catch (const Json::parse_error& e) {
      throw ConfigError(field, std::string("invalid JSON: ") + e.what());
    }
  }
  if (s == "semicircle" || s == "point_mass") return {{"kind", "point_mass"}, {"x", 0.0}};
  if (s == "two_atom") return {{"kind", "two_atom"}, {"c", 1.0}};
  return {{"kind", s}};
}

void measure_flag(CLI::App* app, Patches& reg, const std::string& name, const std::string& ptr, const std::string& desc) {
  auto v = std::make_shared<std::string>();
  CLI::Option* o = app->add_option(name, *v, desc);
  const std::string field = ptr.substr(1);
  reg.push_back({o, [v, ptr, field](Json& j) { j[Json::json_pointer(ptr)] = measure_arg(*v, field); }});
}

void ensemble_flags(CLI::App* app, Patches& reg) {
  flag<int>(app, reg, "--N", "/ensemble/N", "matrix size");
  flag<double>(app, reg, "--lambda0", "/ensemble/lambda0", "coupling of the potential");
  measure_flag(app, reg, "--potential", "/ensemble/potential/iid", "law of the iid potential (JSON or kind name)");
  flag<std::string>(app, reg, "--law", "/ensemble/law", "entry law: gaussian | rademacher");
  flag<double>(app, reg, "--c2", "/ensemble/c2", "diagonal variance is (1 + c2)/N");
  flag<bool>(app, reg, "--zero-diagonal", "/ensemble/zero_diagonal", "true | false");
}

Json ensemble_defaults(int n, double lambda0) {
  return {{"N", n},
          {"lambda0", lambda0},
          {"potential", {{"iid", {{"kind", "two_atom"}, {"c", 1.0}}}}},
          {"law", "gaussian"},
          {"c2", 0.0},
          {"zero_diagonal", true}};
}

// Measures and potentials are replaced whole rather than merged key by key.
void apply_patch(Json& cfg, const Json& patch) {
  if (!patch.is_object()) throw ConfigError("config", "expected a JSON object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (!cfg.contains(it.key())) throw ConfigError(it.key(), "unknown key for this command");
    if (it.key() == "ensemble" && it->is_object() && it->contains("potential")) cfg["ensemble"].erase("potential");
    if (it.key() == "measure") cfg["measure"] = Json::object();
  }
  cfg.merge_patch(patch);
}

// ---------------------------------------------------------------------------
// Typed access to the resolved config

double num(const Json& c, const std::string& k) { return detail::as_number(c.at(k), k); }

int integer(const Json& c, const std::string& k) {
  if (!c.at(k).is_number_integer()) throw ConfigError(k, "expected an integer");
  return c.at(k).get<int>();
}

int positive(const Json& c, const std::string& k) {
  const int v = integer(c, k);
  if (v < 1) throw ConfigError(k, "must be positive");
  return v;
}

bool boolean(const Json& c, const std::string& k) {
  if (!c.at(k).is_boolean()) throw ConfigError(k, "expected a boolean");
  return c.at(k).get<bool>();
}

std::string str(const Json& c, const std::string& k) {
  if (!c.at(k).is_string()) throw ConfigError(k, "expected a string");
  return c.at(k).get<std::string>();
}

std::vector<double> nums(const Json& c, const std::string& k) { return detail::as_numbers(c.at(k), k); }

std::vector<int> ints(const Json& c, const std::string& k) {
  const Json& a = c.at(k);
  if (!a.is_array() || a.empty()) throw ConfigError(k, "expected a nonempty array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number_integer()) throw ConfigError(k + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(a[i].get<int>());
  }
  return out;
}

EnsembleSpec ensemble(const Json& c) {
  EnsembleSpec s = spec_from_json(c.at("ensemble"));
  s.seed = c.at("seed").get<std::uint64_t>();
  return s;
}

// ---------------------------------------------------------------------------
// Command results

struct Output {
  Json results = Json::object();
  std::function<void(std::ostream&)> csv;  // empty for JSON-only commands
  std::function<void(std::ostream&)> bin;
  int exit_code = 0;
};

struct Command {
  std::string name;
  Json defaults;
  Patches patches;
  std::function<Output(const Json&, int workers)> run;
};

// ---------------------------------------------------------------------------
// fc-solve

Json intervals_of(const FreeConvolutionSolution& s, double threshold) {
  Json out = Json::array();
  bool in = false;
  double start = 0.0;
  for (std::size_t k = 0; k < s.energies.size(); ++k) {
    const bool on = s.density[k] > threshold;
    if (on && !in) start = s.energies[k];
    if (!on && in) out.push_back({start, s.energies[k - 1]});
    in = on;
  }
  if (in) out.push_back({start, s.energies.back()});
  return out;
}

Output run_fc_solve(const Json& c, int) {
  const Measure nu = measure_from_json(c.at("measure"));
  const double lambda = num(c, "lambda"), gamma = num(c, "gamma");
  if (lambda < 0.0) throw ConfigError("lambda", "must be nonnegative");
  if (!(gamma > 0.0)) throw ConfigError("gamma", "must be positive");
  auto bound = [&](const std::string& k, double fallback) {
    return c.at(k).is_string() && c.at(k) == "auto" ? fallback : num(c, k);
  };
  const double lo = bound("lo", gamma * (lambda * nu.support_lo() - 2.5));
  const double hi = bound("hi", gamma * (lambda * nu.support_hi() + 2.5));
  const int points = integer(c, "points");
  if (points < 2) throw ConfigError("points", "must be at least 2");
  if (!(lo < hi)) throw ConfigError("lo", "must be below hi");
  const double eta = num(c, "eta");
  if (!(eta > 0.0)) throw ConfigError("eta", "must be positive");

  auto sol = std::make_shared<FreeConvolutionSolution>(solve_grid(nu, lambda, gamma, lo, hi, points, eta));
  Output o;
  o.results = solution_summary(*sol);
  bool single = true;
  try {
    check_single_interval(nu, lambda);
  } catch (const AssumptionViolated&) {
    single = false;
  }
  o.results["single_interval"] = single;
  o.results["intervals"] = intervals_of(*sol, num(c, "support_threshold"));
  o.csv = [sol](std::ostream& out) { write_solution_csv(out, *sol); };
  return o;
}

// ---------------------------------------------------------------------------
// edge-scaling

Output run_edge_scaling(const Json& c, int) {
  const Measure nu = measure_from_json(c.at("measure"));
  const double lambda = num(c, "lambda");
  if (lambda < 0.0) throw ConfigError("lambda", "must be nonnegative");
  Output o;
  EdgeScaling s;
  try {
    s = build(nu, lambda);
  } catch (const AssumptionViolated& e) {
    o.results = {{"status", "assumption_failed"}, {"message", e.what()}};
    o.exit_code = kExitNumerical;
    return o;
  }
  const ScalingResiduals r = identity_residuals(s);
  const double tol = num(c, "tolerance");
  const bool pass = r.max() <= tol;
  Json a = Json::array(), ap = Json::array();
  for (int n = 1; n <= 4; ++n) {
    a.push_back(s.a[n]);
    ap.push_back(s.a_prime[n]);
  }
  o.results = {{"status", pass ? "pass" : "fail"},
               {"zeta", s.zeta},
               {"gamma", s.gamma},
               {"tau", s.tau},
               {"e_plus", s.e_plus},
               {"l_plus", s.l_plus},
               {"A", a},
               {"A_prime", ap},
               {"residuals",
                {{"A2", r.a2},
                 {"A3", r.a3},
                 {"tau", r.tau},
                 {"gamma_relation", r.gamma_relation},
                 {"recurrence", r.recurrence},
                 {"max", r.max()}}},
               {"min_gap", r.min_gap}};
  if (!pass) o.exit_code = kExitNumerical;
  return o;
}

// ---------------------------------------------------------------------------
// sample

Output run_sample(const Json& c, int workers) {
  const EnsembleSpec spec = ensemble(c);
  const int n = positive(c, "samples");
  auto spectra = std::make_shared<std::vector<Spectrum>>(n);
  parallel_for(n, workers, [&](std::size_t i) { (*spectra)[i] = spectrum(spec, i); });
  Output o;
  o.results = {{"samples", n}, {"N", spec.n}, {"spec_hash", spec.hash()}};
  o.csv = [spectra](std::ostream& out) { write_spectra_csv(out, *spectra); };
  o.bin = [spectra](std::ostream& out) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : *spectra) rows.push_back(s.eigenvalues);
    write_spectra_binary(out, rows);
  };
  return o;
}

// ---------------------------------------------------------------------------
// mc-edge

Output run_mc_edge(const Json& c, int workers) {
  const EnsembleSpec spec = ensemble(c);
  auto r = std::make_shared<MCRunResult>(mc_edge(spec, positive(c, "n"), positive(c, "top_k"), workers));
  Output o;
  o.results = {{"n", r->n_samples}, {"ks", r->ks}, {"law", "tw1"},
               {"params", {{"N", spec.n}, {"lambda0", spec.lambda0}, {"top_k", r->top_k}}},
               {"seed", spec.seed}};
  o.csv = [r](std::ostream& out) {
    write_csv_row(out, {"sample_index", "k", "value", "gamma", "e_plus"});
    for (int i = 0; i < r->n_samples; ++i)
      for (int k = 0; k < r->top_k; ++k)
        write_csv_row(out, {std::to_string(i), std::to_string(k + 1),
                            csv_number(r->samples_top[static_cast<std::size_t>(i) * r->top_k + k]),
                            csv_number(r->gamma[i]), csv_number(r->e_plus[i])});
  };
  o.bin = [r](std::ostream& out) {
    std::vector<std::vector<double>> rows(r->n_samples);
    for (int i = 0; i < r->n_samples; ++i)
      rows[i].assign(r->samples_top.begin() + static_cast<std::ptrdiff_t>(i) * r->top_k,
                     r->samples_top.begin() + static_cast<std::ptrdiff_t>(i + 1) * r->top_k);
    write_spectra_binary(out, rows);
  };
  return o;
}

// ---------------------------------------------------------------------------
// regime

Output run_regime(const Json& c, int workers) {
  RegimeOptions opt;
  opt.law = entry_law_from_string(str(c, "law"), "law");
  opt.c2 = num(c, "c2");
  opt.zero_diagonal = boolean(c, "zero_diagonal");
  opt.seed = c.at("seed").get<std::uint64_t>();
  opt.workers = workers;
  const Measure nu = measure_from_json(c.at("measure"));
  auto v = std::make_shared<std::vector<RegimeVerdict>>(
      regime_test(nu, num(c, "sigma0"), num(c, "delta"), ints(c, "N"), positive(c, "n"), opt));
  Output o;
  Json rows = Json::array();
  for (const auto& r : *v) {
    Json alts = Json::array();
    for (const auto& a : r.alternatives) alts.push_back({{"law", a.law}, {"ks", a.ks}});
    rows.push_back({{"N", r.n},
                    {"lambda0", r.lambda0},
                    {"e_plus", r.e_plus},
                    {"law", r.fit.law},
                    {"ks", r.fit.ks},
                    {"alternatives", alts},
                    {"sigma2_gauss", r.sigma2_gauss},
                    {"sigma2_conv", r.sigma2_conv}});
  }
  o.results = {{"regime", to_string(v->front().regime)}, {"law", v->front().fit.law},
               {"n", positive(c, "n")}, {"seed", opt.seed}, {"by_N", rows}};
  o.csv = [v](std::ostream& out) {
    write_csv_row(out, {"N", "sample_index", "value"});
    for (const auto& r : *v)
      for (std::size_t i = 0; i < r.samples.size(); ++i)
        write_csv_row(out, {std::to_string(r.n), std::to_string(i), csv_number(r.samples[i])});
  };
  return o;
}

// ---------------------------------------------------------------------------
// dbm

Output run_dbm(const Json& c, int workers) {
  const EnsembleSpec spec = ensemble(c);
  const std::string obs = str(c, "observable");
  if (obs != "edge" && obs != "m") throw ConfigError("observable", "expected edge | m");
  const int n = positive(c, "trajectories");
  TrackOptions to;
  to.edge = obs == "edge";
  to.stieltjes = obs == "m";
  to.epsilon = num(c, "epsilon");
  const std::vector<double> times = nums(c, "times");
  const double y = num(c, "y");
  auto tracks = std::make_shared<std::vector<std::vector<TrackPoint>>>(n);
  try {
    parallel_for(n, workers, [&](std::size_t i) { (*tracks)[i] = flow_edge_track(spec, times, y, i, to); });
  } catch (const InvalidArgument& e) {
    throw ConfigError("times", e.what());
  }
  Output o;
  o.results = {{"trajectories", n}, {"observable", obs}, {"N", spec.n}, {"seed", spec.seed}};
  const bool m = obs == "m";
  o.csv = [tracks, m](std::ostream& out) {
    write_csv_row(out, m ? std::vector<std::string>{"trajectory", "t", "value_re", "value_im"}
                         : std::vector<std::string>{"trajectory", "t", "value"});
    for (std::size_t i = 0; i < tracks->size(); ++i)
      for (const auto& p : (*tracks)[i]) {
        if (m)
          write_csv_row(out, {std::to_string(i), csv_number(p.t), csv_number(p.m.real()), csv_number(p.m.imag())});
        else
          write_csv_row(out, {std::to_string(i), csv_number(p.t), csv_number(p.edge)});
      }
  };
  return o;
}

// ---------------------------------------------------------------------------
// verify

Output run_verify(const Json& c, int workers) {
  const std::string suite = str(c, "suite");
  if (suite != "identities" && suite != "local-law" && suite != "optical" && suite != "all")
    throw ConfigError("suite", "expected identities | local-law | optical | all");
  const std::uint64_t seed = c.at("seed").get<std::uint64_t>();
  Output o;
  bool ok = true;
  if (suite == "identities" || suite == "all") {
    const auto r = run_identity_suite(seed, positive(c, "instances"));
    o.results["identities"] = {{"pass", r.pass()},
                               {"instances", r.instances},
                               {"tolerance", r.tolerance},
                               {"max", {{"schur", r.schur},
                                        {"basic", r.basic},
                                        {"onesided", r.onesided},
                                        {"twosided", r.twosided},
                                        {"ward", r.ward},
                                        {"green", r.green}}}};
    ok = ok && r.pass();
  }
  if (suite == "local-law" || suite == "all") {
    const auto r = run_local_law_suite(positive(c, "local_law_N"), positive(c, "seeds"), nums(c, "lambdas"), seed,
                                       workers);
    Json rows = Json::array();
    for (const auto& row : r.rows)
      rows.push_back({{"lambda0", row.lambda0}, {"p95_m", row.p95_m}, {"p95_offdiag", row.p95_offdiag},
                      {"p95_diag", row.p95_diag}});
    o.results["local_law"] = {{"pass", r.pass()}, {"N", r.n}, {"seeds", r.seeds}, {"bound", r.bound}, {"rows", rows}};
    ok = ok && r.pass();
  }
  if (suite == "optical" || suite == "all") {
    const auto r = run_optical_suite(ints(c, "optical_N"), positive(c, "optical_seeds"), num(c, "optical_lambda0"),
                                     seed, 0.05, workers);
    o.results["optical"] = {{"pass", r.pass()},     {"N", r.ns},          {"medians", r.medians},
                            {"slope", r.slope},     {"target", r.target}, {"slope_tolerance", r.slope_tol},
                            {"decreasing", r.decreasing}};
    ok = ok && r.pass();
  }
  o.results["pass"] = ok;
  if (!ok) o.exit_code = kExitVerify;
  return o;
}

// ---------------------------------------------------------------------------
// tw-table

Output run_tw_table(const Json& c, int) {
  const double lo = num(c, "lo"), hi = num(c, "hi"), step = num(c, "step");
  if (!(step > 0.0) || !(lo < hi)) throw ConfigError("step", "need step > 0 and lo < hi");
  auto s = std::make_shared<std::vector<double>>();
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int k = 0; k < count; ++k) s->push_back(lo + k * step);
  const auto m1 = tw_moments(1), m2 = tw_moments(2);
  Output o;
  o.results = {{"points", count},
               {"tw1", {{"mean", m1.mean}, {"variance", m1.variance}}},
               {"tw2", {{"mean", m2.mean}, {"variance", m2.variance}}}};
  o.csv = [s](std::ostream& out) {
    write_csv_row(out, {"s", "F1", "F2"});
    for (double x : *s) write_csv_row(out, {csv_number(x), csv_number(tw_cdf(1, x)), csv_number(tw_cdf(2, x))});
  };
  return o;
}

// ---------------------------------------------------------------------------

void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn, bool binary) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw ConfigError("out", "cannot write '" + path + "'");
  fn(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deformed Wigner edge statistics toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Patches global;
  std::string config_path;
  std::string out_prefix;
  int workers = default_workers();
  bool timing = false;
  app.add_option("--config", config_path, "JSON config; flags override its keys");
  flag<std::uint64_t>(&app, global, "--seed", "/seed", "master seed");
  app.add_option("--workers", workers, "worker threads (default: DWEDGE_WORKERS or core count)");
  app.add_option("--out", out_prefix, "write PREFIX.csv|PREFIX.bin and PREFIX.json; summary to stdout");
  flag<std::string>(&app, global, "--format", "/format", "csv | json | bin");
  app.add_flag("--timing", timing, "report wall time in the summary and on stderr");

  std::vector<Command> commands;
  auto add = [&](const std::string& name, const std::string& desc, Json defaults,
                 std::function<Output(const Json&, int)> run) -> std::pair<CLI::App*, Patches*> {
    commands.push_back({name, std::move(defaults), {}, std::move(run)});
    return {app.add_subcommand(name, desc), &commands.back().patches};
  };
  commands.reserve(8);

  {
    auto [sc, p] = add("fc-solve", "Solve the deformed semicircle law on an energy grid",
                       {{"measure", {{"kind", "point_mass"}, {"x", 0.0}}},
                        {"lambda", 0.0},
                        {"gamma", 1.0},
                        {"lo", "auto"},
                        {"hi", "auto"},
                        {"points", 1201},
                        {"eta", kDensityEta},
                        {"support_threshold", 1e-3}},
                       run_fc_solve);
    measure_flag(sc, *p, "--measure", "/measure", "measure nu (JSON or kind name)");
    flag<double>(sc, *p, "--lambda", "/lambda", "coupling");
    flag<double>(sc, *p, "--gamma", "/gamma", "dilation");
    flag<double>(sc, *p, "--lo", "/lo", "grid start");
    flag<double>(sc, *p, "--hi", "/hi", "grid end");
    flag<int>(sc, *p, "--points", "/points", "grid points");
    flag<double>(sc, *p, "--eta", "/eta", "solve height; density uses (eta, eta/2) extrapolation");
    sc->footer("CSV columns: E, density, re_m, im_m");
  }
  {
    auto [sc, p] = add("edge-scaling", "Edge rescaling constants and identity residuals (JSON)",
                       {{"measure", {{"kind", "two_atom"}, {"c", 1.0}}}, {"lambda", 0.5}, {"tolerance", 1e-10}},
                       run_edge_scaling);
    measure_flag(sc, *p, "--measure", "/measure", "measure nu (JSON or kind name)");
    flag<double>(sc, *p, "--lambda", "/lambda", "coupling");
    sc->footer("JSON only. status: pass | fail | assumption_failed; exit 1 unless pass");
  }
  {
    auto [sc, p] = add("sample", "Spectra of lambda0 V + W",
                       {{"ensemble", ensemble_defaults(100, 0.5)}, {"samples", 1}}, run_sample);
    ensemble_flags(sc, *p);
    flag<int>(sc, *p, "--samples", "/samples", "number of matrices");
    sc->footer("CSV columns: sample_index, k, mu (k = 1 is the largest). bin: DWSPEC01 layout");
  }
  {
    auto [sc, p] = add("mc-edge", "Rescaled top eigenvalues against Tracy-Widom",
                       {{"ensemble", ensemble_defaults(500, 0.5)}, {"n", 200}, {"top_k", 1}}, run_mc_edge);
    ensemble_flags(sc, *p);
    flag<int>(sc, *p, "--n", "/n", "number of samples");
    flag<int>(sc, *p, "--top-k", "/top_k", "eigenvalues kept per sample");
    sc->footer("CSV columns: sample_index, k, value, gamma, e_plus; value = gamma N^{2/3} (mu_k - E+)");
  }
  {
    auto [sc, p] = add("regime", "Edge law for lambda0 = sigma0 N^-delta",
                       {{"measure", {{"kind", "two_atom"}, {"c", 1.0}}},
                        {"sigma0", 1.0},
                        {"delta", 1.0 / 3.0},
                        {"N", {200}},
                        {"n", 500},
                        {"law", "gaussian"},
                        {"c2", 0.0},
                        {"zero_diagonal", true}},
                       run_regime);
    measure_flag(sc, *p, "--measure", "/measure", "law of the potential");
    flag<double>(sc, *p, "--sigma0", "/sigma0", "coupling amplitude");
    flag<double>(sc, *p, "--delta", "/delta", "coupling exponent");
    flag<std::vector<int>>(sc, *p, "--N", "/N", "matrix sizes")->delimiter(',');
    flag<int>(sc, *p, "--n", "/n", "samples per size");
    flag<std::string>(sc, *p, "--law", "/law", "entry law: gaussian | rademacher");
    flag<double>(sc, *p, "--c2", "/c2", "diagonal variance is (1 + c2)/N");
    flag<bool>(sc, *p, "--zero-diagonal", "/zero_diagonal", "true | false");
    sc->footer("CSV columns: N, sample_index, value (the regime's normalized statistic)");
  }
  {
    auto [sc, p] = add("dbm", "Observables along the matrix Ornstein-Uhlenbeck flow",
                       {{"ensemble", ensemble_defaults(200, 0.5)},
                        {"times", {0.0, 1.0}},
                        {"y", 0.0},
                        {"trajectories", 1},
                        {"observable", "edge"},
                        {"epsilon", kFlowEpsilon}},
                       run_dbm);
    ensemble_flags(sc, *p);
    flag<std::vector<double>>(sc, *p, "--times", "/times", "increasing times")->delimiter(',');
    flag<double>(sc, *p, "--y", "/y", "offset of z from the moving edge");
    flag<int>(sc, *p, "--trajectories", "/trajectories", "independent trajectories");
    flag<std::string>(sc, *p, "--observable", "/observable", "edge | m");
    sc->footer("CSV columns: trajectory, t, value (edge) or trajectory, t, value_re, value_im (m)");
  }
  {
    auto [sc, p] = add("verify", "Numerical identity, local-law and optical checks (JSON)",
                       {{"suite", "identities"},
                        {"instances", 100},
                        {"local_law_N", 200},
                        {"seeds", 50},
                        {"lambdas", {0.0, 0.5}},
                        {"optical_N", {100, 200, 400}},
                        {"optical_seeds", 200},
                        {"optical_lambda0", 0.05}},
                       run_verify);
    flag<std::string>(sc, *p, "--suite", "/suite", "identities | local-law | optical | all");
    sc->footer("JSON only; exit 3 when a suite fails");
  }
  {
    auto [sc, p] = add("tw-table", "Tracy-Widom CDF table",
                       {{"lo", -8.0}, {"hi", 4.0}, {"step", 0.05}}, run_tw_table);
    flag<double>(sc, *p, "--lo", "/lo", "first s");
    flag<double>(sc, *p, "--hi", "/hi", "last s");
    flag<double>(sc, *p, "--step", "/step", "spacing");
    sc->footer("CSV columns: s, F1, F2");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  Command* cmd = nullptr;
  for (auto& c : commands)
    if (app.got_subcommand(c.name)) cmd = &c;

  try {
    Json cfg = cmd->defaults;
    cfg["seed"] = 0;
    cfg["format"] = cmd->name == "edge-scaling" || cmd->name == "verify" ? "json" : "csv";
    if (!config_path.empty()) apply_patch(cfg, read_json_file(config_path));
    Json flags = Json::object();
    for (const auto* reg : {&global, &cmd->patches})
      for (const auto& f : *reg)
        if (f.opt->count() > 0) f.apply(flags);
    apply_patch(cfg, flags);
    if (!cfg["seed"].is_number_unsigned() && !(cfg["seed"].is_number_integer() && cfg["seed"].get<long long>() >= 0))
      throw ConfigError("seed", "expected a nonnegative integer");
    cfg["seed"] = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("ensemble") && cfg["ensemble"].is_object()) cfg["ensemble"]["seed"] = cfg["seed"];
    const std::string format = str(cfg, "format");
    if (format != "csv" && format != "json" && format != "bin") throw ConfigError("format", "expected csv | json | bin");
    if (workers < 1) throw ConfigError("workers", "must be positive");

    const auto t0 = std::chrono::steady_clock::now();
    Output out = cmd->run(cfg, workers);
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (timing) {
      out.results["runtime"] = runtime;
      std::cerr << "runtime " << runtime << " s\n";
    }

    const Json summary = {
        {"schema_version", kSchemaVersion}, {"command", cmd->name}, {"config", cfg}, {"results", out.results}};
    const std::string text = summary.dump(2) + "\n";
    const bool tabular = format == "csv" ? static_cast<bool>(out.csv) : format == "bin" && out.bin;
    if (format == "bin" && !out.bin) throw ConfigError("format", "bin output is not available for " + cmd->name);
    if (!out_prefix.empty()) {
      if (tabular) {
        if (format == "bin")
          write_file(out_prefix + ".bin", out.bin, true);
        else
          write_file(out_prefix + ".csv", out.csv, false);
      }
      write_file(out_prefix + ".json", [&](std::ostream& f) { f << text; }, false);
      std::cout << text;
    } else if (format == "bin") {
      throw ConfigError("out", "bin output needs --out");
    } else if (tabular) {
      out.csv(std::cout);
    } else {
      std::cout << text;
    }
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
