// Scenario-driven front end: cost constants, sweeps, rate fits, HUM control
// synthesis and verification, transform checks, and the inequality-chain
// drivers. Every run is deterministic: fixed decimal formatting, covering
// precision for pooled sweeps, and index-ordered output rows.

#include <obslab/asymptotics.hpp>
#include <obslab/costs.hpp>
#include <obslab/csvio.hpp>
#include <obslab/hum.hpp>
#include <obslab/svgplot.hpp>
#include <obslab/transform.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace obslab;

Real parse_real(const std::string& s, const std::string& what) {
  try {
    return Real(trim(s));
  } catch (const std::exception&) {
    throw InvalidInput("cli_runner", "cannot parse " + what + ": '" + s + "'");
  }
}

std::vector<Real> parse_real_list(const std::string& csv, const std::string& what) {
  std::vector<Real> out;
  for (const auto& f : split(csv, ',')) {
    const std::string t = trim(f);
    if (t.empty()) continue;
    out.push_back(parse_real(t, what));
  }
  if (out.empty()) throw InvalidInput("cli_runner", what + " list is empty");
  return out;
}

void require_strictly_monotone(const std::vector<Real>& v, const std::string& what) {
  if (v.size() < 2) return;
  const bool inc = v[1] > v[0];
  for (std::size_t i = 1; i < v.size(); ++i) {
    const bool step = inc ? v[i] > v[i - 1] : v[i] < v[i - 1];
    if (!step) throw InvalidInput("cli_runner", what + " grid must be strictly monotone");
  }
}

// "-" means stdout
void write_text(const std::string& path, const std::string& content) {
  if (path == "-" || path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cli_runner", "cannot open output file: " + path);
  out << content;
  if (!out) throw InvalidInput("cli_runner", "write failed: " + path);
}

struct CommonOpts {
  std::string L = "1", T = "1", M, eps;
  int N = 12;
  int precision = 0;
  std::string rel_tol = "1e-6";
  std::string out = "-";
  bool raw = false;
  int jobs = 1;

  int digits() const { return raw ? 0 : 20; }
};

void add_common(CLI::App* sub, CommonOpts& o, bool with_T = true) {
  sub->add_option("--L", o.L, "interval length")->capture_default_str();
  if (with_T) sub->add_option("--T", o.T, "time horizon")->capture_default_str();
  sub->add_option("--N", o.N, "truncation order")->capture_default_str();
  sub->add_option("--precision", o.precision, "mantissa bits (0 = policy default)")
      ->capture_default_str();
  sub->add_option("--rel-tol", o.rel_tol, "convergence-plateau relative tolerance")
      ->capture_default_str();
  sub->add_option("--out", o.out, "output CSV path ('-' = stdout)")->capture_default_str();
  sub->add_flag("--raw", o.raw, "emit full internal precision instead of 20 digits");
  sub->set_config("--config", "", "key = value config file ('#' comments); flags override");
}

ProblemSpec build_spec(CostKind kind, const CommonOpts& o) {
  const Real L = parse_real(o.L, "L");
  if (kind == CostKind::CTD) {
    if (o.M.empty() || o.eps.empty())
      throw InvalidInput("cli_runner", "kind ctd requires --M and --eps");
    return ProblemSpec::transport_diffusion(L, parse_real(o.M, "M"), parse_real(o.eps, "eps"));
  }
  if (!o.M.empty() || !o.eps.empty())
    throw InvalidInput("cli_runner", "--M/--eps only apply to kind ctd");
  return ProblemSpec::heat(L);
}

// ---- cost -------------------------------------------------------------------

int run_cost(const CommonOpts& o, const std::string& kind_name) {
  const CostKind kind = parse_cost_kind(kind_name);
  const ProblemSpec spec = build_spec(kind, o);
  const CostEstimate est = observability_cost(kind, spec, parse_real(o.T, "T"), o.N, o.precision,
                                              parse_real(o.rel_tol, "rel-tol"));
  write_text(o.out, cost_csv_header() + "\n" + cost_csv_row(est, o.digits()) + "\n");
  return 0;
}

// ---- sweeps -----------------------------------------------------------------

struct SweepExtras {
  std::string fit_out, plot;
  std::string tail_fraction = "1";
};

void emit_sweep_outputs(const std::vector<CostEstimate>& ests,
                        const std::vector<Real>& parameters, const CommonOpts& o,
                        const SweepExtras& x, const std::string& xaxis_name,
                        std::optional<FitResult> prefit = std::nullopt) {
  std::string csv = cost_csv_header() + "\n";
  for (const auto& e : ests) csv += cost_csv_row(e, o.digits()) + "\n";
  write_text(o.out, csv);

  if (x.fit_out.empty() && x.plot.empty()) return;
  std::optional<FitResult> fit = std::move(prefit);
  if (!fit) {
    std::vector<std::pair<Real, Real>> samples;
    for (std::size_t i = 0; i < ests.size(); ++i)
      if (ests[i].converged) samples.emplace_back(parameters[i], ests[i].value);
    if (samples.size() < 3)
      throw ConvergenceFailure("cli_runner",
                               "fewer than 3 converged samples for the rate fit",
                               Real(static_cast<int>(samples.size())));
    fit = fit_rate(std::move(samples), parse_real(x.tail_fraction, "tail-fraction"));
  }
  if (!x.fit_out.empty())
    write_text(x.fit_out, fit_csv_header() + "\n" + fit_csv_row(*fit, o.digits()) + "\n");
  if (!x.plot.empty()) {
    PlotSeries s;
    s.name = "ln C";
    for (const auto& [p, c] : fit->samples)
      s.points.emplace_back(to_double(1 / p), to_double(log(c)));
    FitOverlay overlay;
    overlay.enabled = true;
    overlay.rate = to_double(fit->rate);
    overlay.intercept = to_double(fit->intercept);
    emit_plot(x.plot, {s}, overlay, "cost growth", xaxis_name, "ln C");
  }
}

int run_sweep_T(const CommonOpts& o, const std::string& kind_name, const std::string& t_list,
                const SweepExtras& x) {
  const CostKind kind = parse_cost_kind(kind_name);
  const ProblemSpec spec = build_spec(kind, o);
  const std::vector<Real> Ts = parse_real_list(t_list, "T");
  require_strictly_monotone(Ts, "T");
  std::vector<SweepPoint> points;
  for (const Real& T : Ts) points.push_back({spec, T});
  const auto ests = cost_sweep(kind, points, o.N, o.precision, parse_real(o.rel_tol, "rel-tol"),
                               o.jobs);
  emit_sweep_outputs(ests, Ts, o, x, "1/T");
  return 0;
}

int run_sweep_eps(const CommonOpts& o, const std::string& eps_list, const SweepExtras& x) {
  if (o.M.empty()) throw InvalidInput("cli_runner", "sweep-eps requires --M");
  const std::vector<Real> grid = parse_real_list(eps_list, "eps");
  const EpsSweepResult res =
      eps_sweep(parse_real(o.T, "T"), parse_real(o.L, "L"), parse_real(o.M, "M"), grid, o.N,
                o.precision, parse_real(o.rel_tol, "rel-tol"), o.jobs);
  emit_sweep_outputs(res.estimates, grid, o, x, "1/eps", res.fit);
  return 0;
}

// ---- fit --------------------------------------------------------------------

int run_fit(const std::string& in, const std::string& tail_fraction, const CommonOpts& o) {
  const auto samples = read_samples_csv_file(in);
  const FitResult fit = fit_rate(samples, parse_real(tail_fraction, "tail-fraction"));
  write_text(o.out, fit_csv_header() + "\n" + fit_csv_row(fit, o.digits()) + "\n");
  return 0;
}

// ---- hum --------------------------------------------------------------------

struct HumOpts {
  std::string y0 = "1";
  std::string control_out;
  int control_samples = 200;
  int nx = 400, nt = 12000;
  std::string scheme = "cn";
  bool verify = false;
};

int run_hum(const CommonOpts& o, const HumOpts& h) {
  const Real L = parse_real(o.L, "L");
  const Real T = parse_real(o.T, "T");
  ProblemSpec spec = o.M.empty() && o.eps.empty()
                         ? ProblemSpec::heat(L)
                         : ProblemSpec::transport_diffusion(L, parse_real(o.M, "M"),
                                                            parse_real(o.eps, "eps"));
  const std::vector<Real> coeffs = parse_real_list(h.y0, "y0");
  VecR c(static_cast<int>(coeffs.size()));
  for (std::size_t i = 0; i < coeffs.size(); ++i) c[static_cast<int>(i)] = coeffs[i];
  const ModeVector y0 = ModeVector::of(spec, c);

  const ControlFunction u = hum_control(y0, T, o.N, o.precision);
  std::string report = "key,value\n";
  report += "norm_l2," + format_real(u.norm_L2, o.digits()) + "\n";
  report += "precision_bits," + std::to_string(u.precision_bits) + "\n";

  if (h.verify) {
    fd::Grid grid;
    grid.nx = h.nx;
    grid.nt = h.nt;
    grid.L = to_double(spec.L);
    grid.T = to_double(T);
    if (h.scheme == "cn")
      grid.scheme = fd::Scheme::CrankNicolson;
    else if (h.scheme == "ie")
      grid.scheme = fd::Scheme::ImplicitEuler;
    else
      throw InvalidInput("cli_runner", "scheme must be cn or ie");
    const NullCheckResult r = verify_null(y0, u, grid);
    report += "ratio," + format_real(r.ratio, o.digits()) + "\n";
    report += "raw_ratio," + format_real(r.raw_ratio, o.digits()) + "\n";
    report += "discretization_estimate," + format_real(r.discretization_estimate, o.digits()) +
              "\n";
    report += std::string("grid_too_coarse,") + (r.grid_too_coarse ? "true" : "false") + "\n";
    report += std::string("peclet_warning,") + (r.peclet_warning ? "true" : "false") + "\n";
  }
  write_text(o.out, report);

  if (!h.control_out.empty()) {
    std::ofstream out(h.control_out, std::ios::binary);
    if (!out) throw InvalidInput("cli_runner", "cannot open output file: " + h.control_out);
    export_control_csv(out, u, h.control_samples, o.digits());
  }
  return 0;
}

// ---- verify-transform ---------------------------------------------------------

int run_verify_transform(const CommonOpts& o, int k_max, int t_count, const std::string& h_str) {
  if (o.M.empty() || o.eps.empty())
    throw InvalidInput("cli_runner", "verify-transform requires --M and --eps");
  const ProblemSpec spec = ProblemSpec::transport_diffusion(
      parse_real(o.L, "L"), parse_real(o.M, "M"), parse_real(o.eps, "eps"));
  const TransformParams params = TransformParams::of(spec);
  if (k_max < 1 || t_count < 2) throw InvalidInput("cli_runner", "need k-max >= 1, t-count >= 2");
  const Real h = parse_real(h_str, "h");

  // mode-to-mode identity on a (t, x) sample grid; phi lives on (0, eps * 1)
  const ProblemSpec heat = ProblemSpec::heat(spec.L);
  Real mode_dev = Real(0);
  for (int k = 1; k <= k_max; ++k) {
    Evaluator psi = [spec, k](const Real& t, const Real& x) {
      return adjoint_mode(spec, k, t, x);
    };
    const Evaluator phi = map_psi_to_phi(psi, params);
    for (int it = 0; it < t_count; ++it)
      for (int ix = 1; ix <= 7; ++ix) {
        const Real t = spec.eps * it / (t_count - 1);
        const Real x = spec.L * ix / 8;
        const Real dev = abs(phi(t, x) - adjoint_mode(heat, k, t, x));
        if (dev > mode_dev) mode_dev = dev;
      }
  }

  Evaluator psi1 = [spec](const Real& t, const Real& x) { return adjoint_mode(spec, 1, t, x); };
  std::vector<Real> t_samples;
  for (int it = 0; it < t_count; ++it) t_samples.push_back(spec.eps * it / (t_count - 1));
  const Real boundary_dev = boundary_identity_check(psi1, params, t_samples, h);

  std::string report = "key,value\n";
  report += "mode_identity_max," + format_real(mode_dev, o.digits()) + "\n";
  report += "boundary_identity_max," + format_real(boundary_dev, o.digits()) + "\n";
  report += "h," + format_real(h, o.digits()) + "\n";
  write_text(o.out, report);
  return 0;
}

// ---- critical-times -----------------------------------------------------------

int run_critical_times(const CommonOpts& o, const std::string& a_str, const std::string& b_str) {
  if (o.M.empty()) throw InvalidInput("cli_runner", "critical-times requires --M");
  const Real M = parse_real(o.M, "M");
  const Regime regime = M > 0 ? Regime::Mpos : Regime::Mneg;
  const Real root = critical_times(parse_real(o.L, "L"), M, regime, parse_real(a_str, "a"),
                                   parse_real(b_str, "b"));
  write_text(o.out, format_real(root, o.digits()) + "\n");
  return 0;
}

// ---- prop1 --------------------------------------------------------------------

int run_prop1(const CommonOpts& o, const std::string& in, const std::string& K_str) {
  const auto samples = read_samples_csv_file(in);
  const Prop1Result res = prop1_verify(samples, parse_real(o.L, "L"), parse_real(K_str, "K"));
  std::string report = "key,value\n";
  report += std::string("pass,") + (res.pass ? "true" : "false") + "\n";
  report += "r," + format_real(res.r, o.digits()) + "\n";
  report += "C," + format_real(res.C, o.digits()) + "\n";
  report += "slope," + format_real(res.slope, o.digits()) + "\n";
  write_text(o.out, report);
  return res.pass ? 0 : 5;
}

// ---- theorem-chain --------------------------------------------------------------

int run_theorem_chain(const CommonOpts& o, const std::string& eps_list, const std::string& a_str,
                      const std::string& b_str, const std::string& cint_in, bool compute_cint) {
  if (o.M.empty()) throw InvalidInput("cli_runner", "theorem-chain requires --M");
  const Real L = parse_real(o.L, "L");
  const Real M = parse_real(o.M, "M");
  const Real T = parse_real(o.T, "T");
  const Real a = parse_real(a_str, "a");
  const Real b = parse_real(b_str, "b");
  const std::vector<Real> grid = parse_real_list(eps_list, "eps");

  std::vector<ChainSample> samples;
  if (!cint_in.empty()) {
    for (const auto& [p, v] : read_samples_csv_file(cint_in)) samples.push_back({p, v});
  } else if (compute_cint) {
    const ProblemSpec heat = ProblemSpec::heat(L);
    for (const Real& eps : grid) {
      const Real horizon = eps * b * T;
      const CostEstimate est = observability_cost(CostKind::Cint, heat, horizon, o.N,
                                                  o.precision, parse_real(o.rel_tol, "rel-tol"));
      samples.push_back({horizon, est.value});
    }
  } else {
    throw InvalidInput("cli_runner", "theorem-chain needs --cint-in or --compute-cint");
  }

  std::string csv = "eps,horizon,cint,exponent,bound\n";
  for (const Real& eps : grid) {
    if (!(eps > 0) || !(eps < 1))
      throw InvalidInput("cli_runner", "viscosities must lie in (0,1)");
    TransformParams params{M, eps, L};
    const Real bound = theorem_chain_bound(samples, params, T, a, b);
    const Real horizon = eps * b * T;
    Real cint;
    for (const auto& s : samples)
      if (abs(s.T_tilde - horizon) <= abs(horizon) * Real("1e-25")) cint = s.value;
    const Real expo = chain_exponent_over_inv_eps(L, M, T, a, b) / eps;
    csv += format_real(eps, o.digits()) + ',' + format_real(horizon, o.digits()) + ',' +
           format_real(cint, o.digits()) + ',' + format_real(expo, o.digits()) + ',' +
           format_real(bound, o.digits()) + '\n';
  }
  write_text(o.out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for boundary-control costs of 1-D heat and "
               "transport-diffusion systems"};
  app.require_subcommand(0, 1);

  int exit_code = 0;

  // cost
  auto* cost = app.add_subcommand("cost", "one cost constant as a CSV row");
  static CommonOpts cost_o;
  static std::string cost_kind = "cd";
  cost->add_option("--kind", cost_kind, "cd|cint|cfin|ctd")->capture_default_str();
  cost->add_option("--M", cost_o.M, "transport speed (ctd only)");
  cost->add_option("--eps", cost_o.eps, "viscosity (ctd only)");
  add_common(cost, cost_o);
  cost->callback([&] { exit_code = run_cost(cost_o, cost_kind); });

  // sweep-T
  auto* sweepT = app.add_subcommand("sweep-T", "cost constants over a horizon grid");
  static CommonOpts sweepT_o;
  static std::string sweepT_kind = "cd", sweepT_list;
  static SweepExtras sweepT_x;
  sweepT->add_option("--kind", sweepT_kind, "cd|cint|cfin|ctd")->capture_default_str();
  sweepT->add_option("--T-grid", sweepT_list, "comma-separated horizons (strictly monotone)")
      ->required();
  sweepT->add_option("--M", sweepT_o.M, "transport speed (ctd only)");
  sweepT->add_option("--eps", sweepT_o.eps, "viscosity (ctd only)");
  sweepT->add_option("--jobs", sweepT_o.jobs, "worker threads")->capture_default_str();
  sweepT->add_option("--fit-out", sweepT_x.fit_out, "write rate-fit CSV here");
  sweepT->add_option("--plot", sweepT_x.plot, "write an SVG of ln C vs 1/T here");
  sweepT->add_option("--tail-fraction", sweepT_x.tail_fraction, "fit tail fraction")
      ->capture_default_str();
  add_common(sweepT, sweepT_o, /*with_T=*/false);
  sweepT->callback([&] { exit_code = run_sweep_T(sweepT_o, sweepT_kind, sweepT_list, sweepT_x); });

  // sweep-eps
  auto* sweepE = app.add_subcommand("sweep-eps", "transport-diffusion cost over a viscosity grid");
  static CommonOpts sweepE_o;
  static std::string sweepE_list;
  static SweepExtras sweepE_x;
  sweepE_o.rel_tol = "0.01";
  sweepE->add_option("--M", sweepE_o.M, "transport speed")->required();
  sweepE->add_option("--eps-grid", sweepE_list, "comma-separated viscosities, decreasing")
      ->required();
  sweepE->add_option("--jobs", sweepE_o.jobs, "worker threads")->capture_default_str();
  sweepE->add_option("--fit-out", sweepE_x.fit_out, "write rate-fit CSV here");
  sweepE->add_option("--plot", sweepE_x.plot, "write an SVG of ln C vs 1/eps here");
  add_common(sweepE, sweepE_o);
  sweepE->callback([&] { exit_code = run_sweep_eps(sweepE_o, sweepE_list, sweepE_x); });

  // fit
  auto* fit = app.add_subcommand("fit", "exponential-rate fit of (parameter,value) samples");
  static CommonOpts fit_o;
  static std::string fit_in, fit_tail = "1";
  fit->add_option("--in", fit_in, "input CSV (parameter,value)")->required();
  fit->add_option("--tail-fraction", fit_tail, "fraction of smallest parameters to fit")
      ->capture_default_str();
  add_common(fit, fit_o, /*with_T=*/false);
  fit->callback([&] { exit_code = run_fit(fit_in, fit_tail, fit_o); });

  // hum
  auto* hum = app.add_subcommand("hum", "synthesize the minimal-norm boundary control");
  static CommonOpts hum_o;
  hum_o.T = "0.5";
  hum_o.N = 8;
  static HumOpts hum_h;
  hum->add_option("--M", hum_o.M, "transport speed (transport-diffusion)");
  hum->add_option("--eps", hum_o.eps, "viscosity (transport-diffusion)");
  hum->add_option("--y0", hum_h.y0, "datum sine coefficients, comma-separated")
      ->capture_default_str();
  hum->add_option("--control-out", hum_h.control_out, "write (t,u) samples CSV here");
  hum->add_option("--control-samples", hum_h.control_samples, "sample count for --control-out")
      ->capture_default_str();
  hum->add_flag("--verify", hum_h.verify, "run the forward finite-difference null check");
  hum->add_option("--nx", hum_h.nx, "interior grid points for --verify")->capture_default_str();
  hum->add_option("--nt", hum_h.nt, "time steps for --verify")->capture_default_str();
  hum->add_option("--scheme", hum_h.scheme, "cn|ie")->capture_default_str();
  add_common(hum, hum_o);
  hum->callback([&] { exit_code = run_hum(hum_o, hum_h); });

  // verify-transform
  auto* vt = app.add_subcommand("verify-transform",
                                "mode-to-mode and boundary-flux identities of the change of "
                                "variables");
  vt->set_help_flag("--help", "print this help");  // frees -h for the --h step option
  static CommonOpts vt_o;
  static int vt_kmax = 20, vt_tcount = 9;
  static std::string vt_h = "1e-4";
  vt->add_option("--M", vt_o.M, "transport speed")->required();
  vt->add_option("--eps", vt_o.eps, "viscosity")->required();
  vt->add_option("--k-max", vt_kmax, "check modes 1..k-max")->capture_default_str();
  vt->add_option("--t-count", vt_tcount, "time samples")->capture_default_str();
  vt->add_option("--h", vt_h, "stencil step for the boundary identity")->capture_default_str();
  add_common(vt, vt_o, /*with_T=*/false);
  vt->callback([&] { exit_code = run_verify_transform(vt_o, vt_kmax, vt_tcount, vt_h); });

  // critical-times
  auto* ct = app.add_subcommand("critical-times", "positive root of the chain-exponent "
                                                  "polynomial");
  static CommonOpts ct_o;
  static std::string ct_a = "1", ct_b = "0";
  ct->add_option("--M", ct_o.M, "transport speed (sign selects the regime)")->required();
  ct->add_option("--a", ct_a, "a in (0,1]")->capture_default_str();
  ct->add_option("--b", ct_b, "b in [0,1)")->capture_default_str();
  add_common(ct, ct_o, /*with_T=*/false);
  ct->callback([&] { exit_code = run_critical_times(ct_o, ct_a, ct_b); });

  // prop1
  auto* p1 = app.add_subcommand("prop1", "bounded-ratio verifier for the dissipation argument");
  static CommonOpts p1_o;
  static std::string p1_in, p1_K;
  p1->add_option("--in", p1_in, "Cint samples CSV (T,value)")->required();
  p1->add_option("--K", p1_K, "target rate, must exceed L^2/4")->required();
  add_common(p1, p1_o, /*with_T=*/false);
  p1->callback([&] { exit_code = run_prop1(p1_o, p1_in, p1_K); });

  // theorem-chain
  auto* tc = app.add_subcommand("theorem-chain", "explicit chain bound on the squared "
                                                 "transport-diffusion cost");
  static CommonOpts tc_o;
  static std::string tc_eps, tc_a = "0.9", tc_b = "0.1", tc_cint;
  static bool tc_compute = false;
  tc->add_option("--M", tc_o.M, "transport speed")->required();
  tc->add_option("--eps-grid", tc_eps, "comma-separated viscosities")->required();
  tc->add_option("--a", tc_a, "a in (0,1)")->capture_default_str();
  tc->add_option("--b", tc_b, "b in (0,1)")->capture_default_str();
  tc->add_option("--cint-in", tc_cint, "Cint samples CSV at the exact horizons eps*b*T");
  tc->add_flag("--compute-cint", tc_compute, "compute Cint at the required horizons");
  add_common(tc, tc_o);
  tc->callback(
      [&] { exit_code = run_theorem_chain(tc_o, tc_eps, tc_a, tc_b, tc_cint, tc_compute); });

  // Config files are handled by hand: the parser only processes files
  // attached to the root command, but --config belongs to the subcommand
  // being run. Each `key = value` line becomes an injected --key flag unless
  // the command line already carries it, so explicit flags always win. An
  // explicitly supplied config file must exist and contain a setting.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      config_path = args[i].substr(9);
  }
  if (!config_path.empty()) {
    std::ifstream cfg(config_path);
    std::vector<std::pair<std::string, std::string>> settings;
    std::string line;
    while (cfg && std::getline(cfg, line)) {
      const std::string t = obslab::trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) continue;
      settings.emplace_back(obslab::trim(t.substr(0, eq)), obslab::trim(t.substr(eq + 1)));
    }
    if (settings.empty()) {
      nlohmann::json j;
      j["error"] = {{"module", "cli_runner"},
                    {"message", "config file missing or empty: " + config_path}};
      std::cerr << j.dump() << "\n";
      std::cerr << app.help() << std::flush;
      return 2;
    }
    for (const auto& [key, value] : settings) {
      const std::string flag = "--" + key;
      bool given = false;
      for (const auto& a : args)
        if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
      if (!given) {
        args.push_back(flag);
        args.push_back(value);
      }
    }
  }
  std::reverse(args.begin(), args.end());  // the vector overload parses back to front

  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::json j;
    j["error"] = {{"module", "cli_runner"}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    std::cerr << app.help() << std::flush;
    return 2;
  } catch (const obslab::Error& e) {
    nlohmann::json j;
    j["error"] = {{"module", e.module()}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return e.module() == "cli_runner" ? 2 : 3;
  } catch (const std::exception& e) {
    nlohmann::json j;
    j["error"] = {{"module", "cli_runner"}, {"message", e.what()}};
    std::cerr << j.dump() << "\n";
    return 3;
  }

  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 2;
  }
  return exit_code;
}
