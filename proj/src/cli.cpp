#include "gwtree/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gwtree/analytic.hpp"
#include "gwtree/exact_engine.hpp"
#include "gwtree/fit.hpp"
#include "gwtree/montecarlo.hpp"
#include "gwtree/properties.hpp"

namespace gwtree::cli {

namespace {

const std::vector<std::string> kCommands = {"exact",  "mc",     "sweep",    "decay",    "series",
                                            "disc",   "survival", "lambertw", "evenlevel"};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void make_app(CLI::App& app, RunConfig& cfg) {
  app.add_option("command", cfg.command, "exact | mc | sweep | decay | series | disc | survival | lambertw | evenlevel")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--property", cfg.property,
                 "root1, even1, flevel2:<even|odd|prime|list:a,b>, size-lt:<k>, size-eq:<n>, "
                 "size-ge:<k>, true, false; join with '+' for unions");
  app.add_option("--lambda", cfg.lambda, "value, or min:max:steps for sweeps");
  app.add_option("--k", cfg.k, "value, or min:max:step");
  app.add_option("--truncation", cfg.truncation, "witness | size")
      ->check(CLI::IsMember({"witness", "size"}));
  app.add_option("--method", cfg.method, "sweep: exact | mc; decay: mc | complex");
  app.add_option("--samples", cfg.samples, "Monte Carlo sample count")->check(CLI::PositiveNumber);
  app.add_option("--cap", cfg.cap, "per-node child cap for exact probabilities (0: automatic)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--nmax", cfg.nmax, "series terms (0: automatic from --tol)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--epsilon", cfg.epsilon, "disc majorant slack")->check(CLI::PositiveNumber);
  app.add_option("--points", cfg.points, "samples on the disc boundary")->check(CLI::PositiveNumber);
  app.add_option("--horizon", cfg.horizon, "ground-truth horizon K* (0: 5 * max k)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", cfg.seed, "master RNG seed");
  app.add_option("--x", cfg.x, "Lambert W argument(s), comma separated");
  app.add_option("--at", cfg.at, "series: evaluate at re,im");
  app.add_option("--tol", cfg.tol, "series remainder tolerance")->check(CLI::PositiveNumber);
  app.add_option("--root-level", cfg.root_level, "level assigned to the root (0 or 1)")
      ->check(CLI::Range(0, 1));
  app.add_option("--format", cfg.format, "csv | text")->check(CLI::IsMember({"csv", "text"}));
  app.add_option("--threads", cfg.threads, "worker threads (0: all cores); never changes results")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--out", cfg.out, "output file (default stdout)");
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("invalid number for ") + what + ": '" + s + "'");
  }
}

int parse_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("invalid integer for ") + what + ": '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double single_lambda(const RunConfig& cfg) {
  const auto ls = parse_lambda_range(cfg.lambda);
  if (ls.size() != 1) throw UsageError(cfg.command + " takes a single --lambda; use sweep for ranges");
  return ls.front();
}

int single_k(const RunConfig& cfg) {
  const auto ks = parse_k_range(cfg.k);
  if (ks.size() != 1) throw UsageError(cfg.command + " takes a single --k");
  return ks.front();
}

PropertyAutomaton base_property(const RunConfig& cfg) {
  try {
    return parse_property(cfg.property, cfg.root_level);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

TautProperty taut_property(const RunConfig& cfg, const PropertyAutomaton& base, int k) {
  if (cfg.truncation == "size") return truncate_by_size(base, k);
  // Non-monotone properties get the same "already True on k nodes" event.
  return base.monotone() ? truncate_by_witness(base, k) : determined_by(base, k);
}

void write_header(std::ostream& out, const RunConfig& cfg) {
  out << "# gwtree";
  for (const auto& a : canonical_args(cfg)) out << ' ' << a;
  out << '\n';
}

void write_fit_footer(std::ostream& out, const std::optional<LogLinearFit>& fit) {
  if (!fit) {
    out << "# fit: decay below MC resolution\n";
    return;
  }
  out << "# fit: slope=" << num(fit->slope) << " c_hat=" << num(-fit->slope)
      << " C_hat=" << num(std::exp(fit->intercept)) << " r_squared=" << num(fit->r_squared)
      << " points=" << fit->points << '\n';
}

MCOptions mc_options(const RunConfig& cfg) {
  MCOptions o;
  o.samples = cfg.samples;
  o.seed = cfg.seed;
  o.workers = cfg.threads;
  return o;
}

void write_interval_row(std::ostream& out, const std::string& prop, int k, double lambda,
                        const ProbInterval& iv) {
  out << csv_field(prop) << ',' << k << ',' << num(lambda) << ',' << num(iv.lower) << ','
      << num(iv.upper) << ',' << num(iv.tail_mass) << '\n';
}

int cmd_exact(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto base = base_property(cfg);
  const int k = single_k(cfg);
  const auto tp = taut_property(cfg, base, k);
  std::vector<double> lambdas = cfg.command == "sweep" ? parse_lambda_range(cfg.lambda)
                                                        : std::vector<double>{single_lambda(cfg)};
  write_header(out, cfg);
  out << "property,k,lambda,lower,upper,tail_mass\n";
  bool warned = false;
  for (double lambda : lambdas) {
    const int cap = cfg.cap > 0 ? cfg.cap : default_cap(lambda);
    const ProbInterval iv = exact_prob(tp, lambda, cap);
    if (iv.cap_warning && !warned) {
      err << "warning: cap " << cap << " leaves tail mass " << iv.tail_mass << " at lambda "
          << lambda << "; raise --cap\n";
      warned = true;
    }
    write_interval_row(out, cfg.property, k, lambda, iv);
  }
  return kExitOk;
}

int cmd_mc(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto base = base_property(cfg);
  const int k = single_k(cfg);
  const auto tp = taut_property(cfg, base, k);
  std::vector<double> lambdas = cfg.command == "sweep" ? parse_lambda_range(cfg.lambda)
                                                        : std::vector<double>{single_lambda(cfg)};
  write_header(out, cfg);
  out << "lambda,p_hat,ci_low,ci_high\n";
  for (double lambda : lambdas) {
    const MCEstimate e = estimate_prob(tp, lambda, mc_options(cfg));
    out << num(lambda) << ',' << num(e.p_hat) << ',' << num(e.ci_low) << ',' << num(e.ci_high) << '\n';
  }
  return kExitOk;
}

int effective_horizon(const RunConfig& cfg, const std::vector<int>& ks) {
  return cfg.horizon > 0 ? cfg.horizon : 5 * ks.back();
}

int cmd_decay(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto base = base_property(cfg);
  const double lambda = single_lambda(cfg);
  const auto ks = parse_k_range(cfg.k);
  if (cfg.method == "complex") {
    auto family = [&](int k) { return taut_property(cfg, base, k); };
    const auto rows = complex_decay(family, lambda, cfg.epsilon, ks, cfg.points);
    write_header(out, cfg);
    out << "k,sup_abs,remainder,real_value,exact_lower,exact_upper\n";
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
      out << r.k << ',' << num(r.sup_abs) << ',' << num(r.remainder) << ',' << num(r.real_value)
          << ',' << num(r.exact.lower) << ',' << num(r.exact.upper) << '\n';
      xs.push_back(r.k);
      ys.push_back(r.sup_abs);
    }
    out << "# delta=" << num(disc_radius(lambda, cfg.epsilon)) << '\n';
    write_fit_footer(out, fit_log_linear(xs, ys));
    return kExitOk;
  }
  if (cfg.truncation == "witness" && !base.monotone()) {
    throw UsageError("decay with witness truncation needs a monotone property; '" + cfg.property +
                     "' is not (try --truncation size)");
  }
  const int horizon = effective_horizon(cfg, ks);
  if (horizon < ks.back()) throw UsageError("--horizon must be at least max(k)");
  const DecayFit fit = sym_diff_decay(base, lambda, ks, horizon, mc_options(cfg),
                                      cfg.truncation == "size" ? Truncation::Size : Truncation::Witness);
  write_header(out, cfg);
  out << "k,estimate,ci_low,ci_high,n_samples\n";
  for (std::size_t i = 0; i < fit.ks.size(); ++i) {
    const auto& e = fit.estimates[i];
    out << fit.ks[i] << ',' << num(e.p_hat) << ',' << num(e.ci_low) << ',' << num(e.ci_high) << ','
        << e.n_samples << '\n';
  }
  out << "# ground truth at horizon " << horizon << "; undecided there: "
      << num(fit.undecided_at_horizon.p_hat) << " (ci_high " << num(fit.undecided_at_horizon.ci_high)
      << ") bounds the bias\n";
  write_fit_footer(out, fit.fit);
  return kExitOk;
}

std::complex<double> parse_complex(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("--at expects re,im");
  return {parse_double(parts[0], "--at"), parse_double(parts[1], "--at")};
}

int cmd_series(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto base = base_property(cfg);
  const int k = single_k(cfg);
  const auto tp = taut_property(cfg, base, k);
  if (!cfg.at.empty()) {
    const auto z = parse_complex(cfg.at);
    const int nmax = cfg.nmax > 0 ? cfg.nmax : series_terms_for(k, std::abs(z), z.real(), cfg.tol);
    const SeriesValue v = eval_series(series_coeffs(tp, nmax), z, cfg.tol);
    write_header(out, cfg);
    out << "re_z,im_z,re_f,im_f,remainder\n";
    out << num(z.real()) << ',' << num(z.imag()) << ',' << num(v.value.real()) << ','
        << num(v.value.imag()) << ',' << num(v.remainder) << '\n';
    if (!v.within_tolerance) {
      err << "error: series remainder " << v.remainder << " exceeds tolerance " << cfg.tol
          << " with nmax " << nmax << "\n";
      return kExitNumeric;
    }
    return kExitOk;
  }
  const double lambda = single_lambda(cfg);
  const int nmax = cfg.nmax > 0 ? cfg.nmax : series_terms_for(k, lambda, lambda, cfg.tol);
  const SeriesCoeffs c = series_coeffs(tp, nmax);
  write_header(out, cfg);
  out << "n,a_n\n";
  for (int n = 0; n <= c.nmax(); ++n) {
    if (!c.within_bound(n)) {
      err << "error: a_" << n << " exceeds k^n\n";
      return kExitNumeric;
    }
    out << n << ',' << c.a(n).get_str() << '\n';
  }
  return kExitOk;
}

int cmd_disc(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto base = base_property(cfg);
  const int k = single_k(cfg);
  const double lambda = single_lambda(cfg);
  const DiscReport r = disc_bound_check(taut_property(cfg, base, k), lambda, cfg.epsilon, cfg.points);
  write_header(out, cfg);
  out << "re_z,im_z,re_f,im_f,remainder\n";
  for (const auto& s : r.samples) {
    out << num(s.z.real()) << ',' << num(s.z.imag()) << ',' << num(s.f.real()) << ','
        << num(s.f.imag()) << ',' << num(s.remainder) << '\n';
  }
  out << "# delta=" << num(r.delta) << " nmax=" << r.nmax << " rhs_lower=" << num(r.rhs_lower)
      << " max_ratio=" << num(r.max_ratio) << '\n';
  if (!r.passes()) {
    err << "error: |f(z)| exceeds the (1+epsilon)^l majorant by ratio " << r.max_ratio << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int cmd_survival(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto lambdas = parse_lambda_range(cfg.lambda);
  if (cfg.format == "text") {
    for (double l : lambdas) {
      const auto r = survival_prob(l);
      out << "lambda = " << num(l) << ": s = " << num(r.s_fixed_point)
          << " (lambert " << num(r.s_lambert) << ", residual " << num(r.residual) << ")\n";
    }
    return kExitOk;
  }
  write_header(out, cfg);
  out << "lambda,s_fixed_point,s_lambert,residual\n";
  for (double l : lambdas) {
    const auto r = survival_prob(l);
    out << num(l) << ',' << num(r.s_fixed_point) << ',' << num(r.s_lambert) << ',' << num(r.residual) << '\n';
  }
  return kExitOk;
}

int cmd_lambertw(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  std::vector<double> xs;
  for (const auto& part : split(cfg.x, ',')) xs.push_back(parse_double(part, "--x"));
  std::vector<double> ws;
  for (double x : xs) {
    try {
      ws.push_back(lambert_w0(x));
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
  }
  if (cfg.format == "text") {
    for (std::size_t i = 0; i < xs.size(); ++i) out << "W0(" << num(xs[i]) << ") = " << num(ws[i]) << '\n';
    return kExitOk;
  }
  write_header(out, cfg);
  out << "x,w\n";
  for (std::size_t i = 0; i < xs.size(); ++i) out << num(xs[i]) << ',' << num(ws[i]) << '\n';
  return kExitOk;
}

int cmd_evenlevel(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const double lambda = single_lambda(cfg);
  const auto ks = parse_k_range(cfg.k);
  write_header(out, cfg);
  out << "k,estimate,ci_low,ci_high,n_samples\n";
  std::vector<double> xs, ys;
  for (int k : ks) {
    const MCEstimate e = even_level_tail(lambda, k, mc_options(cfg));
    out << k << ',' << num(e.p_hat) << ',' << num(e.ci_low) << ',' << num(e.ci_high) << ','
        << e.n_samples << '\n';
    xs.push_back(k);
    ys.push_back(e.p_hat);
  }
  write_fit_footer(out, fit_log_linear(xs, ys));
  return kExitOk;
}

}  // namespace

std::vector<double> parse_lambda_range(const std::string& text) {
  const auto parts = split(text, ':');
  std::vector<double> out;
  if (parts.size() == 1) {
    out.push_back(parse_double(parts[0], "--lambda"));
  } else if (parts.size() == 3) {
    const double lo = parse_double(parts[0], "--lambda");
    const double hi = parse_double(parts[1], "--lambda");
    const int steps = parse_int(parts[2], "--lambda steps");
    if (steps < 1 || hi < lo) throw UsageError("--lambda range needs min <= max and steps >= 1");
    if (steps > 1 && hi == lo) throw UsageError("--lambda range with several steps needs min < max");
    for (int i = 0; i < steps; ++i) {
      out.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
    }
  } else {
    throw UsageError("--lambda expects a value or min:max:steps");
  }
  for (double l : out) {
    if (!std::isfinite(l) || l <= 0.0) throw UsageError("--lambda values must be finite and positive");
  }
  return out;
}

std::vector<int> parse_k_range(const std::string& text) {
  const auto parts = split(text, ':');
  std::vector<int> out;
  if (parts.size() == 1) {
    out.push_back(parse_int(parts[0], "--k"));
  } else if (parts.size() == 3) {
    const int lo = parse_int(parts[0], "--k");
    const int hi = parse_int(parts[1], "--k");
    const int step = parse_int(parts[2], "--k step");
    if (step < 1 || hi < lo) throw UsageError("--k range needs min <= max and step >= 1");
    for (int k = lo; k <= hi; k += step) out.push_back(k);
  } else {
    throw UsageError("--k expects a value or min:max:step");
  }
  for (int k : out) {
    if (k < 1) throw UsageError("--k values must be >= 1");
  }
  return out;
}

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"gwtree", "gwtree"};
  make_app(app, cfg);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::vector<std::string> canonical_args(const RunConfig& cfg) {
  std::vector<std::string> a{cfg.command};
  auto add = [&](const char* flag, const std::string& value) {
    a.emplace_back(flag);
    a.push_back(value);
  };
  const std::string& c = cfg.command;
  const bool uses_property = c == "exact" || c == "mc" || c == "sweep" || c == "decay" ||
                             c == "series" || c == "disc";
  const bool randomized = c == "mc" || c == "evenlevel" || (c == "sweep" && cfg.method == "mc") ||
                          (c == "decay" && cfg.method != "complex");
  if (uses_property) {
    add("--property", cfg.property);
    add("--truncation", cfg.truncation);
    add("--root-level", std::to_string(cfg.root_level));
  }
  if (c != "lambertw" && !(c == "series" && !cfg.at.empty())) add("--lambda", cfg.lambda);
  if (c != "survival" && c != "lambertw") add("--k", cfg.k);
  if (!cfg.method.empty()) add("--method", cfg.method);
  if (c == "exact" || (c == "sweep" && cfg.method != "mc")) add("--cap", std::to_string(cfg.cap));
  if (randomized) {
    add("--samples", std::to_string(cfg.samples));
    add("--seed", std::to_string(cfg.seed));
  }
  if (c == "decay" && cfg.method != "complex") add("--horizon", std::to_string(cfg.horizon));
  if (c == "disc" || (c == "decay" && cfg.method == "complex")) {
    add("--epsilon", num(cfg.epsilon));
    add("--points", std::to_string(cfg.points));
  }
  if (c == "series") {
    add("--nmax", std::to_string(cfg.nmax));
    add("--tol", num(cfg.tol));
    if (!cfg.at.empty()) add("--at", cfg.at);
  }
  if (c == "lambertw") add("--x", cfg.x);
  if (c == "survival" || c == "lambertw") add("--format", cfg.format);
  return a;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const std::string& c = cfg.command;
    if (c == "exact") return cmd_exact(cfg, out, err);
    if (c == "sweep") {
      if (cfg.method.empty() || cfg.method == "exact") return cmd_exact(cfg, out, err);
      if (cfg.method == "mc") return cmd_mc(cfg, out, err);
      throw UsageError("sweep --method must be exact or mc");
    }
    if (c == "mc") return cmd_mc(cfg, out, err);
    if (c == "decay") {
      if (!cfg.method.empty() && cfg.method != "mc" && cfg.method != "complex") {
        throw UsageError("decay --method must be mc or complex");
      }
      return cmd_decay(cfg, out, err);
    }
    if (c == "series") return cmd_series(cfg, out, err);
    if (c == "disc") return cmd_disc(cfg, out, err);
    if (c == "survival") return cmd_survival(cfg, out, err);
    if (c == "lambertw") return cmd_lambertw(cfg, out, err);
    if (c == "evenlevel") return cmd_evenlevel(cfg, out, err);
    throw UsageError("unknown command '" + c + "'");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nrun with --help for the list of commands and flags\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  for (const auto& a : args) {
    if (a == "--help" || a == "-h") {
      RunConfig cfg;
      CLI::App app{"gwtree: probabilities of tree properties on Poisson Galton-Watson trees", "gwtree"};
      make_app(app, cfg);
      std::cout << app.help();
      return kExitOk;
    }
  }
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nrun with --help for the list of commands and flags\n";
    return kExitUsage;
  }
  if (cfg.out.empty()) return run(cfg, std::cout, std::cerr);
  std::ostringstream buffer;
  const int status = run(cfg, buffer, std::cerr);
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) {
    std::cerr << "error: cannot open " << cfg.out << " for writing\n";
    return kExitUsage;
  }
  file << buffer.str();
  return status;
}

}  // namespace gwtree::cli
