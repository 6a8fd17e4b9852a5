#include "wildqr/cli.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "wildqr/bootstrap.hpp"
#include "wildqr/io.hpp"
#include "wildqr/montecarlo.hpp"
#include "wildqr/penalty.hpp"
#include "wildqr/rng.hpp"
#include "wildqr/solver.hpp"
#include "wildqr/tuning.hpp"
#include "wildqr/weight_laws.hpp"

namespace wildqr {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

LawKind parse_law(const std::string& name) {
  if (name == "two-point") return LawKind::TwoPoint;
  if (name == "feng") return LawKind::FengContinuous;
  if (name == "g1") return LawKind::SuppG1;
  if (name == "g2") return LawKind::SuppG2;
  if (name == "point-mass") return LawKind::SuppPointMass;
  throw UsageError("unknown weight law '" + name +
                   "' (choices: two-point, feng, g1, g2, point-mass)");
}

std::map<std::string, double> parse_law_params(const std::vector<std::string>& kvs) {
  std::map<std::string, double> params;
  for (const auto& kv : kvs) {
    const std::size_t pos = kv.find('=');
    if (pos == std::string::npos || pos == 0 || pos + 1 == kv.size())
      throw UsageError("--law-params expects key=value, got '" + kv + "'");
    double value = 0.0;
    const char* first = kv.data() + pos + 1;
    const char* last = kv.data() + kv.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
      throw UsageError("--law-params value is not a number in '" + kv + "'");
    params[kv.substr(0, pos)] = value;
  }
  return params;
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("WILDQR_THREADS")) {
    int value = 0;
    const auto* last = env + std::string(env).size();
    auto [ptr, ec] = std::from_chars(env, last, value);
    if (ec == std::errc{} && ptr == last && value >= 1) return value;
    throw UsageError("WILDQR_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
  return 1;
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CsvError("cannot write output file: " + path);
  f << text;
}

Json meta_block(const char* command) {
  Json m = Json::object();
  m.set("tool", Json::str("wildqr"));
  m.set("version", Json::str(kCliVersion));
  m.set("command", Json::str(command));
  return m;
}

// Shared option bundle; each subcommand registers the subset it supports.
struct Opts {
  std::string input;
  std::string output;
  std::string format = "json";
  double tau = 0.5;
  std::string penalty = "none";
  double gamma = 1.0;
  double lambda = 0.0;
  std::string tune;
  int cv_folds = 5;
  double a_n = 0.0;
  std::string a_n_rule;
  std::string law = "two-point";
  std::vector<std::string> law_params;
  long long boot = 400;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;
  // simulate only
  long long n = 100;
  long long reps = 400;
  std::string methods = "newal";
  // verify-weights only
  long long mc = 100000;
  double tol = 0.02;
};

struct LambdaChoice {
  double value = 0.0;
  std::string how;  // fixed | bic | cv
};

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("--alpha must lie strictly in (0,1)");
}

// count() on an option the subcommand does not define throws; probe first
bool given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

// penalty-flag consistency shared by fit and ci
void check_penalty_flags(const CLI::App* sub, const Opts& o, bool allow_threshold) {
  const bool has_lambda = given(sub, "--lambda");
  const bool has_tune = given(sub, "--tune");
  const bool has_gamma = given(sub, "--gamma");
  const bool has_an = given(sub, "--a-n");
  const bool has_an_rule = given(sub, "--a-n-rule");

  if (has_lambda && has_tune) throw UsageError("--lambda and --tune are mutually exclusive");
  if (has_an && has_an_rule) throw UsageError("--a-n and --a-n-rule are mutually exclusive");
  if (o.penalty == "none") {
    if (has_lambda || has_tune) throw UsageError("--lambda/--tune require a penalized fit");
    if (has_gamma) throw UsageError("--gamma requires --penalty alasso");
    if (has_an || has_an_rule) throw UsageError("--a-n flags require --penalty lasso");
    return;
  }
  if (o.penalty == "lasso") {
    if (has_gamma) throw UsageError("--gamma applies to alasso, not lasso");
    if (has_tune && o.tune != "cv") throw UsageError("lasso tunes by cross-validation: --tune cv");
    if (!allow_threshold && (has_an || has_an_rule))
      throw UsageError("--a-n flags apply to the ci command only");
    return;
  }
  if (o.penalty == "alasso") {
    if (has_an || has_an_rule) throw UsageError("--a-n flags apply to --penalty lasso");
    if (has_tune && o.tune != "bic") throw UsageError("alasso tunes by BIC: --tune bic");
    if (o.gamma <= 0.0) throw UsageError("--gamma must be positive");
    return;
  }
  throw UsageError("unknown penalty '" + o.penalty + "' (choices: none, lasso, alasso)");
}

LambdaChoice resolve_lambda(const CLI::App* sub, const Opts& o, const Dataset& data,
                            const QuantileLevel& tau, std::uint64_t tune_seed) {
  if (given(sub, "--lambda")) {
    if (!(o.lambda >= 0.0)) throw UsageError("--lambda must be nonnegative");
    return {o.lambda, "fixed"};
  }
  if (!given(sub, "--tune"))
    throw UsageError("penalized fits need --lambda or --tune");
  if (data.p() < 2)
    throw UsageError("tuning needs at least 2 covariates; pass --lambda explicitly");
  const LambdaGrid grid = default_grid(data.n(), data.p());
  if (o.tune == "bic") return {bic_select(data, tau, o.gamma, grid).selected, "bic"};
  if (o.tune == "cv")
    return {cv_select(data, tau, grid, o.cv_folds, tune_seed).selected, "cv"};
  throw UsageError("unknown tune rule '" + o.tune + "' (choices: bic, cv)");
}

Json law_json(const WeightLaw& law, const std::string& name) {
  Json j = Json::object();
  j.set("kind", Json::str(name));
  Json params = Json::object();
  for (const auto& [k, v] : law.params) params.set(k, Json::num(v));
  j.set("params", std::move(params));
  return j;
}

// ---------------------------------------------------------------- fit

int do_fit(const CLI::App* sub, const Opts& o, std::ostream& out) {
  if (o.format != "json") throw UsageError("fit emits JSON only");
  check_penalty_flags(sub, o, false);
  const QuantileLevel tau(o.tau);
  const Dataset data = read_csv_dataset(o.input);

  Json config = Json::object();
  config.set("input", Json::str(o.input));
  config.set("tau", Json::num(o.tau));
  config.set("penalty", Json::str(o.penalty));
  if (o.penalty == "alasso") config.set("gamma", Json::num(o.gamma));
  config.set("seed", Json::integer(static_cast<long long>(o.seed)));

  FitResult fit;
  std::optional<LambdaChoice> lambda;
  if (o.penalty == "none") {
    fit = fit_unpenalized(data, tau);
  } else {
    lambda = resolve_lambda(sub, o, data, tau, o.seed);
    fit = o.penalty == "lasso" ? fit_lasso(data, tau, lambda->value)
                               : fit_adaptive(data, tau, lambda->value, o.gamma);
  }

  Json root = Json::object();
  root.set("meta", meta_block("fit"));
  root.set("config", std::move(config));
  if (lambda) {
    Json lj = Json::object();
    lj.set("value", Json::num(lambda->value));
    lj.set("chosen_by", Json::str(lambda->how));
    root.set("lambda", std::move(lj));
  }
  Json beta = Json::object();
  for (Index j = 0; j <= data.p(); ++j)
    beta.set(data.names[static_cast<std::size_t>(j)], Json::num(fit.beta[j]));
  root.set("coefficients", std::move(beta));
  Json active = Json::array();
  for (Index j : fit.active_set) active.push(Json::str(data.names[static_cast<std::size_t>(j)]));
  root.set("active_set", std::move(active));
  root.set("objective", Json::num(fit.objective));
  root.set("kkt_gap", Json::num(fit.kkt_gap));
  root.set("iterations", Json::integer(fit.iterations));

  write_output(root.dump(), o.output, out);
  return 0;
}

// ---------------------------------------------------------------- ci

int do_ci(const CLI::App* sub, const Opts& o, std::ostream& out) {
  if (o.format != "json" && o.format != "csv")
    throw UsageError("--format must be json or csv");
  check_penalty_flags(sub, o, true);
  check_alpha(o.alpha);
  const QuantileLevel tau(o.tau);
  const LawKind law_kind = parse_law(o.law);
  const WeightLaw law = make_law(law_kind, tau, parse_law_params(o.law_params));
  const int threads = resolve_threads(o.threads);
  const Dataset data = read_csv_dataset(o.input);
  const Index B = static_cast<Index>(o.boot);

  // streams: bootstrap replicates consume derive_stream(seed, b); tuning and
  // the data-driven threshold sit far outside that range
  const std::uint64_t tune_seed = derive_stream(o.seed, 1000003);
  const std::uint64_t an_seed = derive_stream(o.seed, 1000007);

  std::optional<LambdaChoice> lambda;
  std::optional<ThresholdSequence> a_seq;
  BootstrapDraws draws;
  if (o.penalty == "none") {
    draws = bootstrap_unpenalized(data, tau, law, B, o.seed, threads);
  } else if (o.penalty == "alasso") {
    lambda = resolve_lambda(sub, o, data, tau, tune_seed);
    draws = bootstrap_adaptive(data, tau, lambda->value, o.gamma, law, B, o.seed, threads);
  } else {
    lambda = resolve_lambda(sub, o, data, tau, tune_seed);
    if (given(sub, "--a-n")) {
      if (!(o.a_n > 0.0)) throw UsageError("--a-n must be positive");
      a_seq = ThresholdSequence::fixed(o.a_n);
    } else if (o.a_n_rule == "data") {
      const double a = select_a_n(data, tau, lambda->value, default_a_candidates(data.n()), law,
                                  100, an_seed, ThresholdSource::Lasso)
                           .selected;
      a_seq = ThresholdSequence::data_driven(a);
    } else if (o.a_n_rule.empty() || o.a_n_rule == "n13") {
      a_seq = ThresholdSequence::rate_n13(data.n());
    } else {
      throw UsageError("unknown --a-n-rule '" + o.a_n_rule + "' (choices: n13, data)");
    }
    // recenter on the thresholded lasso fit (see the simulate presets)
    draws = bootstrap_lasso(data, tau, lambda->value, *a_seq, law, B, o.seed, threads,
                            ThresholdSource::Lasso);
  }
  const std::vector<ConfidenceInterval> cis = percentile_ci(draws, o.alpha);
  const VectorXd& estimate = draws.interval_anchor();

  if (o.format == "csv") {
    std::string text;
    text += "# wildqr " + std::string(kCliVersion) + " ci\n";
    text += "# input=" + o.input + " tau=" + format_double(o.tau) + " method=" + o.penalty;
    if (lambda)
      text += " lambda=" + format_double(lambda->value) + " chosen_by=" + lambda->how;
    if (o.penalty == "alasso") text += " gamma=" + format_double(o.gamma);
    if (a_seq) text += " a_n=" + format_double(a_seq->a_n);
    text += " law=" + o.law + " boot=" + std::to_string(o.boot) +
            " alpha=" + format_double(o.alpha) + " seed=" + std::to_string(o.seed) + "\n";
    text += "name,estimate,lower,upper,level,method,boot,failures\n";
    for (Index j = 0; j <= data.p(); ++j) {
      const auto& ci = cis[static_cast<std::size_t>(j)];
      text += data.names[static_cast<std::size_t>(j)] + "," + format_double(estimate[j]) +
              "," + format_double(ci.lower) + "," + format_double(ci.upper) + "," +
              format_double(ci.level) + "," + o.penalty + "," + std::to_string(o.boot) + "," +
              std::to_string(draws.failures) + "\n";
    }
    write_output(text, o.output, out);
    return 0;
  }

  Json config = Json::object();
  config.set("input", Json::str(o.input));
  config.set("tau", Json::num(o.tau));
  config.set("method", Json::str(o.penalty));
  if (lambda) {
    Json lj = Json::object();
    lj.set("value", Json::num(lambda->value));
    lj.set("chosen_by", Json::str(lambda->how));
    config.set("lambda", std::move(lj));
  }
  if (o.penalty == "alasso") config.set("gamma", Json::num(o.gamma));
  if (a_seq) config.set("a_n", Json::num(a_seq->a_n));
  config.set("law", law_json(law, o.law));
  config.set("boot", Json::integer(o.boot));
  config.set("alpha", Json::num(o.alpha));
  config.set("seed", Json::integer(static_cast<long long>(o.seed)));

  Json root = Json::object();
  root.set("meta", meta_block("ci"));
  root.set("config", std::move(config));
  Json intervals = Json::array();
  for (Index j = 0; j <= data.p(); ++j) {
    const auto& ci = cis[static_cast<std::size_t>(j)];
    Json row = Json::object();
    row.set("name", Json::str(data.names[static_cast<std::size_t>(j)]));
    row.set("estimate", Json::num(estimate[j]));
    row.set("lower", Json::num(ci.lower));
    row.set("upper", Json::num(ci.upper));
    intervals.push(std::move(row));
  }
  root.set("intervals", std::move(intervals));
  root.set("level", Json::num(1.0 - o.alpha));
  root.set("failures", Json::integer(draws.failures));
  write_output(root.dump(), o.output, out);
  return 0;
}

// ---------------------------------------------------------------- simulate

std::vector<MethodSpec> parse_methods(const Opts& o) {
  std::vector<MethodSpec> specs;
  std::stringstream ss(o.methods);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    MethodSpec spec;
    if (token == "newal") {
      spec.kind = Method::NewAL;
      spec.gamma = o.gamma;
    } else if (token == "newl") {
      spec.kind = Method::NewL;
      spec.a_rule = o.a_n_rule == "data" ? ANRule::DataDriven : ANRule::RateN13;
      // recenter on the thresholded lasso fit: thresholding the pilot instead
      // undercovers heteroscedastic slopes at simulation sample sizes
      spec.source = ThresholdSource::Lasso;
    } else if (token == "fullwb") {
      spec.kind = Method::FullWB;
    } else if (token == "oraclewb") {
      spec.kind = Method::OracleWB;
    } else if (token == "tswb") {
      spec.kind = Method::TwoStepWB;
      spec.selector = SelectorKind::AdaptiveBIC;
      spec.gamma = o.gamma;
    } else if (token == "tswb-lasso") {
      spec.kind = Method::TwoStepWB;
      spec.selector = SelectorKind::LassoCV;
    } else {
      throw UsageError("unknown method '" + token +
                       "' (choices: newal, newl, fullwb, oraclewb, tswb, tswb-lasso)");
    }
    specs.push_back(spec);
  }
  if (specs.empty()) throw UsageError("--methods lists no methods");
  return specs;
}

std::string sim_csv(const SimReport& report, const Opts& o,
                    const std::vector<std::string>& names) {
  std::string text;
  text += "# wildqr " + std::string(kCliVersion) + " simulate\n";
  text += "# n=" + std::to_string(report.n) + " tau=" + format_double(report.tau) +
          " reps=" + std::to_string(report.reps) + " boot=" + std::to_string(report.B) +
          " alpha=" + format_double(report.alpha) + " seed=" + std::to_string(report.seed) +
          " law=" + o.law + " methods=" + o.methods + "\n";
  text += "method,coefficient,true_beta,coverage,avg_length,tp,fp,zeros_coverage,zeros_length,"
          "reps_used,failures\n";
  for (const auto& m : report.methods) {
    for (Index j = 0; j < report.true_beta.size(); ++j) {
      text += m.label + "," + names[static_cast<std::size_t>(j)] + "," +
              format_double(report.true_beta[j]) + "," + format_double(m.coverage[j]) + "," +
              format_double(m.avg_length[j]) + "," + format_double(m.tp) + "," +
              format_double(m.fp) + "," + format_double(m.zeros_coverage) + "," +
              format_double(m.zeros_length) + "," + std::to_string(m.reps_used) + "," +
              std::to_string(m.failures) + "\n";
    }
  }
  return text;
}

std::string sim_json(const SimReport& report, const Opts& o,
                     const std::vector<std::string>& names) {
  Json config = Json::object();
  config.set("n", Json::integer(report.n));
  config.set("tau", Json::num(report.tau));
  config.set("reps", Json::integer(report.reps));
  config.set("boot", Json::integer(report.B));
  config.set("alpha", Json::num(report.alpha));
  config.set("seed", Json::integer(static_cast<long long>(report.seed)));
  config.set("law", Json::str(o.law));
  config.set("methods", Json::str(o.methods));

  Json root = Json::object();
  root.set("meta", meta_block("simulate"));
  root.set("config", std::move(config));
  Json namearr = Json::array();
  for (const auto& n : names) namearr.push(Json::str(n));
  root.set("coefficients", std::move(namearr));
  Json truth = Json::array();
  for (Index j = 0; j < report.true_beta.size(); ++j) truth.push(Json::num(report.true_beta[j]));
  root.set("true_beta", std::move(truth));
  Json methods = Json::array();
  for (const auto& m : report.methods) {
    Json mj = Json::object();
    mj.set("label", Json::str(m.label));
    Json cov = Json::array(), len = Json::array();
    for (Index j = 0; j < m.coverage.size(); ++j) {
      cov.push(Json::num(m.coverage[j]));
      len.push(Json::num(m.avg_length[j]));
    }
    mj.set("coverage", std::move(cov));
    mj.set("avg_length", std::move(len));
    mj.set("zeros_coverage", Json::num(m.zeros_coverage));
    mj.set("zeros_length", Json::num(m.zeros_length));
    mj.set("tp", Json::num(m.tp));
    mj.set("fp", Json::num(m.fp));
    mj.set("reps_used", Json::integer(m.reps_used));
    mj.set("failures", Json::integer(m.failures));
    methods.push(std::move(mj));
  }
  root.set("methods", std::move(methods));
  return root.dump();
}

std::string sim_summary(const SimReport& report, const std::vector<std::string>& names) {
  char buf[128];
  std::string text = "wildqr " + std::string(kCliVersion) + " simulate summary\n";
  std::snprintf(buf, sizeof(buf), "n=%lld tau=%.2f reps=%lld B=%lld alpha=%.3f seed=%llu\n\n",
                static_cast<long long>(report.n), report.tau,
                static_cast<long long>(report.reps), static_cast<long long>(report.B),
                report.alpha, static_cast<unsigned long long>(report.seed));
  text += buf;

  std::vector<Index> nonzero;
  for (Index j = 1; j < report.true_beta.size(); ++j)
    if (report.true_beta[j] != 0.0) nonzero.push_back(j);

  std::snprintf(buf, sizeof(buf), "%-16s", "method");
  text += buf;
  for (Index j : nonzero) {
    std::snprintf(buf, sizeof(buf), "%-13s", names[static_cast<std::size_t>(j)].c_str());
    text += buf;
  }
  std::snprintf(buf, sizeof(buf), "%-13s%-7s%-7s\n", "Zeros", "TP", "FP");
  text += buf;
  for (const auto& m : report.methods) {
    std::snprintf(buf, sizeof(buf), "%-16s", m.label.c_str());
    text += buf;
    for (Index j : nonzero) {
      std::snprintf(buf, sizeof(buf), "%4.1f (%0.2f)  ", 100.0 * m.coverage[j], m.avg_length[j]);
      text += buf;
    }
    std::snprintf(buf, sizeof(buf), "%4.1f (%0.2f)  %-7.2f%-7.2f", 100.0 * m.zeros_coverage,
                  m.zeros_length, m.tp, m.fp);
    text += buf;
    if (m.failures > 0) {
      std::snprintf(buf, sizeof(buf), "  [%lld failed reps]",
                    static_cast<long long>(m.failures));
      text += buf;
    }
    text += '\n';
  }
  return text;
}

int do_simulate(const CLI::App* sub, const Opts& o, std::ostream& out) {
  (void)sub;
  check_alpha(o.alpha);
  StudyConfig cfg{PaperDesign(static_cast<Index>(o.n), QuantileLevel(o.tau)), parse_methods(o),
                  static_cast<Index>(o.reps), static_cast<Index>(o.boot), o.alpha, o.seed,
                  resolve_threads(o.threads), o.cv_folds, 100, parse_law(o.law), {}};
  const SimReport report = run_study(cfg);

  std::vector<std::string> names(static_cast<std::size_t>(report.true_beta.size()));
  names[0] = "Intercept";
  for (std::size_t j = 1; j < names.size(); ++j) names[j] = "X" + std::to_string(j);

  const std::string prefix = o.output.empty() ? "simulation" : o.output;
  write_output(sim_csv(report, o, names), prefix + ".csv", out);
  write_output(sim_json(report, o, names), prefix + ".json", out);
  write_output(sim_summary(report, names), prefix + ".txt", out);
  out << "wrote " << prefix << ".csv, " << prefix << ".json, " << prefix << ".txt\n";
  return 0;
}

// ---------------------------------------------------------------- verify

int do_verify(const CLI::App* sub, const Opts& o, std::ostream& out) {
  const QuantileLevel tau(o.tau);
  const WeightLaw law = make_law(parse_law(o.law), tau, parse_law_params(o.law_params));
  const std::uint64_t seed = given(sub, "--seed") ? o.seed : 0x77eed5u;
  const ConditionReport report =
      verify_conditions(law, static_cast<Index>(o.mc), o.tol, seed);

  Json config = Json::object();
  config.set("law", law_json(law, o.law));
  config.set("tau", Json::num(o.tau));
  config.set("mc", Json::integer(o.mc));
  config.set("tol", Json::num(o.tol));
  config.set("seed", Json::integer(static_cast<long long>(seed)));

  Json root = Json::object();
  root.set("meta", meta_block("verify-weights"));
  root.set("config", std::move(config));
  Json support = Json::object();
  support.set("c1", Json::num(report.c1));
  support.set("c2", Json::num(report.c2));
  support.set("pass", Json::boolean(report.pass_support));
  root.set("condition3_support", std::move(support));
  Json integrals = Json::object();
  integrals.set("positive", Json::num(report.pos_integral));
  integrals.set("negative", Json::num(report.neg_integral));
  integrals.set("pass", Json::boolean(report.pass_integrals));
  root.set("condition4_integrals", std::move(integrals));
  Json quantile = Json::object();
  quantile.set("tau_quantile", Json::num(report.tau_quantile));
  quantile.set("frac_neg", Json::num(report.frac_neg));
  quantile.set("frac_nonpos", Json::num(report.frac_nonpos));
  quantile.set("pass", Json::boolean(report.pass_quantile));
  root.set("condition5_quantile", std::move(quantile));
  root.set("mean_abs", Json::num(report.mean_abs));
  root.set("pass", Json::boolean(report.pass()));
  write_output(root.dump(), o.output, out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"penalized quantile regression with wild-bootstrap inference"};
  app.require_subcommand(1);
  Opts o;

  auto add_common = [&o](CLI::App* sub, bool needs_input) {
    auto* input = sub->add_option("--input", o.input, "input CSV (response first)");
    if (needs_input) input->required();
    sub->add_option("--tau", o.tau, "quantile level in (0,1)")->capture_default_str();
    sub->add_option("--output", o.output, "output path (default: stdout)");
    sub->add_option("--format", o.format, "json or csv")->capture_default_str();
  };
  auto add_penalty = [&o](CLI::App* sub) {
    sub->add_option("--penalty,--method", o.penalty, "none, lasso, or alasso")
        ->capture_default_str();
    sub->add_option("--gamma", o.gamma, "adaptive-lasso exponent")->capture_default_str();
    sub->add_option("--lambda", o.lambda, "fixed penalty level");
    sub->add_option("--tune", o.tune, "bic (alasso) or cv (lasso)");
    sub->add_option("--cv-folds", o.cv_folds, "folds for --tune cv")->capture_default_str();
  };
  auto add_law = [&o](CLI::App* sub) {
    sub->add_option("--law", o.law, "two-point, feng, g1, g2, point-mass")
        ->capture_default_str();
    sub->add_option("--law-params", o.law_params, "law parameters as key=value pairs");
  };

  CLI::App* fit = app.add_subcommand("fit", "penalized or plain quantile regression fit");
  add_common(fit, true);
  add_penalty(fit);
  fit->add_option("--seed", o.seed, "seed for --tune cv folds");

  CLI::App* ci = app.add_subcommand("ci", "wild-bootstrap confidence intervals");
  add_common(ci, true);
  add_penalty(ci);
  add_law(ci);
  ci->add_option("--a-n", o.a_n, "fixed threshold for the modified lasso bootstrap");
  ci->add_option("--a-n-rule", o.a_n_rule, "n13 or data");
  ci->add_option("--boot", o.boot, "bootstrap replicates")->capture_default_str();
  ci->add_option("--alpha", o.alpha, "1 - confidence level")->capture_default_str();
  ci->add_option("--seed", o.seed, "random seed (required)")->required();
  ci->add_option("--threads", o.threads, "worker threads (or WILDQR_THREADS)");

  CLI::App* sim = app.add_subcommand("simulate", "coverage study on the built-in design");
  sim->add_option("--n", o.n, "sample size per replication")->capture_default_str();
  sim->add_option("--tau", o.tau, "quantile level in (0,1)")->capture_default_str();
  sim->add_option("--reps", o.reps, "replications")->capture_default_str();
  sim->add_option("--boot", o.boot, "bootstrap replicates per replication");
  sim->add_option("--alpha", o.alpha, "1 - confidence level")->capture_default_str();
  sim->add_option("--seed", o.seed, "random seed (required)")->required();
  sim->add_option("--threads", o.threads, "worker threads (or WILDQR_THREADS)");
  sim->add_option("--methods", o.methods,
                  "comma list: newal, newl, fullwb, oraclewb, tswb, tswb-lasso")
      ->capture_default_str();
  sim->add_option("--gamma", o.gamma, "adaptive-lasso exponent")->capture_default_str();
  sim->add_option("--a-n-rule", o.a_n_rule, "n13 or data (newl)");
  sim->add_option("--cv-folds", o.cv_folds, "folds for lasso CV")->capture_default_str();
  add_law(sim);
  sim->add_option("--output", o.output, "output prefix (writes .csv/.json/.txt)")
      ->capture_default_str();

  CLI::App* verify = app.add_subcommand("verify-weights", "check Conditions 3-5 numerically");
  verify->add_option("--law", o.law, "two-point, feng, g1, g2, point-mass")
      ->capture_default_str();
  verify->add_option("--law-params", o.law_params, "law parameters as key=value pairs");
  verify->add_option("--tau", o.tau, "quantile level in (0,1)")->capture_default_str();
  verify->add_option("--mc", o.mc, "Monte Carlo sample count")->capture_default_str();
  verify->add_option("--tol", o.tol, "numeric tolerance")->capture_default_str();
  verify->add_option("--seed", o.seed, "seed for the check");
  verify->add_option("--output", o.output, "output path (default: stdout)");

  // simulate defaults to the desk-scale bootstrap size
  sim->parse_complete_callback([&o, sim]() {
    if (sim->count("--boot") == 0) o.boot = 300;
  });

  std::vector<const char*> argv;
  argv.push_back("wildqr");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(fit)) return do_fit(fit, o, out);
    if (app.got_subcommand(ci)) return do_ci(ci, o, out);
    if (app.got_subcommand(sim)) return do_simulate(sim, o, out);
    return do_verify(verify, o, out);
  } catch (const CsvError& e) {
    err << "data error: " << e.what() << "\n";
    return 3;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace wildqr
