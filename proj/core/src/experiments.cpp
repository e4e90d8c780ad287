#include "mlmcq/experiments.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "mlmcq/bopm.hpp"
#include "mlmcq/error_semantics.hpp"
#include "mlmcq/errors.hpp"
#include "mlmcq/greeks.hpp"
#include "mlmcq/regression.hpp"
#include "mlmcq/stats.hpp"

#ifndef MLMCQ_VERSION
#define MLMCQ_VERSION "0.0.0"
#endif

namespace mlmcq {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view version() { return MLMCQ_VERSION; }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  return fmt::format("{}", x);
}

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view where) {
  if (!j.is_object()) throw InvalidArgument(fmt::format("config: '{}' must be an object", where));
  const std::set<std::string_view> allowed(known);
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) throw InvalidArgument(fmt::format("config: unknown key '{}' in {}", key, where));
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("config: bad value for '{}': {}", key, e.what()));
  }
}

void check_finite(double v, std::string_view name) {
  if (!std::isfinite(v)) throw InvalidArgument(fmt::format("config: '{}' must be finite", name));
}

std::string join_levels(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, std::vector<fs::path>& written) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    written.push_back(path);
  }
  template <class... Args>
  void row(fmt::format_string<Args...> f, Args&&... args) {
    out_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
    if (!out_) throw std::runtime_error(fmt::format("write failed on '{}'", path_.string()));
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j, std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
  written.push_back(path);
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
}

}  // namespace

ExperimentConfig parse_config(const json& input) {
  const json& j = input.contains("config") && input.contains("tool") ? input.at("config") : input;
  reject_unknown(j,
                 {"mode", "model", "scheme", "payoff", "levels", "samples", "seed", "workers", "output", "mlmc",
                  "plan", "bopm", "greeks", "strong_order"},
                 "config");
  ExperimentConfig c;
  read(j, "mode", c.mode);
  read(j, "scheme", c.scheme);
  read(j, "samples", c.samples);
  read(j, "seed", c.seed);
  read(j, "workers", c.workers);
  read(j, "output", c.output);
  if (j.contains("model")) {
    const json& m = j.at("model");
    reject_unknown(m, {"type", "r", "sigma", "T", "S0", "K", "exponent", "amplitude", "decay"}, "model");
    read(m, "type", c.model.type);
    read(m, "r", c.model.r);
    read(m, "sigma", c.model.sigma);
    read(m, "T", c.model.maturity);
    read(m, "S0", c.model.s0);
    read(m, "K", c.model.strike);
    read(m, "exponent", c.model.exponent);
    read(m, "amplitude", c.model.amplitude);
    read(m, "decay", c.model.decay);
  }
  if (j.contains("payoff")) {
    const json& p = j.at("payoff");
    if (p.is_string()) {
      c.payoff.name = p.get<std::string>();
    } else {
      reject_unknown(p, {"name", "breaks", "values"}, "payoff");
      read(p, "name", c.payoff.name);
      read(p, "breaks", c.payoff.breaks);
      read(p, "values", c.payoff.values);
    }
  }
  if (j.contains("levels")) {
    const json& l = j.at("levels");
    reject_unknown(l, {"min", "max"}, "levels");
    read(l, "min", c.l_min);
    read(l, "max", c.l_max);
  }
  if (j.contains("mlmc")) {
    const json& m = j.at("mlmc");
    reject_unknown(m, {"eps", "pilot", "max_level", "alpha", "error_kind"}, "mlmc");
    read(m, "eps", c.eps);
    read(m, "pilot", c.pilot);
    read(m, "max_level", c.max_level);
    if (m.contains("alpha") && !m.at("alpha").is_null()) c.alpha = m.at("alpha").get<double>();
    read(m, "error_kind", c.error_kind);
  }
  if (j.contains("plan")) {
    const json& p = j.at("plan");
    reject_unknown(p, {"eps", "alpha", "beta", "gamma"}, "plan");
    read(p, "eps", c.plan_eps);
    read(p, "alpha", c.plan_alpha);
    read(p, "beta", c.plan_beta);
    read(p, "gamma", c.plan_gamma);
  }
  if (j.contains("bopm")) {
    const json& b = j.at("bopm");
    reject_unknown(b, {"lattice", "n", "exact", "first_order"}, "bopm");
    read(b, "lattice", c.lattice);
    read(b, "n", c.lattice_steps);
    read(b, "exact", c.exact);
    read(b, "first_order", c.first_order);
  }
  if (j.contains("greeks")) {
    const json& g = j.at("greeks");
    reject_unknown(g, {"type", "method", "h", "bump"}, "greeks");
    read(g, "type", c.greek);
    read(g, "method", c.greek_method);
    read(g, "h", c.h);
    read(g, "bump", c.bump);
  }
  if (j.contains("strong_order")) {
    const json& s = j.at("strong_order");
    reject_unknown(s, {"exponents"}, "strong_order");
    read(s, "exponents", c.step_exponents);
  }

  static const std::set<std::string> modes{"alpha-beta", "mlmc", "plan", "bopm", "greeks", "strong-order"};
  if (!modes.count(c.mode)) throw InvalidArgument(fmt::format("config: unknown mode '{}'", c.mode));
  for (const auto& [v, name] : std::initializer_list<std::pair<double, std::string_view>>{
           {c.model.r, "r"}, {c.model.sigma, "sigma"}, {c.model.maturity, "T"}, {c.model.s0, "S0"},
           {c.model.strike, "K"}, {c.model.exponent, "exponent"}, {c.model.amplitude, "amplitude"},
           {c.model.decay, "decay"}, {c.eps, "eps"}, {c.plan_eps, "plan.eps"}, {c.plan_alpha, "plan.alpha"},
           {c.plan_beta, "plan.beta"}, {c.plan_gamma, "plan.gamma"}, {c.h, "h"}, {c.bump, "bump"}})
    check_finite(v, name);
  for (double b : c.payoff.breaks) check_finite(b, "payoff.breaks");
  for (double v : c.payoff.values) check_finite(v, "payoff.values");
  if (c.mode == "alpha-beta" && c.l_max < c.l_min + 3)
    throw InvalidArgument("config: regression needs l_max >= l_min + 3");
  parse_scheme(c.scheme);
  parse_error_kind(c.error_kind);
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot read config '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(fmt::format("config '{}': {}", path.string(), e.what()));
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = c.mode;
  j["model"] = {{"type", c.model.type},         {"r", c.model.r},          {"sigma", c.model.sigma},
                {"T", c.model.maturity},        {"S0", c.model.s0},        {"K", c.model.strike},
                {"exponent", c.model.exponent}, {"amplitude", c.model.amplitude}, {"decay", c.model.decay}};
  j["scheme"] = c.scheme;
  j["payoff"] = {{"name", c.payoff.name}, {"breaks", c.payoff.breaks}, {"values", c.payoff.values}};
  j["levels"] = {{"min", c.l_min}, {"max", c.l_max}};
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["mlmc"] = {{"eps", c.eps},
               {"pilot", c.pilot},
               {"max_level", c.max_level},
               {"alpha", c.alpha ? json(*c.alpha) : json(nullptr)},
               {"error_kind", c.error_kind}};
  j["plan"] = {{"eps", c.plan_eps}, {"alpha", c.plan_alpha}, {"beta", c.plan_beta}, {"gamma", c.plan_gamma}};
  j["bopm"] = {{"lattice", c.lattice}, {"n", c.lattice_steps}, {"exact", c.exact}, {"first_order", c.first_order}};
  j["greeks"] = {{"type", c.greek}, {"method", c.greek_method}, {"h", c.h}, {"bump", c.bump}};
  j["strong_order"] = {{"exponents", c.step_exponents}};
  return j;
}

json manifest(const ExperimentConfig& config) {
  return {{"tool", "mlmcq"}, {"version", std::string(version())}, {"config", config_to_json(config)}};
}

SdeModel build_model(const ModelSpec& spec) {
  if (spec.type == "gbm") return gbm(spec.r, spec.sigma);
  if (spec.type == "cev") return local_vol(spec.r, cev_vol(spec.sigma, spec.exponent - 1.0));
  if (spec.type == "time-decay") return local_vol(spec.r, time_decay_vol(spec.sigma, spec.amplitude, spec.decay));
  throw InvalidArgument(fmt::format("unknown model type '{}' (expected gbm|cev|time-decay)", spec.type));
}

Payoff build_payoff(const PayoffSpec& spec, double strike) {
  return make_payoff(spec.name, strike, spec.breaks, spec.values);
}

PricingProblem build_problem(const ExperimentConfig& c) {
  if (!(c.model.s0 > 0.0)) throw InvalidArgument("config: S0 must be positive");
  if (!(c.model.maturity > 0.0)) throw InvalidArgument("config: T must be positive");
  PricingProblem p{build_model(c.model), parse_scheme(c.scheme), build_payoff(c.payoff, c.model.strike),
                   c.model.s0, c.model.maturity, c.model.r, {}};
  return p;
}

RegressionReport regress_levels(std::vector<LevelPoint> levels) {
  if (levels.size() < 4) throw InvalidArgument("regression needs at least four levels");
  for (const auto& p : levels)
    if (!(p.variance > 0.0) || !std::isfinite(std::log2(p.variance)))
      throw DegenerateRegression(p.level, fmt::format("level {} variance is numerically zero; regression undefined", p.level));

  RegressionReport r;
  r.levels = std::move(levels);
  const std::size_t first = r.levels.size() - 4;
  std::vector<double> bx, by, ax, ay;
  for (std::size_t i = first; i < r.levels.size(); ++i) {
    const auto& p = r.levels[i];
    bx.push_back(p.level);
    by.push_back(std::log2(p.variance));
    r.beta_levels.push_back(p.level);
    if (std::fabs(p.mean) <= 2.0 * p.std_error) {
      r.dropped_levels.push_back(p.level);
      continue;
    }
    ax.push_back(p.level);
    ay.push_back(std::log2(std::fabs(p.mean)));
    r.alpha_levels.push_back(p.level);
  }
  const LinearFit beta = fit_line(bx, by);
  r.beta_hat = -beta.slope;
  r.beta_residuals = beta.residuals;
  if (ax.size() >= 2) {
    const LinearFit alpha = fit_line(ax, ay);
    r.alpha_hat = -alpha.slope;
    r.alpha_residuals = alpha.residuals;
  }
  return r;
}

std::vector<LevelPoint> sample_levels(const ExperimentConfig& config) {
  if (config.l_min < 0 || config.l_max < config.l_min + 3)
    throw InvalidArgument("regression needs 0 <= l_min and l_max >= l_min + 3");
  if (config.samples < 2) throw InvalidArgument("regression needs at least two samples per level");
  const PricingProblem problem = build_problem(config);
  RunOptions opts;
  opts.seed = config.seed;
  opts.workers = config.workers;
  std::vector<LevelPoint> points;
  for (int l = config.l_min; l <= config.l_max; ++l) {
    const LevelStats s = sample_level(l, problem, 0, config.samples, opts);
    points.push_back({l, s.n_samples, s.mean, s.variance, std::sqrt(s.variance / static_cast<double>(s.n_samples))});
  }
  return points;
}

std::vector<LevelPoint> pool_levels(const std::vector<std::vector<LevelPoint>>& runs) {
  if (runs.empty()) throw InvalidArgument("pool_levels: no runs");
  std::vector<LevelPoint> pooled;
  for (std::size_t i = 0; i < runs.front().size(); ++i) {
    RunningStats acc;
    for (const auto& run : runs) {
      if (run.size() != runs.front().size() || run[i].level != runs.front()[i].level)
        throw InvalidArgument("pool_levels: runs cover different levels");
      const auto& p = run[i];
      const double m2 = p.n_samples >= 2 ? p.variance * static_cast<double>(p.n_samples - 1) : 0.0;
      acc.merge({p.n_samples, p.mean, m2});
    }
    pooled.push_back({runs.front()[i].level, acc.count, acc.mean, acc.variance(), acc.standard_error()});
  }
  return pooled;
}

RegressionReport estimate_alpha_beta(const ExperimentConfig& config) { return regress_levels(sample_levels(config)); }

namespace {

void run_alpha_beta(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& written) {
  const RegressionReport r = estimate_alpha_beta(c);
  CsvFile levels(dir / "levels.csv", written);
  levels.row("level,n_samples,mean,variance,std_error,log2_abs_mean,log2_variance");
  for (const auto& p : r.levels)
    levels.row("{},{},{},{},{},{},{}", p.level, p.n_samples, format_number(p.mean), format_number(p.variance),
               format_number(p.std_error), format_number(std::log2(std::fabs(p.mean))),
               format_number(std::log2(p.variance)));
  CsvFile reg(dir / "regression.csv", written);
  reg.row("beta_hat,alpha_hat,beta_levels,alpha_levels,dropped_levels");
  reg.row("{},{},{},{},{}", format_number(r.beta_hat), format_number(r.alpha_hat.value_or(NAN)),
          join_levels(r.beta_levels), join_levels(r.alpha_levels), join_levels(r.dropped_levels));
}

void run_mlmc(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& written) {
  const PricingProblem problem = build_problem(c);
  MlmcOptions o;
  o.eps = c.eps;
  o.pilot = c.pilot;
  o.min_level = std::min(c.l_min, c.max_level);
  o.max_level = c.max_level;
  o.alpha = c.alpha;
  o.run.seed = c.seed;
  o.run.workers = c.workers;

  const ErrorKind kind = parse_error_kind(c.error_kind);
  MlmcEstimate est = mlmc(problem, o);
  ErrorGuarantee g{ErrorKind::Mse, c.eps, 1.0, 1};
  double value = est.estimate;
  if (kind == ErrorKind::Additive) {
    g = mse_to_additive(c.eps);
    value = boosted(g, [&](std::uint32_t rep) {
      if (rep == 0) return est.estimate;
      MlmcOptions orep = o;
      orep.run.replicate = rep;
      return mlmc(problem, orep).estimate;
    });
  }

  CsvFile levels(dir / "levels.csv", written);
  levels.row("l,N_l,mean,variance,unit_cost,flagged");
  for (const auto& l : est.levels)
    levels.row("{},{},{},{},{},{}", l.level, l.n_samples, format_number(l.mean), format_number(l.variance),
               format_number(l.unit_cost), l.flagged);
  CsvFile out(dir / "estimate.csv", written);
  out.row("estimate,eps,total_cost,L,achieved_variance,bias_proxy,guarantee");
  out.row("{},{},{},{},{},{},{}", format_number(value), format_number(c.eps), format_number(est.total_cost), est.L,
          format_number(est.achieved_variance), format_number(est.bias_proxy), describe(g));
}

void run_plan(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& written) {
  const QaPlan p = plan_qamlmc(c.plan_eps, c.plan_alpha, c.plan_beta, c.plan_gamma);
  CsvFile plan(dir / "plan.csv", written);
  plan.row("l,eps_l,N_l,level_cost");
  for (std::size_t l = 0; l < p.eps_l.size(); ++l)
    plan.row("{},{},{},{}", l, format_number(p.eps_l[l]), format_number(p.n_l[l]), format_number(p.level_cost[l]));
  CsvFile summary(dir / "summary.csv", written);
  summary.row("regime,L,delta,base_cost,polylog,total_cost,reduced_cost,certified");
  summary.row("{},{},{},{},{},{},{},{}", regime_name(p.regime), p.L, format_number(p.delta), format_number(p.base_cost),
              format_number(p.polylog), format_number(p.total_cost), format_number(reduced_cost(p)),
              certify(p).ok() ? "yes" : "no");
}

void run_bopm(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& written) {
  const BinomialLattice lattice =
      make_lattice(parse_lattice_model(c.lattice), c.model.r, c.model.sigma, c.model.maturity, c.lattice_steps,
                   c.model.s0, c.first_order ? LatticeFlavor::FirstOrder : LatticeFlavor::Exact);
  const Payoff payoff = build_payoff(c.payoff, c.model.strike);
  const double df = std::exp(-c.model.r * c.model.maturity);
  const BopmEstimate e = bopm_estimate(payoff, lattice, c.samples, c.seed, c.workers);
  const double exact = c.exact ? df * bopm_exact(payoff, lattice) : NAN;
  CsvFile out(dir / "bopm.csv", written);
  out.row("model,n,U,D,p,estimate,stderr,exact,rng_draws,draws_per_sample");
  out.row("{},{},{},{},{},{},{},{},{},{}", c.lattice, lattice.n, format_number(lattice.U), format_number(lattice.D),
          format_number(lattice.p), format_number(df * e.estimate), format_number(df * e.std_error),
          format_number(exact), e.rng_draws,
          format_number(static_cast<double>(e.rng_draws) / static_cast<double>(e.n_samples)));
}

void run_greeks(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& written) {
  const PricingProblem problem = build_problem(c);
  RunOptions o;
  o.seed = c.seed;
  o.workers = c.workers;
  const GreekType type = parse_greek_type(c.greek);
  const GreekMethod method = parse_greek_method(c.greek_method);
  DeltaEstimate d = method == GreekMethod::FiniteDifference && type == GreekType::Delta
                        ? delta_finite_difference(problem, c.h, c.samples, o, c.bump)
                        : estimate_greek(type, method, problem, c.h, c.samples, o);
  CsvFile out(dir / "greeks.csv", written);
  out.row("greek,method,value,stderr,N,h");
  out.row("{},{},{},{},{},{}", c.greek, c.greek_method, format_number(d.value), format_number(d.std_error), d.n_samples,
          format_number(d.h));
}

void run_strong_order(const ExperimentConfig& c, const fs::path& dir, std::vector<fs::path>& written) {
  if (c.model.type != "gbm") throw InvalidArgument("strong-order mode needs a gbm model");
  const StrongOrderReport r = estimate_strong_order(parse_scheme(c.scheme), {c.model.r, c.model.sigma}, c.model.s0,
                                                    c.model.maturity, c.step_exponents, c.samples, c.seed, c.workers);
  CsvFile out(dir / "strong_order.csv", written);
  out.row("h,mean_abs_error");
  for (std::size_t i = 0; i < r.step_sizes.size(); ++i)
    out.row("{},{}", format_number(r.step_sizes[i]), format_number(r.mean_abs_errors[i]));
  CsvFile slope(dir / "slope.csv", written);
  slope.row("scheme,slope,nominal_order");
  slope.row("{},{},{}", c.scheme, format_number(r.slope), format_number(nominal_strong_order(parse_scheme(c.scheme))));
}

}  // namespace

std::vector<fs::path> run(const ExperimentConfig& config, const fs::path& out_dir) {
  prepare_dir(out_dir);
  std::vector<fs::path> written;
  if (config.mode == "alpha-beta") run_alpha_beta(config, out_dir, written);
  else if (config.mode == "mlmc") run_mlmc(config, out_dir, written);
  else if (config.mode == "plan") run_plan(config, out_dir, written);
  else if (config.mode == "bopm") run_bopm(config, out_dir, written);
  else if (config.mode == "greeks") run_greeks(config, out_dir, written);
  else if (config.mode == "strong-order") run_strong_order(config, out_dir, written);
  else throw InvalidArgument(fmt::format("unknown mode '{}'", config.mode));
  write_json(out_dir / "manifest.json", manifest(config), written);
  return written;
}

namespace {

// Rows: european, digital-appendix. Columns follow Scheme order; NaN marks "no value".
const std::map<std::string, std::array<double, 5>, std::less<>> kReferenceBeta{
    {"european", {0.976999, 1.962848, 2.970166, 3.964626, 5.958417}},
    {"digital-appendix", {0.473426, 0.869393, 1.452448, 1.775679, NAN}},
};
const std::map<std::string, std::array<double, 5>, std::less<>> kReferenceAlpha{
    {"european", {1.136214, 0.979572, 1.747239, 1.970829, 2.961041}},
    {"digital-appendix", {1.023176, 0.791818, 1.853158, 1.827618, NAN}},
};

std::optional<double> reference(const std::map<std::string, std::array<double, 5>, std::less<>>& table,
                                Scheme scheme, std::string_view payoff) {
  const auto it = table.find(payoff);
  const auto col = static_cast<std::size_t>(scheme);
  if (it == table.end() || col >= 5 || std::isnan(it->second[col])) return std::nullopt;
  return it->second[col];
}

}  // namespace

std::optional<double> reference_beta(Scheme scheme, std::string_view payoff) {
  return reference(kReferenceBeta, scheme, payoff);
}

std::optional<double> reference_alpha(Scheme scheme, std::string_view payoff) {
  return reference(kReferenceAlpha, scheme, payoff);
}

GridConfig parse_grid(const json& input) {
  const json& j = input.contains("grid") && input.contains("tool") ? input.at("grid") : input;
  GridConfig g;
  json base = j.contains("base") ? j.at("base") : json::object();
  if (!base.contains("mode")) base["mode"] = "alpha-beta";
  g.base = parse_config(base);
  g.base.mode = "alpha-beta";
  for (const auto& [key, _] : j.items())
    if (key != "base" && key != "schemes" && key != "payoffs" && key != "seeds")
      throw InvalidArgument(fmt::format("grid: unknown key '{}'", key));
  read(j, "schemes", g.schemes);
  read(j, "payoffs", g.payoffs);
  read(j, "seeds", g.seeds);
  if (g.schemes.empty() || g.payoffs.empty()) throw InvalidArgument("grid: schemes and payoffs must be nonempty");
  if (g.seeds < 1) throw InvalidArgument("grid: need at least one seed");
  for (const auto& s : g.schemes) parse_scheme(s);
  return g;
}

GridConfig load_grid(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot read grid '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(fmt::format("grid '{}': {}", path.string(), e.what()));
  }
  return parse_grid(j);
}

json grid_to_json(const GridConfig& g) {
  return {{"base", config_to_json(g.base)}, {"schemes", g.schemes}, {"payoffs", g.payoffs}, {"seeds", g.seeds}};
}

std::vector<TableCell> reproduce_tables(const GridConfig& grid) {
  std::vector<TableCell> cells;
  for (const auto& payoff : grid.payoffs) {
    for (const auto& scheme_label : grid.schemes) {
      TableCell cell;
      cell.scheme = scheme_label;
      cell.payoff = payoff;
      const Scheme scheme = parse_scheme(scheme_label);
      cell.beta_ref = reference_beta(scheme, payoff);
      cell.alpha_ref = reference_alpha(scheme, payoff);
      try {
        std::vector<std::vector<LevelPoint>> runs;
        double beta_sum = 0.0, alpha_sum = 0.0;
        unsigned beta_count = 0, alpha_count = 0;
        for (unsigned s = 0; s < grid.seeds; ++s) {
          ExperimentConfig c = grid.base;
          c.scheme = scheme_label;
          c.payoff.name = payoff;
          c.seed = grid.base.seed + s;
          runs.push_back(sample_levels(c));
          ++cell.seeds_used;
          try {
            const RegressionReport r = regress_levels(runs.back());
            beta_sum += r.beta_hat;
            ++beta_count;
            if (r.alpha_hat) {
              alpha_sum += *r.alpha_hat;
              ++alpha_count;
            }
          } catch (const DegenerateRegression&) {
            // Reported through the pooled fit below.
          }
        }
        if (beta_count > 0) cell.beta_seed_mean = beta_sum / beta_count;
        if (alpha_count > 0) cell.alpha_seed_mean = alpha_sum / alpha_count;
        const RegressionReport pooled = regress_levels(pool_levels(runs));
        cell.beta_hat = pooled.beta_hat;
        cell.alpha_hat = pooled.alpha_hat;
      } catch (const DegenerateRegression& e) {
        cell.status = fmt::format("degenerate (level {})", e.level());
      } catch (const std::exception& e) {
        cell.status = fmt::format("error: {}", e.what());
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<fs::path> write_tables(const GridConfig& grid, const std::vector<TableCell>& cells, const fs::path& out_dir) {
  prepare_dir(out_dir);
  std::vector<fs::path> written;
  const auto num = [](const std::optional<double>& v) { return format_number(v.value_or(NAN)); };
  const auto dev = [](const std::optional<double>& a, const std::optional<double>& b) {
    return format_number(a && b ? *a - *b : NAN);
  };
  CsvFile out(out_dir / "tables.csv", written);
  out.row("scheme,payoff,beta_hat,beta_ref,beta_dev,alpha_hat,alpha_ref,alpha_dev,beta_seed_mean,alpha_seed_mean,"
          "seeds,status");
  for (const auto& c : cells)
    out.row("{},{},{},{},{},{},{},{},{},{},{},\"{}\"", c.scheme, c.payoff, num(c.beta_hat), num(c.beta_ref),
            dev(c.beta_hat, c.beta_ref), num(c.alpha_hat), num(c.alpha_ref), dev(c.alpha_hat, c.alpha_ref),
            num(c.beta_seed_mean), num(c.alpha_seed_mean), c.seeds_used, c.status);
  write_json(out_dir / "manifest.json",
             {{"tool", "mlmcq"}, {"version", std::string(version())}, {"grid", grid_to_json(grid)}}, written);
  return written;
}

std::vector<CostRow> compare_costs(const std::vector<double>& eps_grid, const std::vector<CostScenario>& scenarios,
                                   const RunOptions& options) {
  if (eps_grid.empty()) throw InvalidArgument("compare_costs: empty eps grid");
  std::vector<CostRow> rows;
  for (const auto& sc : scenarios) {
    for (const double eps : eps_grid) {
      MlmcOptions o;
      o.eps = eps;
      o.run = options;
      const MlmcEstimate est = mlmc(sc.problem, o);
      const QaPlan plan = plan_qamlmc(eps, sc.alpha, sc.beta, sc.gamma);
      rows.push_back({sc.label, eps, est.total_cost, plan.total_cost, reduced_cost(plan)});
    }
  }
  return rows;
}

}  // namespace mlmcq
