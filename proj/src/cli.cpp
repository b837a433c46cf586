#include "dissdoi/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dissdoi/bandfun.hpp"
#include "dissdoi/besov.hpp"
#include "dissdoi/dissipative.hpp"
#include "dissdoi/doi.hpp"
#include "dissdoi/errors.hpp"
#include "dissdoi/io.hpp"
#include "dissdoi/random.hpp"
#include "dissdoi/sample.hpp"

namespace dissdoi {

namespace {

struct Check {
  std::string name;
  std::string anchor;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  bool ok = false;
  std::string detail;
};

Json to_json(const Check& c) {
  Json j{{"name", c.name}, {"anchor", c.anchor}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"residual", c.residual},
         {"ok", c.ok}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

/// lhs <= rhs.
Check bound_check(std::string name, std::string anchor, double lhs, double rhs) {
  return {std::move(name), std::move(anchor), lhs, rhs, std::max(0.0, lhs - rhs), lhs <= rhs, {}};
}

/// |residual| <= tol.
Check residual_check(std::string name, std::string anchor, double lhs, double rhs, double tol) {
  const double r = std::abs(lhs - rhs);
  return {std::move(name), std::move(anchor), lhs, rhs, r, r <= tol, {}};
}

struct TrialOutput {
  std::vector<Check> checks;
  Json report = Json::object();
  std::vector<HistoryEntry> history;
};

using Trial = std::function<TrialOutput(int)>;

/// Runs trials on a pool; outputs are indexed by trial, so the merge order
/// does not depend on scheduling.
std::vector<TrialOutput> run_trials(int trials, int workers, const Trial& trial) {
  std::vector<TrialOutput> out(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < trials; t = next++) {
      try {
        out[static_cast<std::size_t>(t)] = trial(t);
      } catch (const std::exception& e) {
        Check c{"trial-error", "", 0.0, 0.0, 0.0, false, e.what()};
        out[static_cast<std::size_t>(t)].checks.push_back(c);
      }
    }
  };
  const int n = std::max(1, std::min(workers, trials));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, int t) { return seed + static_cast<std::uint64_t>(t); }

GenOptions gen_options(const RunConfig& c) {
  GenOptions o;
  o.style = parse_gen_style(c.style);
  o.spread = c.spread;
  return o;
}

struct Pairs {
  CommutingDissipativePair first;
  CommutingDissipativePair second;
};

std::optional<Instance> load_instance(const RunConfig& c) {
  if (c.instance.empty()) return std::nullopt;
  return instance_from_json(read_json_file(c.instance));
}

std::optional<Function> load_function(const RunConfig& c) {
  if (c.function.empty()) return std::nullopt;
  return function_from_json(read_json_file(c.function));
}

Pairs pairs_for(const RunConfig& c, const std::optional<Instance>& inst, int t) {
  if (inst) return {inst->first, inst->second};
  auto g = gen_pair(trial_seed(c.seed, t), c.dim, gen_options(c));
  return {g.first, g.second};
}

const ExpSum1D& need_1d(const Function& f) {
  if (!std::holds_alternative<ExpSum1D>(f)) throw ParseError("this command needs a one-variable function (dims 1)");
  return std::get<ExpSum1D>(f);
}

const ExpSum2D& need_2d(const Function& f) {
  if (!std::holds_alternative<ExpSum2D>(f)) throw ParseError("this command needs a two-variable function (dims 2)");
  return std::get<ExpSum2D>(f);
}

ExpSum1D function_1d(const RunConfig& c, const std::optional<Function>& f, int t) {
  if (f) return need_1d(*f);
  Rng rng(trial_seed(c.seed, t), 11);
  return random_expsum_1d(rng, c.sigma);
}

ExpSum2D function_2d(const RunConfig& c, const std::optional<Function>& f, int t) {
  if (f) return need_2d(*f);
  Rng rng(trial_seed(c.seed, t), 13);
  return random_expsum_2d(rng, c.sigma);
}

/// Two-variable sum spread over several dyadic bands (sigma scales the top).
ExpSum2D multiband_2d(const RunConfig& c, const std::optional<Function>& f, int t) {
  if (f) return need_2d(*f);
  Rng rng(trial_seed(c.seed, t), 17);
  const double top = std::max(8.0, 8.0 * c.sigma);
  std::vector<ExpSum2D::Term> terms;
  for (double r = 0.75; r <= top; r *= 2.7) {
    const double angle = 0.5 * std::numbers::pi * rng.uniform();
    terms.push_back({r * std::cos(angle), r * std::sin(angle), rng.complex_normal() / r});
  }
  return ExpSum2D(top, std::move(terms));
}

TrialOutput identities_trial(const RunConfig& c, int t) {
  TrialOutput out;
  Rng rng(trial_seed(c.seed, t), 5);
  const ExpSum1D f = random_expsum_1d(rng, c.sigma);
  const double upper = f.coefficient_bound();
  const double sigma = f.sigma();

  const double y = rng.uniform(-20.0, 20.0);
  out.checks.push_back(residual_check("column-normalization", "hiz", column_square_sum(sigma, y, 100000), 1.0, 1e-4));

  const double x = rng.uniform(-5.0, 5.0);
  const double row_sum = row_square_sum(f, x, 20000);
  const double row_quad = row_square_integral(f, x);
  out.checks.push_back(residual_check("row-sum-vs-integral", "2vy", row_sum, row_quad, 1e-4));
  out.checks.push_back(bound_check("row-bound", "2vy", row_sum, 4.0 / std::numbers::pi * sigma * sigma * upper * upper + 1e-9));

  out.checks.push_back(bound_check("bernstein", "Bernstein", derivative_grid_sup(f), sigma * upper * (1.0 + 1e-12)));

  const Complex a(rng.uniform(-3.0, 3.0), rng.uniform(0.0, 1.0));
  const Complex b(rng.uniform(-3.0, 3.0), rng.uniform(0.0, 1.0));
  out.checks.push_back(residual_check("divided-difference-symmetry", "Delta",
                                      std::abs(divided_difference(f, a, b)), std::abs(divided_difference(f, b, a)),
                                      1e-12 * std::max(1.0, upper * sigma)));
  {
    const double xr = rng.uniform(-4.0, 4.0);
    const double yr = rng.uniform(-4.0, 4.0);
    const Complex quad = kernel_dd_check(f, xr, yr);
    const Complex exact = divided_difference(f, xr, yr);
    Check k = residual_check("kernel-reproduction", "haa2", std::abs(quad), std::abs(exact), 1e-4);
    k.residual = std::abs(quad - exact);
    k.ok = k.residual <= 1e-4;
    out.checks.push_back(k);
  }
  {
    std::vector<Complex> xs, ys;
    for (int k = 0; k < 100; ++k) {
      xs.emplace_back(rng.uniform(-10.0, 10.0), 0.0);
      ys.emplace_back(rng.uniform(-10.0, 10.0), 0.0);
    }
    const auto reg = regularize_eps(f, 0.1, xs, ys);
    out.checks.push_back(residual_check("regularization", "Dfe", reg.max_residual, 0.0, 1e-10));
  }
  {
    const auto d = decompose(f);
    std::vector<ExpSum1D::Term> sum{{0.0, d.constant}};
    for (const auto& band : d.bands)
      for (const auto& term : band.f.terms()) sum.push_back(term);
    const ExpSum1D back(sigma, sum);
    double worst = 0.0;
    for (const auto& term : f.terms()) {
      Complex got{};
      for (const auto& b2 : back.terms())
        if (b2.freq == term.freq) got = b2.coeff;
      worst = std::max(worst, std::abs(got - term.coeff));
    }
    out.checks.push_back(residual_check("band-reconstruction", "fn", worst, 0.0, 1e-14 * std::max(1.0, upper)));
  }
  out.report = {{"trial", t}, {"function", to_json(f)}, {"row_sum", row_sum}, {"row_integral", row_quad}};
  return out;
}

std::vector<Check> identities_once() {
  std::vector<Check> checks;
  // sigma y = pi: terms 4/(pi^2 (1 - 2n)^2), total exactly 1.
  const int n = 1000000;
  const double s = column_square_sum(1.0, std::numbers::pi, n);
  // Tail of sum 4/(pi^2 (2n-1)^2) beyond |n| <= N is about 2/(pi^2 N).
  checks.push_back(residual_check("column-closed-form", "hiz", s, 1.0, 1e-6));
  const WindowW w = build_w();
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double t = std::pow(10.0, -3.0 + 6.0 * k / 9999.0);
    double sum = 0.0;
    for (int m = -15; m <= 15; ++m) sum += w(t / std::ldexp(1.0, m));
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  checks.push_back(residual_check("partition-of-unity", "w", worst, 0.0, 1e-12));
  double sym = 0.0;
  for (int k = 0; k <= 10000; ++k) {
    const double t = 1.0 + k / 10000.0;
    sym = std::max(sym, std::abs(w(t) - (1.0 - w(t / 2.0))));
  }
  checks.push_back(residual_check("window-symmetry", "w", sym, 0.0, 1e-12));
  return checks;
}

/// Plateau tolerance one decade below the check tolerance.
SeriesOptions series_options(double check_tol) {
  SeriesOptions s;
  s.tol = 0.1 * check_tol;
  s.require_convergence = false;
  return s;
}

void add_series_checks(TrialOutput& out, const PerturbationReport& r, double tol, const std::string& anchor) {
  out.checks.push_back(residual_check("residual-" + r.formula, anchor, r.residual, 0.0, tol));
  out.checks.push_back(bound_check("certificate-bound-" + r.formula, "haagerup", operator_norm(r.doi_value),
                                   r.bound + tol));
  out.checks.push_back(bound_check("s2-contraction-" + r.formula, "S2", r.s2_lhs, r.s2_rhs + 1e-6));
  out.history = r.doi.history;
}

int emit(const RunConfig& c, const std::string& command, std::vector<Check> once,
         const std::vector<TrialOutput>& trials, std::ostream& out, std::ostream& err) {
  Json checks = Json::array();
  Json reports = Json::array();
  bool all_ok = true;
  std::vector<std::string> failed;
  auto take = [&](const Check& ch, int trial) {
    Json j = to_json(ch);
    if (trial >= 0) j["trial"] = trial;
    checks.push_back(std::move(j));
    if (!ch.ok) {
      all_ok = false;
      std::ostringstream os;
      os << ch.name;
      if (trial >= 0) os << " (trial " << trial << ")";
      if (!ch.detail.empty()) os << ": " << ch.detail;
      failed.push_back(os.str());
    }
  };
  for (const auto& ch : once) take(ch, -1);
  for (std::size_t t = 0; t < trials.size(); ++t) {
    for (const auto& ch : trials[t].checks) take(ch, static_cast<int>(t));
    if (!trials[t].report.empty()) reports.push_back(trials[t].report);
  }
  Json doc{{"command", command},
           {"config",
            {{"seed", c.seed}, {"trials", c.trials}, {"dim", c.dim}, {"sigma", c.sigma}, {"N", c.truncation}}},
           {"all_ok", all_ok},
           {"checks", std::move(checks)},
           {"reports", std::move(reports)}};
  const std::string text = doc.dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
  } else {
    write_text_file(c.out, text);
  }
  if (!c.csv.empty()) {
    std::ostringstream csv;
    csv << "trial,N,norm,change\n";
    csv.precision(17);
    for (std::size_t t = 0; t < trials.size(); ++t)
      for (const auto& h : trials[t].history) csv << t << ',' << h.level << ',' << h.norm << ',' << h.change << '\n';
    write_text_file(c.csv, csv.str());
  }
  for (const auto& f : failed) err << "FAILED: " << f << '\n';
  return all_ok ? 0 : 1;
}

int run_gen(const RunConfig& c, std::ostream& out) {
  const auto inst = gen_pair(c.seed, c.dim, gen_options(c));
  const std::string text = to_json(inst).dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
  } else {
    write_text_file(c.out, text);
  }
  return 0;
}

int run_command(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.command == "gen") return run_gen(c, out);

  const auto inst = load_instance(c);
  const auto fn = load_function(c);
  const int trials = inst && fn ? 1 : c.trials;

  if (c.command == "identities") {
    auto results = run_trials(c.trials, c.workers, [&](int t) { return identities_trial(c, t); });
    return emit(c, c.command, identities_once(), results, out, err);
  }
  if (c.command == "perturb-single") {
    if (fn) need_1d(*fn);
    const double tol = c.tol.value_or(1e-6);
    auto results = run_trials(trials, c.workers, [&](int t) {
      const Pairs p = pairs_for(c, inst, t);
      const ExpSum1D f = function_1d(c, fn, t);
      const auto r = perturb_single(f, p.first.first(), p.second.first(), c.truncation, series_options(tol));
      TrialOutput o;
      add_series_checks(o, r, tol, "BSd9");
      o.report = dissdoi::to_json(r);
      o.report["trial"] = t;
      return o;
    });
    return emit(c, c.command, {}, results, out, err);
  }
  if (c.command == "perturb-pair") {
    if (fn) need_2d(*fn);
    const PairFormula formula = parse_pair_formula(c.formula);
    const double tol = c.tol.value_or(1e-5);
    auto results = run_trials(trials, c.workers, [&](int t) {
      const Pairs p = pairs_for(c, inst, t);
      const ExpSum2D f = function_2d(c, fn, t);
      const auto r = perturb_pair(f, p.first, p.second, formula, c.truncation, series_options(tol));
      TrialOutput o;
      add_series_checks(o, r, tol, std::string(to_string(formula)));
      o.report = dissdoi::to_json(r);
      o.report["trial"] = t;
      return o;
    });
    return emit(c, c.command, {}, results, out, err);
  }
  if (c.command == "bound") {
    if (fn) need_2d(*fn);
    const double tol = c.tol.value_or(1e-10);
    auto results = run_trials(trials, c.workers, [&](int t) {
      const Pairs p = pairs_for(c, inst, t);
      TrialOutput o;
      if (c.kind == "lipschitz") {
        const ExpSum2D f = function_2d(c, fn, t);
        const auto r = lipschitz_certificate(f, p.first, p.second, tol);
        o.checks.push_back(bound_check("lipschitz-constant", "fs", r.lhs, r.rhs + tol));
        o.report = dissdoi::to_json(r);
      } else if (c.kind == "besov") {
        const ExpSum2D f = multiband_2d(c, fn, t);
        const auto r = besov_lipschitz(f, p.first, p.second, tol);
        o.checks.push_back(bound_check("besov-aggregate", "osnrez", r.lhs, r.rhs + tol));
        double sum = 0.0;
        for (const auto& b : r.bands) sum += b.contribution;
        o.checks.push_back(residual_check("band-contributions-sum", "osnrez", sum, r.rhs, 1e-12 * std::max(1.0, r.rhs)));
        o.report = dissdoi::to_json(r);
      } else {
        const ExpSum2D f = function_2d(c, fn, t);
        const auto r = holder_schatten_report(f, p.first, p.second, c.alpha, c.p);
        const bool finite = std::isfinite(r.lhs_op) && std::isfinite(r.lhs_sp) && std::isfinite(r.ratio_holder) &&
                            std::isfinite(r.ratio_omega) && std::isfinite(r.ratio_schatten);
        o.checks.push_back({"ratios-finite", "SpGeld", r.lhs_sp, r.schatten_quantity, 0.0, finite, {}});
        o.report = dissdoi::to_json(r);
      }
      o.report["trial"] = t;
      return o;
    });
    return emit(c, c.command, {}, results, out, err);
  }
  if (c.command == "besov-norm") {
    auto results = run_trials(fn ? 1 : c.trials, c.workers, [&](int t) {
      TrialOutput o;
      Json bands = Json::array();
      BesovNorm norm{};
      double worst = 0.0;
      Complex constant{};
      auto reconstruct = [&](const auto& f, const auto& d) {
        constant = d.constant;
        for (const auto& term : f.terms()) {
          Complex got{};
          bool zero = true;
          if constexpr (std::is_same_v<std::decay_t<decltype(f)>, ExpSum1D>) {
            zero = term.freq == 0.0;
            for (const auto& b : d.bands)
              for (const auto& bt : b.f.terms())
                if (bt.freq == term.freq) got += bt.coeff;
          } else {
            zero = term.xi == 0.0 && term.eta == 0.0;
            for (const auto& b : d.bands)
              for (const auto& bt : b.f.terms())
                if (bt.xi == term.xi && bt.eta == term.eta) got += bt.coeff;
          }
          if (zero) got = d.constant;
          worst = std::max(worst, std::abs(got - term.coeff));
        }
        for (const auto& b : d.bands)
          bands.push_back({{"n", b.n}, {"sigma", b.f.sigma()}, {"upper", b.f.coefficient_bound()}});
      };
      if (fn && std::holds_alternative<ExpSum1D>(*fn)) {
        const auto& f = std::get<ExpSum1D>(*fn);
        reconstruct(f, decompose(f));
        norm = besov_norm(f);
      } else {
        const ExpSum2D f = fn ? std::get<ExpSum2D>(*fn) : multiband_2d(c, fn, t);
        reconstruct(f, decompose(f));
        norm = besov_norm(f);
      }
      o.checks.push_back(bound_check("grid-below-upper", "<be", norm.grid, norm.upper * (1.0 + 1e-12)));
      o.checks.push_back(residual_check("band-reconstruction", "fn", worst, 0.0, 1e-14));
      o.report = {{"trial", t}, {"upper", norm.upper}, {"grid", norm.grid}, {"bands", std::move(bands)},
                  {"constant", Json::array({constant.real(), constant.imag()})}};
      return o;
    });
    return emit(c, c.command, {}, results, out, err);
  }
  throw InvalidArgument("unknown command '" + c.command + "'");
}

}  // namespace

void validate(const RunConfig& c) {
  static const std::vector<std::string> commands{"gen", "identities", "perturb-single", "perturb-pair", "bound",
                                                 "besov-norm"};
  if (std::find(commands.begin(), commands.end(), c.command) == commands.end())
    throw InvalidArgument("unknown command '" + c.command + "'");
  if (c.trials < 1) throw InvalidArgument("--trials must be >= 1");
  if (c.dim < 1 || c.dim > 64) throw InvalidArgument("--dim must be in [1, 64]");
  if (c.truncation < 1) throw InvalidArgument("--N must be >= 1");
  if (!(c.sigma > 0.0) || !std::isfinite(c.sigma)) throw InvalidArgument("--sigma must be positive");
  if (c.workers < 1) throw InvalidArgument("--workers must be >= 1");
  if (c.tol && !(*c.tol > 0.0)) throw InvalidArgument("--tol must be positive");
  if (!(c.spread >= 0.0)) throw InvalidArgument("--spread must be >= 0");
  parse_gen_style(c.style);
  parse_pair_formula(c.formula);
  if (c.kind != "lipschitz" && c.kind != "besov" && c.kind != "holder-schatten")
    throw InvalidArgument("--kind must be lipschitz, besov or holder-schatten");
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    return run_command(config, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NotDissipative& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NotCommuting& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "FAILED: " << e.what() << '\n';
    return 1;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dissipative functional calculus and double operator integral checks"};
  app.require_subcommand(1);
  RunConfig c;
  double tol = 0.0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--trials", c.trials, "number of random trials");
    sub->add_option("--dim", c.dim, "matrix dimension");
    sub->add_option("--sigma", c.sigma, "bandwidth");
    sub->add_option("--N", c.truncation, "series truncation");
    sub->add_option("--tol", tol, "check tolerance");
    sub->add_option("--instance", c.instance, "instance JSON file");
    sub->add_option("--function", c.function, "function JSON file");
    sub->add_option("--out", c.out, "output file (default stdout)");
    sub->add_option("--csv", c.csv, "CSV file for partial-sum histories");
    sub->add_option("--workers", c.workers, "worker threads");
    sub->add_option("--style", c.style, "generator style: normal, nilpotent-shift, polynomial");
    sub->add_option("--spread", c.spread, "distance between generated pairs");
  };
  for (const char* name : {"gen", "identities", "perturb-single", "besov-norm"}) common(app.add_subcommand(name));
  auto* pair = app.add_subcommand("perturb-pair");
  common(pair);
  pair->add_option("--formula", c.formula, "31, 32 or glafor");
  auto* bound = app.add_subcommand("bound");
  common(bound);
  bound->add_option("--kind", c.kind, "lipschitz, besov or holder-schatten");
  bound->add_option("--alpha", c.alpha, "Hoelder exponent");
  bound->add_option("--p", c.p, "Schatten exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  for (auto* sub : app.get_subcommands()) c.command = sub->get_name();
  for (auto* sub : app.get_subcommands())
    if (sub->count("--tol") > 0) c.tol = tol;
  return run(c, out, err);
}

}  // namespace dissdoi
