#ifndef KUZLAB_DRIVER_HPP_
#define KUZLAB_DRIVER_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kuzlab/asymptotics.hpp"
#include "kuzlab/config.hpp"
#include "kuzlab/distdist.hpp"
#include "kuzlab/error.hpp"
#include "kuzlab/io.hpp"
#include "kuzlab/measures.hpp"
#include "kuzlab/parallel.hpp"
#include "kuzlab/sharpness.hpp"
#include "kuzlab/spectral.hpp"
#include "kuzlab/specfun.hpp"

#ifndef KUZLAB_BUILD_ID
#define KUZLAB_BUILD_ID "kuzlab-dev"
#endif

namespace kuzlab {

struct RunOptions {
  std::string outDir = ".";
  std::optional<std::uint64_t> seed;         // overrides the config
  std::optional<double> budgetPoints;        // overrides the config
  std::vector<std::string> positional;       // e.g. "2 1" for constants
};

struct RunResult {
  int status = 0;
  std::vector<std::string> artifacts;
  json summary;  // also written to disk by the command
};

inline json constants_json(const ConstantBundle &c) {
  return {{"n", c.n},         {"s", c.s},           {"volBs", c.volBs},     {"volBns", c.volBns},
          {"Cns", c.Cns},     {"gammaS", c.gammaS}, {"gammaNS", c.gammaNS}, {"kappaS", c.kappaS}};
}

inline json record_to_json(const ConstructionRecord &rec) {
  json ks = json::array();
  for (const auto &k : rec.frequencies) ks.push_back(k);
  json j = {{"s", rec.s},
            {"mode", rec.mode == ConstructionMode::kGSide ? "gside" : "full"},
            {"amplitudes", rec.amplitudes},
            {"frequencies", ks},
            {"eta", rec.eta},
            {"U", rec.U},
            {"r", rec.r},
            {"eps0", rec.eps0},
            {"L0", rec.L0},
            {"C0", rec.C0},
            {"block_limit", rec.blockLimit}};
  if (rec.delta) j["delta"] = *rec.delta;
  return j;
}

namespace detail {

class Runner {
 public:
  Runner(const json &cfg, const RunOptions &opt) : cfg_(cfg), opt_(opt) {
    std::filesystem::create_directories(opt.outDir);
    budget_ = opt.budgetPoints.value_or(config::get_or<double>(cfg, "budget_points", kDefaultLatticeBudget));
    if (!(budget_ > 0)) throw ConfigError("budget_points must be positive");
  }

  std::uint64_t seed() const {
    if (opt_.seed) return *opt_.seed;
    if (!cfg_.contains("seed")) throw ConfigError("this command needs an explicit 'seed'");
    return config::get<std::uint64_t>(cfg_, "seed");
  }

  double budget() const { return budget_; }
  const json &cfg() const { return cfg_; }
  MeasureModel measure() const { return config::parse_measure(config::at(cfg_, "measure")); }

  std::ofstream open(const std::string &name) {
    artifacts_.push_back(name);
    return open_output((std::filesystem::path(opt_.outDir) / name).string());
  }

  void write_json(const std::string &name, const json &j) {
    auto f = open(name);
    f << j.dump(2) << '\n';
  }

  const std::vector<std::string> &artifacts() const { return artifacts_; }

 private:
  const json &cfg_;
  const RunOptions &opt_;
  double budget_ = kDefaultLatticeBudget;
  std::vector<std::string> artifacts_;
};

inline json run_constants(Runner &R, const RunOptions &opt) {
  int n;
  double s;
  if (opt.positional.size() >= 2) {
    try {
      n = std::stoi(opt.positional[0]);
      s = std::stod(opt.positional[1]);
    } catch (const std::exception &) {
      throw ConfigError("constants expects two numbers: n s");
    }
  } else {
    n = config::get<int>(R.cfg(), "n");
    s = config::get<double>(R.cfg(), "s");
  }
  if (!(s > 0 && s < n)) throw ConfigError("constants: requires 0 < s < n (got n = " +
                                           std::to_string(n) + ", s = " + format_double(s) + ")");
  const json j = constants_json(constant_bundle(n, s));
  R.write_json("constants.json", j);
  std::cout << j.dump(2) << '\n';
  return j;
}

inline json run_coeffs(Runner &R) {
  const auto mu = R.measure();
  const int n = mu.ambient_dimension();
  const auto kmax = config::get_or<std::int64_t>(R.cfg(), "k_max", 4);
  if (kmax < 0 || std::pow(2.0 * kmax + 1.0, n) > 1e6) throw ConfigError("k_max out of range");
  std::vector<std::string> header;
  for (int i = 0; i < n; ++i) header.push_back("k" + std::to_string(i + 1));
  for (const char *h : {"re", "im", "abs"}) header.push_back(h);
  auto f = R.open("coeffs.csv");
  CsvWriter w(f, header);
  LatticeVector k(n, -kmax);
  std::size_t rows = 0;
  for (;;) {
    const auto c = fourier_coefficient(mu, k);
    std::vector<double> row(k.begin(), k.end());
    row.push_back(c.real());
    row.push_back(c.imag());
    row.push_back(std::abs(c));
    w.row(row);
    ++rows;
    int i = n - 1;
    while (i >= 0 && k[i] == kmax) k[i--] = -kmax;
    if (i < 0) break;
    ++k[i];
  }
  json j = {{"measure", mu.describe()}, {"k_max", kmax}, {"rows", rows}, {"total_mass", total_mass(mu)}};
  R.write_json("summary.json", j);
  return j;
}

inline json run_kuznecov(Runner &R) {
  const auto mu = R.measure();
  const auto grid = config::parse_grid(config::at(R.cfg(), "grid"));
  const double h = config::get_or<double>(R.cfg(), "smoothing", 0.1);
  const auto S = kuznecov_sweep(mu, grid, {R.budget(), h});
  std::optional<double> A = S.A;
  if (R.cfg().contains("A")) A = config::get<double>(R.cfg(), "A");
  VerdictThresholds th;
  th.converge = config::get_or<double>(R.cfg(), "converge_threshold", th.converge);
  th.oscillate = config::get_or<double>(R.cfg(), "oscillate_threshold", th.oscillate);
  th.period = config::get_or<double>(R.cfg(), "period", th.period);
  const auto rep = ratio_sweep(S, A, th);
  {
    auto f = R.open("kuznecov.csv");
    write_series_csv(f, S);
  }
  {
    auto f = R.open("sweep.csv");
    write_sweep_csv(f, rep);
  }
  json j = {{"measure", S.measure},
            {"n", S.n},
            {"s", S.s},
            {"A", A ? json(*A) : json(nullptr)},
            {"lambda_max", grid.back()},
            {"final_N", S.values.back()},
            {"final_ratio", rep.ratios.back()},
            {"fittedExponent", rep.exponent.slope},
            {"exponentHalfWidth", rep.exponent.halfWidth},
            {"exponentWindowDecades", 1.5},
            {"amplitude", rep.amplitude},
            {"lastPeriodAmplitude", rep.lastPeriodAmplitude},
            {"previousPeriodAmplitude", rep.previousPeriodAmplitude},
            {"amplitudeChange", rep.amplitudeChange},
            {"verdict", rep.verdict},
            {"convergeThreshold", th.converge},
            {"oscillateThreshold", th.oscillate},
            {"period", th.period},
            {"smoothingHalfWidth", h}};
  R.write_json("summary.json", j);
  return j;
}

inline json run_heat(Runner &R) {
  const auto mu = R.measure();
  const auto tg = config::parse_grid(config::at(R.cfg(), "t_grid"));
  const double eps = config::get_or<double>(R.cfg(), "eps", 1e-12);
  const auto H = heat_sum(mu, tg, eps, R.budget());
  const int n = mu.ambient_dimension();
  std::optional<double> pred;
  const double s = mu.growth_dimension();
  const auto A = averaged_density_exact(mu);
  {
    auto f = R.open("heat.csv");
    CsvWriter w(f, {"t", "H", "H_scaled", "H_over_pred", "Lambda", "tail_bound"});
    for (const auto &h : H) {
      double ratio = NAN;
      if (A && s > 0 && s < n)
        ratio = h.H / (constant_bundle(n, s).gammaNS * *A * std::pow(h.t, -(n - s) / 2.0));
      w.row({h.t, h.H, h.H * std::pow(4.0 * std::numbers::pi * h.t, 0.5 * n), ratio, h.Lambda, h.tailBound});
    }
  }
  json j = {{"measure", mu.describe()}, {"points", H.size()}, {"eps", eps},
            {"t_min", tg.front()},      {"t_max", tg.back()}, {"H_at_t_min", H.front().H}};
  R.write_json("summary.json", j);
  return j;
}

inline DistanceProfile profile_from_config(Runner &R, const json &pj, const MeasureModel *mu) {
  const auto kind = config::get<std::string>(pj, "kind");
  if (kind == "synthetic") {
    std::vector<ProfileBlock> blocks;
    for (const auto &b : config::at(pj, "blocks")) {
      if (!b.is_array() || b.size() != 2) throw ConfigError("synthetic blocks are [r_break, level] pairs");
      blocks.push_back({b[0].get<double>(), b[1].get<double>()});
    }
    return synthetic_profile(blocks, config::get<double>(pj, "s"));
  }
  if (!mu) throw ConfigError("profile kind '" + kind + "' needs a measure");
  if (kind == "empirical") return empirical_profile(*mu, config::get_or<std::size_t>(pj, "pairs", 1000000), R.seed());
  if (kind == "renewal") return renewal_profile(*mu);
  if (kind == "analytic") return analytic_profile(*mu);
  throw ConfigError("unknown profile kind '" + kind + "'");
}

inline json run_distprof(Runner &R) {
  std::optional<MeasureModel> mu;
  if (R.cfg().contains("measure")) mu = R.measure();
  const auto P = profile_from_config(R, config::at(R.cfg(), "profile"), mu ? &*mu : nullptr);
  const auto rg = config::parse_grid(config::at(R.cfg(), "r_grid"));
  {
    auto f = R.open("profile.csv");
    write_profile_csv(f, P, rg);
  }
  json j = {{"profile", P.kind()}, {"s", P.sMeta}, {"massSquared", P.massSquared}, {"diam", P.diam}};
  if (R.cfg().contains("t_grid")) {
    const auto tg = config::parse_grid(R.cfg().at("t_grid"));
    auto f = R.open("gaussian.csv");
    CsvWriter w(f, {"t", "G", "G_over_ts", "kappa_a_minus", "kappa_a_plus"});
    bool sandwich = true;
    for (double t : tg) {
      const auto row = gaussian_sandwich(P, t);
      sandwich = sandwich && row.holds;
      w.row({t, gaussian_average(P, t), row.scaledG, row.lower + row.tolerance, row.upper - row.tolerance});
    }
    j["sandwichHolds"] = sandwich;
    j["sandwichWindow"] = "[sqrt(t)/40, 40 sqrt(t)]";
  }
  const auto win = density_window(P, rg.front(), rg.back());
  j["window_r_min"] = rg.front();
  j["window_r_max"] = rg.back();
  j["aMinus"] = win.aMinus;
  j["aPlus"] = win.aPlus;
  j["windowPoints"] = 200;
  R.write_json("summary.json", j);
  return j;
}

inline json run_energy(Runner &R) {
  const auto mu = R.measure();
  const auto us = config::get<std::vector<double>>(R.cfg(), "u");
  const auto pairs = config::get_or<std::size_t>(R.cfg(), "pairs", 1000000);
  const double zmax = config::get_or<double>(R.cfg(), "agreement_sigma", 4.0);
  std::optional<DistanceProfile> P;
  if (R.cfg().contains("profile")) P = profile_from_config(R, R.cfg().at("profile"), &mu);
  json j = {{"measure", mu.describe()}, {"pairs", pairs}, {"agreementSigma", zmax}};
  auto f = R.open("energy.csv");
  CsvWriter w(f, {"u", "layercake", "montecarlo", "stderr", "z"});
  bool agree = true;
  for (double u : us) {
    const auto mc = riesz_energy_montecarlo(mu, u, pairs, R.seed());
    double lc = NAN, z = NAN;
    if (P) {
      lc = riesz_energy_layercake(*P, u).value;
      z = (mc.value - lc) / *mc.stderr_;
      agree = agree && std::abs(z) <= zmax;
    }
    w.row({u, lc, mc.value, *mc.stderr_, z});
  }
  j["allAgree"] = agree;
  R.write_json("summary.json", j);
  return j;
}

inline json run_karamata(Runner &R) {
  const double beta = config::get<double>(R.cfg(), "beta");
  const double C = config::get<double>(R.cfg(), "C");
  KaramataReport rep;
  std::string source = config::get_or<std::string>(R.cfg(), "source", "synthetic");
  if (source == "synthetic") {
    const double c = C / gamma_fn(beta + 1.0);
    rep = karamata_check([&](double S) { return c * std::pow(S, beta); }, beta, C,
                         config::parse_grid(config::at(R.cfg(), "t_grid")),
                         config::parse_grid(config::at(R.cfg(), "S_grid")));
  } else if (source == "spectral") {
    const auto mu = R.measure();
    const auto S = kuznecov_sweep(mu, config::parse_grid(config::at(R.cfg(), "grid")), {R.budget(), 0.1});
    const auto H = heat_sum(mu, config::parse_grid(config::at(R.cfg(), "t_grid")), 1e-12, R.budget());
    rep = karamata_check_spectral(S, H, beta, C);
  } else {
    throw ConfigError("karamata source must be 'synthetic' or 'spectral'");
  }
  {
    auto f = R.open("karamata.csv");
    CsvWriter w(f, {"t", "laplace", "laplace_t_beta_over_C"});
    for (std::size_t i = 0; i < rep.tGrid.size(); ++i)
      w.row({rep.tGrid[i], rep.laplace[i], rep.laplace[i] * std::pow(rep.tGrid[i], beta) / C});
  }
  const double tol = config::get_or<double>(R.cfg(), "tolerance", 0.01);
  json j = {{"source", source},
            {"beta", beta},
            {"C", C},
            {"laplaceDeviation", rep.laplaceDeviation},
            {"countingDeviation", rep.countingDeviation},
            {"tolerance", tol},
            {"pass", rep.laplaceDeviation <= tol && rep.countingDeviation <= tol}};
  R.write_json("summary.json", j);
  return j;
}

inline json run_mixture(Runner &R) {
  MixtureSetup m;
  m.n = config::get_or<int>(R.cfg(), "n", m.n);
  m.s1 = config::get_or<int>(R.cfg(), "s1", m.s1);
  m.s2 = config::get_or<int>(R.cfg(), "s2", m.s2);
  m.offset1 = config::get_or<std::vector<double>>(R.cfg(), "offset1", m.offset1);
  m.offset2 = config::get_or<std::vector<double>>(R.cfg(), "offset2", m.offset2);
  const auto grid = config::parse_grid(config::at(R.cfg(), "grid"));
  const auto rep = mixture_experiment(m, grid, config::get_or<double>(R.cfg(), "fit_lo", 0.0), R.budget());
  {
    auto f = R.open("mixture.csv");
    CsvWriter w(f, {"lambda", "N1", "N2", "N", "cross", "cross_bound"});
    for (const auto &r : rep.rows) w.row({r.lambda, r.N1, r.N2, r.N, r.cross, r.crossBound});
  }
  json j = {{"n", m.n},
            {"s1", m.s1},
            {"s2", m.s2},
            {"crossBoundHolds", rep.crossBoundHolds},
            {"minSlack", rep.minSlack},
            {"fittedExponent", rep.exponent.slope},
            {"exponentHalfWidth", rep.exponent.halfWidth},
            {"fitLo", rep.fitLo},
            {"fitHi", rep.fitHi},
            {"expectedExponent", m.n - m.s1},
            {"exponentTolerance", rep.exponentTolerance},
            {"exponentMatches", rep.exponentMatches},
            {"finalComponentRatio", rep.finalComponentRatio}};
  R.write_json("summary.json", j);
  return j;
}

inline json run_blocks(Runner &R) {
  const int s = config::get_or<int>(R.cfg(), "s", 1);
  ConstructionOptions co;
  const auto mode = config::get_or<std::string>(R.cfg(), "mode", "gside");
  if (mode == "full") co.mode = ConstructionMode::kFull;
  else if (mode != "gside") throw ConfigError("mode must be 'gside' or 'full'");
  if (R.cfg().contains("delta")) co.delta = config::get<double>(R.cfg(), "delta");
  co.frequencies = config::get_or<std::vector<std::int64_t>>(R.cfg(), "frequencies", {});
  co.integerBudget = config::get_or<double>(R.cfg(), "integer_budget", co.integerBudget);
  const auto rec = build_construction(s, config::get<std::vector<double>>(R.cfg(), "amplitudes"), co);
  R.write_json("construction.json", record_to_json(rec));
  json j = {{"mode", mode}, {"blocks", rec.amplitudes.size()}};
  if (rec.mode == ConstructionMode::kGSide) {
    auto f = R.open("blocks.csv");
    CsvWriter w(f, {"block", "q_max", "q_bound", "t", "scaled_G", "target", "deviation", "c", "c_refined"});
    bool all = true;
    for (std::size_t m = 1; m <= rec.amplitudes.size(); ++m) {
      const auto b = block_deviation_check(rec, m);
      all = all && b.hypothesisHolds && b.deviationPositive && b.stable;
      w.row({static_cast<double>(m), b.qMaxOnBlock, b.qBound, b.t, b.scaledG, b.target, b.deviation,
             b.measuredC, b.measuredCRefined});
      if (m == 1) {
        j["c_block1"] = b.measuredC;
        j["proofConstant"] = b.proofConstant;
      }
    }
    const auto ctl = q_control_check(rec);
    j["allBlocksPass"] = all;
    j["stabilityTolerance"] = 0.2;
    j["controlMaxDeviation"] = ctl.maxDeviation;
    j["controlBound"] = ctl.bound;
    j["controlHolds"] = ctl.holds;
  } else {
    j["note"] = "full-mode frequencies are recorded only; no spectral sweep is attempted";
    j["k1"] = rec.frequencies.front().front();
  }
  R.write_json("summary.json", j);
  return j;
}

}  // namespace detail

inline const std::vector<std::string> &commands() {
  static const std::vector<std::string> c{"constants", "coeffs", "kuznecov", "heat", "distprof",
                                          "energy",    "karamata", "mixture", "blocks"};
  return c;
}

inline int exit_code_for(const std::string &kind) {
  if (kind == "config" || kind == "domain") return 2;
  if (kind == "budget") return 3;
  return 1;
}

namespace detail {

inline RunResult finish(const std::string &command, const json &cfg, const RunOptions &opt, RunResult res,
                        std::vector<std::string> artifacts) {
  json manifest = {{"command", command}, {"build", KUZLAB_BUILD_ID}, {"config", cfg}};
  if (opt.seed) manifest["seed_override"] = *opt.seed;
  if (opt.budgetPoints) manifest["budget_override"] = *opt.budgetPoints;
  if (!opt.positional.empty()) manifest["arguments"] = opt.positional;
  manifest["status"] = res.status == 0 ? "ok" : "error";
  if (res.status != 0) {
    std::cerr << res.summary.dump() << '\n';
    std::ofstream((std::filesystem::path(opt.outDir) / "error.json").string()) << res.summary.dump(2) << '\n';
    artifacts.push_back("error.json");
  }
  manifest["outputs"] = artifacts;
  std::ofstream((std::filesystem::path(opt.outDir) / "manifest.json").string()) << manifest.dump(2) << '\n';
  artifacts.push_back("manifest.json");
  res.artifacts = artifacts;
  return res;
}

inline RunResult failure(const std::exception &e) {
  RunResult res;
  if (const auto *k = dynamic_cast<const Error *>(&e)) {
    res.status = exit_code_for(k->kind());
    res.summary = {{"error", k->kind()}, {"message", e.what()}};
  } else {
    res.status = 1;
    res.summary = {{"error", "internal"}, {"message", e.what()}};
  }
  return res;
}

}  // namespace detail

// Runs one command. Errors are reported as {"error": kind, "message": ...}
// both on stderr and in error.json; the manifest is written in every case.
inline RunResult run(const std::string &command, const json &cfg, const RunOptions &opt) {
  std::filesystem::create_directories(opt.outDir);
  RunResult res;
  std::vector<std::string> artifacts;
  try {
    detail::Runner R(cfg, opt);
    if (command == "constants") res.summary = detail::run_constants(R, opt);
    else if (command == "coeffs") res.summary = detail::run_coeffs(R);
    else if (command == "kuznecov") res.summary = detail::run_kuznecov(R);
    else if (command == "heat") res.summary = detail::run_heat(R);
    else if (command == "distprof") res.summary = detail::run_distprof(R);
    else if (command == "energy") res.summary = detail::run_energy(R);
    else if (command == "karamata") res.summary = detail::run_karamata(R);
    else if (command == "mixture") res.summary = detail::run_mixture(R);
    else if (command == "blocks") res.summary = detail::run_blocks(R);
    else throw ConfigError("unknown command '" + command + "'");
    artifacts = R.artifacts();
  } catch (const std::exception &e) {
    res = detail::failure(e);
  }
  return detail::finish(command, cfg, opt, std::move(res), std::move(artifacts));
}

// Same as run() but loads the config file first; an empty path means an
// empty config (enough for `constants n s`).
inline RunResult run_file(const std::string &command, const std::string &configPath, const RunOptions &opt) {
  json cfg = json::object();
  if (!configPath.empty()) {
    try {
      cfg = config::load_file(configPath);
    } catch (const std::exception &e) {
      std::filesystem::create_directories(opt.outDir);
      return detail::finish(command, json{{"config_path", configPath}}, opt, detail::failure(e), {});
    }
  }
  return run(command, cfg, opt);
}

}  // namespace kuzlab

#endif  // KUZLAB_DRIVER_HPP_
