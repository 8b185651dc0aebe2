// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. argv[1] is the fclt-lab binary used by the determinism check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fclt/asymptotics.hpp"
#include "fclt/conditions.hpp"
#include "fclt/mc_harness.hpp"
#include "fclt/ned.hpp"
#include "fclt/process_sim.hpp"
#include "fclt/rng.hpp"

using namespace fclt;
namespace fs = std::filesystem;

namespace {

// Master seeds, fixed before any run.
constexpr std::uint64_t kSeedClt = 20240101;
constexpr std::uint64_t kSeedGarch = 20240103;
constexpr std::uint64_t kSeedArma = 20240104;
constexpr std::uint64_t kSeedBahadur = 20240105;
constexpr std::uint64_t kSeedRepr = 20240106;
constexpr std::uint64_t kSeedNed = 20240107;
constexpr std::uint64_t kSeedDet = 20240109;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

AugGarchSpec garch11() {
  AugGarchSpec s;
  s.omega = 0.1;
  s.alpha = {0.1};
  s.beta = {0.8};
  return s;
}

ArmaSpec ar1() {
  ArmaSpec a;
  a.phi = {-0.5};
  return a;
}

const char* name(McVerdict v) {
  switch (v) {
    case McVerdict::pass: return "pass";
    case McVerdict::fail: return "fail";
    default: return "inconclusive";
  }
}

std::string entries_line(const CltReport& r) {
  static const char* labels[] = {"g11", "g22", "g12"};
  std::string s;
  for (int k = 0; k < 3; ++k) {
    const auto& e = r.entries[k];
    s += std::string(k ? ", " : "") + labels[k] + " " + fmt(e.empirical) + " vs " +
         fmt(e.target) + " (tol " + fmt(e.tolerance) + ")";
  }
  return s;
}

// 1. iid CLT against diag(pi/2, 2).
Outcome iid_clt() {
  ExperimentConfig cfg;
  cfg.spec = IidSpec{InnovationDist::normal()};
  cfg.p = 0.5;
  cfg.r = 2;
  cfg.n = 5000;
  cfg.reps = 2000;
  cfg.seed = kSeedClt;
  const auto rep = run_clt_experiment(cfg);
  const bool targets = std::abs(rep.target.g11 - std::numbers::pi / 2.0) < 1e-9 &&
                       std::abs(rep.target.g22 - 2.0) < 1e-9 && std::abs(rep.target.g12) < 1e-9;
  return {targets && rep.verdict == McVerdict::pass && rep.used == cfg.reps,
          entries_line(rep) + "; verdict " + name(rep.verdict)};
}

// 2. Brownian scaling of the partial-sum process.
Outcome fclt_scaling() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::fclt;
  cfg.spec = IidSpec{InnovationDist::normal()};
  cfg.n = 5000;
  cfg.reps = 2000;
  cfg.seed = kSeedClt;
  cfg.t_grid = {0.25, 0.5, 0.75, 1.0};
  const auto rep = run_fclt_experiment(cfg);
  double max_scaling = 0.0;
  double max_inc = 0.0;
  for (const auto& row : rep.rows)
    for (const auto& r : row.scaling_z)
      for (double z : r) max_scaling = std::max(max_scaling, std::abs(z));
  for (const auto& inc : rep.increments)
    for (const auto& r : inc.z)
      for (double z : r) max_inc = std::max(max_inc, std::abs(z));
  return {rep.verdict == McVerdict::pass,
          "max |z| scaling " + fmt(max_scaling) + ", increments " + fmt(max_inc) + "; verdict " +
              name(rep.verdict)};
}

// 3. GARCH(1,1): checker value, then Monte Carlo against replication Gamma.
Outcome garch_self_consistency() {
  const auto cond = check_polynomial_condition(garch11(), 2);
  // E[(0.1 e^2 + 0.8)^2] = 0.01 * 3 + 2 * 0.08 + 0.64
  const double oracle = 0.01 * 3.0 + 0.16 + 0.64;
  const double moment = cond.details.at("c_moment_sum").get<double>();
  const bool checker = cond.satisfied && std::abs(moment - oracle) < 1e-9;

  ExperimentConfig cfg;
  cfg.spec = garch11();
  cfg.p = 0.95;
  cfg.r = 2;
  cfg.n = 10'000;
  cfg.reps = 2000;
  cfg.max_lag = 50;
  cfg.lrc_reps = 2000;
  cfg.lrc_n = 10'000;
  cfg.rel_tol = 0.10;
  cfg.seed = kSeedGarch;
  const auto rep = run_clt_experiment(cfg);
  return {checker && rep.verdict == McVerdict::pass,
          "E|c|^2 = " + fmt(moment) + " (satisfied " + (cond.satisfied ? "yes" : "no") + "); " +
              entries_line(rep) + "; verdict " + name(rep.verdict)};
}

// 4. AR(1): same comparison plus the long-run variance of X.
Outcome arma_self_consistency() {
  ExperimentConfig cfg;
  cfg.spec = ar1();
  cfg.p = 0.95;
  cfg.r = 1;
  cfg.n = 10'000;
  cfg.reps = 2000;
  cfg.max_lag = 50;
  cfg.lrc_reps = 2000;
  cfg.lrc_n = 10'000;
  cfg.rel_tol = 0.10;
  cfg.seed = kSeedArma;
  const auto rep = run_clt_experiment(cfg);
  // Var X_0 = 1 / (1 - 0.25); long-run variance (1 + 0.5) / (1 - 0.5) Var X_0.
  const double exact = 3.0 * (4.0 / 3.0);
  const double var_u = rep.lrc ? rep.lrc->sigma[0][0] : NAN;
  const bool lrv_ok = std::abs(var_u / exact - 1.0) <= 0.05;
  return {lrv_ok && rep.verdict == McVerdict::pass,
          "Var U " + fmt(var_u) + " vs " + fmt(exact) + "; " + entries_line(rep) + "; verdict " +
              name(rep.verdict)};
}

std::string ladder_line(const DecayTable& t, bool use_std) {
  std::string s;
  for (const auto& row : t.rows)
    s += "n=" + std::to_string(row.n) + ":" + fmt(use_std ? row.std : row.median) + " ";
  return s + "verdict " + name(t.verdict);
}

// 5. Bahadur remainder ladders.
Outcome bahadur_decay() {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::bahadur;
  cfg.p = 0.5;
  cfg.reps = 500;
  cfg.n_ladder = {500, 2000, 8000};
  cfg.seed = kSeedBahadur;
  cfg.spec = IidSpec{InnovationDist::normal()};
  const auto iid = run_bahadur_experiment(cfg);
  cfg.spec = ar1();
  const auto arma = run_bahadur_experiment(cfg);
  return {iid.verdict == McVerdict::pass && arma.verdict == McVerdict::pass,
          "iid median " + ladder_line(iid, false) + "; AR(1) median " + ladder_line(arma, false)};
}

// -sqrt(n) (xbar - mu)^2 in binary128, rounded once.
double r2_gap_oracle(const std::vector<double>& x, double mu) {
  __float128 s = 0;
  for (double v : x) s += v;
  const __float128 d = s / static_cast<__float128>(x.size()) - static_cast<__float128>(mu);
  const __float128 rootn = std::sqrt(static_cast<double>(x.size()));
  return static_cast<double>(-(rootn * (d * d)));
}

// 6. Representation gap: the r = 2 identity, then the std ladders.
Outcome representation() {
  const ProcessKernel k(IidSpec{InnovationDist::normal()});
  int mismatches = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto path = k.simulate(200 + 50 * i, 0, kSeedRepr, i);
    if (representation_gap(path.view(), 2, 0.0, 0.0) != r2_gap_oracle(path.values, 0.0))
      ++mismatches;
  }

  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::representation;
  cfg.reps = 500;
  cfg.n_ladder = {500, 2000, 8000};
  cfg.seed = kSeedRepr;
  cfg.spec = garch11();
  cfg.r = 2;
  const auto g = run_representation_experiment(cfg);
  cfg.spec = IidSpec{InnovationDist::normal()};
  cfg.r = 1;
  const auto iid = run_representation_experiment(cfg);
  return {mismatches == 0 && g.verdict == McVerdict::pass && iid.verdict == McVerdict::pass,
          std::to_string(mismatches) + "/100 identity mismatches; GARCH r=2 std " +
              ladder_line(g, true) + "; iid r=1 std " + ladder_line(iid, true)};
}

// 7. NED scans.
Outcome ned_decay() {
  std::vector<std::size_t> ks;
  for (std::size_t k = 0; k <= 10; ++k) ks.push_back(k);
  const auto ar = ned_scan(ar1(), Functional::identity(), ks, 64, 4096, kSeedNed);
  double worst = 0.0;
  bool ar_ok = true;
  for (const auto& e : ar.estimates) {
    const double exact = std::pow(0.5, static_cast<double>(e.k + 1)) * std::sqrt(4.0 / 3.0);
    const double z = (e.nu_hat_jk - exact) / e.se_jk;
    worst = std::max(worst, std::abs(z));
    if (!(std::abs(z) <= 3.0)) ar_ok = false;
  }

  std::vector<std::size_t> gk;
  for (std::size_t k = 1; k <= 12; ++k) gk.push_back(k);
  const auto g = ned_scan(garch11(), Functional::abs_pow(2), gk, 64, 4096, kSeedNed);
  const bool g_ok = g.fit.model == DecayFit::Model::geometric && g.fit.r_squared > 0.9;

  ArmaSpec ma;
  ma.theta = {0.5};
  std::vector<std::size_t> mk(ks.begin() + 1, ks.end());
  const auto m = ned_scan(ma, Functional::identity(), mk, 64, 4096, kSeedNed);
  bool ma_ok = true;
  for (const auto& e : m.estimates)
    if (!(e.nu_hat <= 3.0 * e.se)) ma_ok = false;

  return {ar_ok && g_ok && ma_ok,
          "AR(1) max |z| " + fmt(worst) + "; GARCH abs_pow:2 " + to_string(g.fit.model) +
              " rate " + fmt(g.fit.rate) + " R^2 " + fmt(g.fit.r_squared) + "; MA(1) " +
              (ma_ok ? "zero" : "nonzero") + " for k >= 1"};
}

// 8. Closed-form table rows against quadrature.
Outcome table_rows() {
  const GarchModel models[] = {GarchModel::apgarch, GarchModel::agarch, GarchModel::gjr,
                               GarchModel::garch,   GarchModel::arch,   GarchModel::tgarch,
                               GarchModel::tsgarch, GarchModel::pgarch, GarchModel::ngarch,
                               GarchModel::vgarch,  GarchModel::mgarch, GarchModel::egarch};
  int closed = 0;
  int bad = 0;
  double worst = 0.0;
  for (auto m : models) {
    for (int order : {1, 2}) {
      for (int r : {1, 2}) {
        AugGarchSpec s;
        s.model = m;
        s.p = order;
        s.q = m == GarchModel::arch ? 0 : order;
        s.omega = 0.1;
        for (int i = 0; i < order; ++i) {
          s.alpha.push_back(0.08 / (i + 1));
          if (m != GarchModel::arch) s.beta.push_back(0.6 / (i + 1));
          s.gamma.push_back(0.2 / (i + 1));
        }
        if (m == GarchModel::garch || m == GarchModel::arch || m == GarchModel::pgarch ||
            m == GarchModel::tsgarch)
          s.gamma.clear();
        if (m == GarchModel::tgarch || m == GarchModel::tsgarch || m == GarchModel::apgarch ||
            m == GarchModel::pgarch)
          s.delta = 0.5;
        if (m == GarchModel::mgarch || m == GarchModel::egarch) {
          s.lambda = LambdaKind::log;
          s.omega = 0.0;
        }
        const auto row = table_row(s, r);
        if (row.details.contains("relative_difference")) {
          ++closed;
          const double rel = row.details.at("relative_difference").get<double>();
          worst = std::max(worst, rel);
          if (!(rel <= 1e-6)) ++bad;
        }
      }
    }
  }
  const auto g2 = table_row(garch11(), 2);
  const bool note = g2.discrepancy_note.has_value();
  return {closed > 0 && bad == 0 && note,
          std::to_string(closed) + " closed-form rows, worst relative difference " + fmt(worst) +
              "; GARCH r=2 note " + (note ? "present" : "missing")};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 9. Byte-identical reports across --threads through the binary.
Outcome determinism(const std::string& lab) {
  if (lab.empty()) return {false, "no fclt-lab path given"};
  const fs::path dir = fs::temp_directory_path() / ("fclt_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto file = [&](const std::string& n) { return (dir / n).string(); };
  std::ofstream(file("garch.json")) << R"({"model":"garch","omega":0.1,"alpha":[0.1],"beta":[0.8]})";
  const std::string seed = std::to_string(kSeedDet);
  const std::string iid = R"({"model":"iid","innovation":{"kind":"normal"}})";
  const std::string gspec = R"({"model":"garch","omega":0.1,"alpha":[0.1],"beta":[0.8]})";
  const std::vector<std::pair<std::string, std::string>> configs = {
      {"clt", R"({"experiment":"clt","spec":)" + iid + R"(,"n":2000,"reps":200})"},
      {"fclt", R"({"experiment":"fclt","spec":)" + iid +
                   R"(,"n":2000,"reps":200,"t_grid":[0.25,0.5,0.75,1.0]})"},
      {"garch_clt", R"({"experiment":"clt","spec":)" + gspec +
                        R"(,"p":0.95,"n":2000,"reps":100,"lrc_reps":100,"lrc_n":2000,)"
                        R"("pilot_draws":1000000})"},
      {"bahadur", R"({"experiment":"bahadur","spec":{"model":"arma","phi":[-0.5],"theta":[]},)"
                  R"("n_ladder":[500,2000],"reps":100})"},
      {"representation", R"({"experiment":"representation","spec":)" + gspec +
                             R"(,"r":2,"n_ladder":[500,2000],"reps":100})"}};
  std::vector<std::vector<std::string>> runs;
  for (const auto& [label, text] : configs) {
    std::ofstream(file(label + ".cfg.json")) << text;
    runs.push_back({"mc", "--config", file(label + ".cfg.json"), "--seed", seed});
  }
  runs.push_back({"ned-scan", "--spec", file("garch.json"), "--functional", "abs_pow:2", "--kmax",
                  "6", "--reps", "16", "--n", "512", "--seed", seed});
  runs.push_back({"simulate", "--spec", file("garch.json"), "--n", "5000", "--seed", seed});

  int compared = 0;
  std::string differing;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::string reference;
    for (int threads : {1, 2, 4}) {
      const std::string out = file("run" + std::to_string(i) + "_t" + std::to_string(threads));
      std::string cmd = "'" + lab + "'";
      for (const auto& a : runs[i]) cmd += " '" + a + "'";
      cmd += " --threads " + std::to_string(threads) + " --out '" + out + "' 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) {
        fs::remove_all(dir);
        return {false, "command failed: " + runs[i][0] + " " + runs[i][2]};
      }
      const auto bytes = slurp(out);
      if (threads == 1)
        reference = bytes;
      else if (bytes != reference || bytes.empty())
        differing += runs[i][0] + "#" + std::to_string(i) + "@" + std::to_string(threads) + " ";
      ++compared;
    }
  }
  fs::remove_all(dir);
  return {differing.empty(), std::to_string(runs.size()) + " commands x threads {1,2,4}" +
                                 (differing.empty() ? ", all byte-identical"
                                                    : ", differing: " + differing)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string lab = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 iid CLT", iid_clt},
      {"2 FCLT Brownian scaling", fclt_scaling},
      {"3 GARCH self-consistency", garch_self_consistency},
      {"4 AR(1) self-consistency", arma_self_consistency},
      {"5 Bahadur decay", bahadur_decay},
      {"6 representation gap", representation},
      {"7 NED decay", ned_decay},
      {"8 condition table rows", table_rows},
      {"9 determinism across threads", [&] { return determinism(lab); }},
  };
  int failures = 0;
  for (const auto& [label, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << label << " (" << fmt(secs) << " s): " << o.detail
              << std::endl;
  }
  std::cout << (failures ? "acceptance: " + std::to_string(failures) + " failing criteria"
                         : std::string("acceptance: all criteria pass"))
            << std::endl;
  return failures ? 1 : 0;
}
