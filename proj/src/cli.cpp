#include "fclt/cli.hpp"

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fclt/conditions.hpp"
#include "fclt/error.hpp"
#include "fclt/estimators.hpp"
#include "fclt/io.hpp"
#include "fclt/mc_harness.hpp"
#include "fclt/ned.hpp"
#include "fclt/process_sim.hpp"

namespace fclt {

using nlohmann::json;

namespace {

struct Options {
  std::string spec;
  std::string config;
  std::string input;
  std::string out;
  double p = 0.5;
  int r = 2;
  std::size_t n = 1000;
  std::size_t reps = 64;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> seed_override;
  int threads = 0;
  std::size_t kmax = 10;
  std::size_t kmin = 0;
  std::size_t ned_samples = 4096;
  std::string functional = "identity";
  std::optional<std::size_t> burn_in;
};

class Timer {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ProcessSpec load_spec(const std::string& path) { return process_spec_from_json(read_json(path)); }

// JSON to --out (with a manifest hash and sidecar) or to stdout.
void emit_json(json j, const Options& o, RunManifest m, std::ostream& out, const Timer& timer) {
  j["manifest_hash"] = m.hash();
  if (o.out.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  write_json(o.out, j);
  m.outputs.push_back(o.out);
  m.wall_seconds = timer.seconds();
  write_manifest_sidecar(o.out, m);
}

RunManifest manifest(const std::string& command, std::uint64_t fp, std::uint64_t seed,
                     const Options& o) {
  RunManifest m;
  m.command = command;
  m.config_fingerprint = fp;
  m.seed = seed;
  m.threads = ExecPolicy{o.threads}.resolved();
  return m;
}

int run_simulate(const Options& o, std::ostream& out) {
  const Timer timer;
  const auto spec = load_spec(o.spec);
  const auto path = simulate(spec, o.n, o.burn_in, o.seed);
  CsvTable t;
  t.header = {"x"};
  for (double v : path.values) t.rows.push_back({v});
  if (o.out.empty()) {
    out << format_csv(t);
    return kExitOk;
  }
  write_csv(o.out, t);
  auto m = manifest("simulate", fingerprint(spec) ^ mix64(o.n), o.seed, o);
  m.outputs.push_back(o.out);
  m.wall_seconds = timer.seconds();
  write_manifest_sidecar(o.out, m);
  return kExitOk;
}

int run_check(const Options& o, std::ostream& out) {
  const Timer timer;
  const auto spec = load_spec(o.spec);
  json reports = json::array();
  for (const auto& rep : check_all(spec, o.r)) reports.push_back(to_json(rep));
  json j;
  j["spec"] = to_json(spec);
  j["r"] = o.r;
  j["reports"] = reports;
  bool admissible = true;
  for (const auto& rep : reports)
    if (rep.at("required").get<bool>() && !rep.at("satisfied").get<bool>()) admissible = false;
  j["admissible"] = admissible;
  emit_json(j, o, manifest("check", fingerprint(spec) ^ mix64(o.r), 0, o), out, timer);
  return kExitOk;
}

int run_estimate(const Options& o, std::ostream& out) {
  const Timer timer;
  const auto x = read_sample_csv(o.input);
  const auto est = estimator_vector(x, o.p, o.r);
  json j{{"q_hat", est.q_hat}, {"m_hat", est.m_hat}, {"n", est.n}, {"p", est.p}, {"r", est.r}};
  std::ostringstream id;
  id << o.input << '|' << o.p << '|' << o.r;
  emit_json(j, o, manifest("estimate", fnv1a64(id.str()), 0, o), out, timer);
  return kExitOk;
}

int run_ned_scan(const Options& o, std::ostream& out) {
  const Timer timer;
  const auto spec = load_spec(o.spec);
  const auto f = Functional::parse(o.functional);
  if (o.kmin > o.kmax) throw ParameterError("--kmin must not exceed --kmax");
  std::vector<std::size_t> ks;
  for (std::size_t k = o.kmin; k <= o.kmax; ++k) ks.push_back(k);
  NedOptions opt;
  opt.exec = ExecPolicy{o.threads};
  const auto scan = ned_scan(spec, f, ks, o.reps, o.ned_samples, o.seed, opt);

  CsvTable t;
  t.header = {"k", "nu_hat", "se", "nu_hat_jk"};
  for (const auto& e : scan.estimates)
    t.rows.push_back({static_cast<double>(e.k), e.nu_hat, e.se, e.nu_hat_jk});
  json j;
  j["functional"] = f.to_string();
  j["redraws"] = scan.redraws;
  j["samples"] = scan.samples;
  j["fit"] = {{"model", to_string(scan.fit.model)},
              {"rate", scan.fit.rate},
              {"rate_se", scan.fit.rate_se},
              {"r_squared", scan.fit.r_squared}};
  std::ostringstream id;
  id << fingerprint(spec) << '|' << f.to_string() << '|' << o.kmin << '|' << o.kmax << '|'
     << o.reps << '|' << o.ned_samples;
  auto m = manifest("ned-scan", fnv1a64(id.str()), o.seed, o);
  if (o.out.empty()) {
    out << format_csv(t);
    return kExitOk;
  }
  write_csv(o.out, t);
  j["manifest_hash"] = m.hash();
  write_json(o.out + ".fit.json", j);
  m.outputs = {o.out, o.out + ".fit.json"};
  m.wall_seconds = timer.seconds();
  write_manifest_sidecar(o.out, m);
  return kExitOk;
}

std::string csv_path_for(const std::string& out) {
  const std::string ext = ".json";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0)
    return out.substr(0, out.size() - ext.size()) + ".csv";
  return out + ".csv";
}

int run_mc(const Options& o, std::ostream& out) {
  const Timer timer;
  auto cfg = experiment_config_from_json(read_json(o.config));
  if (o.seed_override) cfg.seed = *o.seed_override;
  cfg.exec = ExecPolicy{o.threads};
  auto m = manifest("mc", config_fingerprint(cfg), cfg.seed, o);

  json report;
  std::optional<DecayTable> table;
  switch (cfg.experiment) {
    case ExperimentKind::bahadur: table = run_bahadur_experiment(cfg); break;
    case ExperimentKind::representation: table = run_representation_experiment(cfg); break;
    default: report = run_experiment(cfg); break;
  }
  if (table) report = to_json(*table);
  report["config"] = to_json(cfg);
  if (table && !o.out.empty()) {
    const auto csv = csv_path_for(o.out);
    write_text(csv, decay_table_csv(*table));
    m.outputs.push_back(csv);
  }
  emit_json(report, o, m, out, timer);
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"simulate processes, check conditions, run estimator experiments", "fclt-lab"};
  app.require_subcommand(1);
  Options o;

  auto threads = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "worker threads (0 = all logical cores)")
        ->capture_default_str();
  };
  auto out_opt = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output file (stdout when omitted)");
  };

  auto* sim = app.add_subcommand("simulate", "simulate one path, CSV column x");
  sim->add_option("--spec", o.spec, "process spec JSON")->required();
  sim->add_option("--n", o.n, "path length")->capture_default_str();
  sim->add_option("--seed", o.seed, "master seed")->capture_default_str();
  sim->add_option("--burn-in", o.burn_in, "burn-in (default max(1000, 20 (p+q)), 0 for iid)");
  out_opt(sim);
  threads(sim);

  auto* check = app.add_subcommand("check", "condition reports for a spec and moment order");
  check->add_option("--spec", o.spec, "process spec JSON")->required();
  check->add_option("--r", o.r, "moment order")->capture_default_str();
  out_opt(check);
  threads(check);

  auto* est = app.add_subcommand("estimate", "sample quantile and centred absolute moment");
  est->add_option("--input", o.input, "CSV with a column x")->required();
  est->add_option("--p", o.p, "quantile level")->capture_default_str();
  est->add_option("--r", o.r, "moment order")->capture_default_str();
  out_opt(est);
  threads(est);

  auto* ned = app.add_subcommand("ned-scan", "coupling estimates of nu(k), CSV k,nu_hat,se,nu_hat_jk");
  ned->add_option("--spec", o.spec, "process spec JSON")->required();
  ned->add_option("--functional", o.functional, "identity | abs_pow:R | indicator_leq:X")
      ->capture_default_str();
  ned->add_option("--kmin", o.kmin, "smallest k")->capture_default_str();
  ned->add_option("--kmax", o.kmax, "largest k")->capture_default_str();
  ned->add_option("--reps", o.reps, "inner redraws R per outer sample")->capture_default_str();
  ned->add_option("--n", o.ned_samples, "outer samples N")->capture_default_str();
  ned->add_option("--seed", o.seed, "master seed")->capture_default_str();
  out_opt(ned);
  threads(ned);

  auto* mc = app.add_subcommand("mc", "Monte Carlo experiment from a JSON config");
  mc->add_option("--config", o.config, "experiment config JSON")->required();
  mc->add_option("--seed", o.seed_override, "override the config seed");
  out_opt(mc);
  threads(mc);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto* failed = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << failed->help();
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return run_simulate(o, out);
    if (check->parsed()) return run_check(o, out);
    if (est->parsed()) return run_estimate(o, out);
    if (ned->parsed()) return run_ned_scan(o, out);
    if (mc->parsed()) return run_mc(o, out);
  } catch (const RefusedError& e) {
    err << "refused: " << e.what() << '\n' << to_json(e.report()).dump(2) << '\n';
    return kExitRefused;
  } catch (const CausalityError& e) {
    err << "refused: " << e.what() << '\n'
        << json{{"condition_name", "causality"}, {"computed_value", e.min_root_modulus()}}.dump(2)
        << '\n';
    return kExitRefused;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "failed: " << e.what() << '\n';
    return kExitRefused;
  }
  return kExitUsage;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace fclt
