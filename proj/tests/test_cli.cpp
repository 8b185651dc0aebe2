#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fclt/cli.hpp"
#include "fclt/estimators.hpp"
#include "fclt/io.hpp"

using namespace fclt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "fclt-lab");
  std::ostringstream out, err;
  Run r;
  r.code = dispatch(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Scratch directory removed at scope exit.
class TempDir {
public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("fclt_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
  fs::path path_;
};

void put(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

const char* kGarch = R"({"model":"garch","omega":0.1,"alpha":[0.1],"beta":[0.8]})";

}  // namespace

TEST_CASE("estimate on a three point sample") {
  TempDir d;
  put(d.file("p.csv"), "x\n1\n2\n3\n");
  const auto r = run({"estimate", "--input", d.file("p.csv"), "--p", "0.5", "--r", "2"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j.at("q_hat") == 2.0);
  CHECK(j.at("m_hat").get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(j.at("n") == 3);
  CHECK(j.contains("manifest_hash"));
}

TEST_CASE("check reports the GARCH condition as satisfied") {
  TempDir d;
  put(d.file("garch.json"), kGarch);
  const auto r = run({"check", "--spec", d.file("garch.json"), "--r", "1"});
  REQUIRE(r.code == kExitOk);
  const auto j = json::parse(r.out);
  CHECK(j.at("admissible") == true);
  bool found = false;
  for (const auto& rep : j.at("reports")) {
    if (rep.at("condition_name") == "P_s") {
      found = true;
      CHECK(rep.at("satisfied") == true);
      CHECK(rep.at("computed_value").get<double>() == doctest::Approx(0.9));
    }
  }
  CHECK(found);
}

TEST_CASE("mc refuses a non-causal ARMA and prints the root modulus") {
  TempDir d;
  put(d.file("bad.json"),
      R"({"experiment":"clt","spec":{"model":"arma","phi":[-2.0],"theta":[]},"n":100,"reps":40})");
  const auto r = run({"mc", "--config", d.file("bad.json")});
  CHECK(r.code == kExitRefused);
  CHECK(r.err.rfind("refused: ", 0) == 0);
  const auto j = json::parse(r.err.substr(r.err.find('{')));
  CHECK(j.at("condition_name") == "causality");
  CHECK(j.at("computed_value").get<double>() == doctest::Approx(0.5));
  CHECK(r.err.find("0.5") != std::string::npos);
}

TEST_CASE("usage and I/O errors exit 2") {
  CHECK(run({"estimate", "--bogus"}).code == kExitUsage);
  CHECK(run({"nonsense"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  const auto missing = run({"estimate", "--input", "/nonexistent/p.csv"});
  CHECK(missing.code == kExitUsage);
  CHECK_FALSE(missing.err.empty());
  TempDir d;
  put(d.file("broken.json"), "{ not json");
  CHECK(run({"mc", "--config", d.file("broken.json")}).code == kExitUsage);
  CHECK(run({"check", "--spec", d.file("broken.json")}).code == kExitUsage);
}

TEST_CASE("round trip: simulate, read back, estimate") {
  TempDir d;
  put(d.file("garch.json"), kGarch);
  const auto path = d.file("x.csv");
  const auto sim = run({"simulate", "--spec", d.file("garch.json"), "--n", "500", "--seed", "3",
                        "--out", path});
  REQUIRE(sim.code == kExitOk);
  const auto x = read_sample_csv(path);
  CHECK(x.size() == 500);
  const auto manifest = read_json(path + ".manifest.json");
  CHECK(manifest.at("command") == "simulate");
  CHECK(manifest.at("seed") == 3);

  const auto again = run({"simulate", "--spec", d.file("garch.json"), "--n", "500", "--seed", "3",
                          "--threads", "1"});
  REQUIRE(again.code == kExitOk);
  const auto table = parse_csv(again.out);
  CHECK(table.values("x") == x);

  const auto est = run({"estimate", "--input", path, "--p", "0.25", "--r", "1"});
  REQUIRE(est.code == kExitOk);
  const auto j = json::parse(est.out);
  CHECK(j.at("q_hat").get<double>() == sample_quantile(x, 0.25));
  CHECK(j.at("m_hat").get<double>() == doctest::Approx(centred_abs_moment(x, 1)).epsilon(1e-15));
}

TEST_CASE("ned-scan writes the documented CSV and a fit sidecar") {
  TempDir d;
  put(d.file("ma.json"), R"({"model":"arma","phi":[],"theta":[0.5]})");
  const auto out = d.file("scan.csv");
  const auto r = run({"ned-scan", "--spec", d.file("ma.json"), "--kmax", "4", "--reps", "8",
                      "--n", "64", "--out", out});
  REQUIRE(r.code == kExitOk);
  const auto t = read_csv(out);
  CHECK(t.header == std::vector<std::string>{"k", "nu_hat", "se", "nu_hat_jk"});
  REQUIRE(t.rows.size() == 5);
  const auto nu = t.values("nu_hat");
  CHECK(nu[0] > 0.0);
  for (std::size_t k = 1; k < nu.size(); ++k) CHECK(nu[k] == 0.0);
  const auto fit = read_json(out + ".fit.json");
  CHECK(fit.is_object());
  CHECK(fs::exists(out + ".manifest.json"));

  CHECK(run({"ned-scan", "--spec", d.file("ma.json"), "--functional", "cube"}).code == kExitUsage);
}

TEST_CASE("mc writes parseable JSON independent of the thread count") {
  TempDir d;
  put(d.file("cfg.json"),
      R"({"experiment":"bahadur","spec":{"model":"iid","innovation":{"kind":"normal"}},)"
      R"("n_ladder":[200,400],"reps":40,"seed":5})");
  const auto one = d.file("one.json");
  const auto two = d.file("two.json");
  REQUIRE(run({"mc", "--config", d.file("cfg.json"), "--threads", "1", "--out", one}).code ==
          kExitOk);
  REQUIRE(run({"mc", "--config", d.file("cfg.json"), "--threads", "3", "--out", two}).code ==
          kExitOk);
  const auto a = read_json(one);
  const auto b = read_json(two);
  CHECK(a == b);
  CHECK(a.at("config").at("seed") == 5);
  const auto csv = read_csv(d.file("one.csv"));
  CHECK(csv.header.front() == "n");
  CHECK(csv.rows.size() == 2);

  const auto reseeded = run({"mc", "--config", d.file("cfg.json"), "--seed", "6"});
  REQUIRE(reseeded.code == kExitOk);
  CHECK(json::parse(reseeded.out).at("config").at("seed") == 6);
}
