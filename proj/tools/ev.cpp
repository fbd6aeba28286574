#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ev/harness.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

ev::SuiteConfig config_from_replay(const ev::Json& r) {
  ev::SuiteConfig c;
  c.suite = r.at("suite").get<std::string>();
  if (!ev::is_registered(c.suite)) throw ev::ConfigError("unknown suite '" + c.suite + "'");
  c.seed = r.at("seed").get<std::uint64_t>();
  c.trials = 1;
  c.threads = 1;
  const auto params = r.value("params", ev::Json::object());
  for (const auto& [k, v] : params.items()) c.params[k] = v.get<std::string>();
  return c;
}

void print_summary(const ev::TrialReport& rep) {
  std::size_t failed = 0;
  for (const auto& t : rep.trials) failed += t.pass ? 0 : 1;
  std::cout << rep.suite << ": " << (rep.pass() ? "PASS" : "FAIL") << "  trials=" << rep.trials.size()
            << " failed=" << failed << " wall=" << rep.wall_seconds << "s\n";
  for (const auto& [k, v] : rep.max_constants) std::cout << "  " << k << " = " << v << '\n';
  for (const auto& t : rep.trials)
    for (const auto& f : t.failures) std::cout << "  trial " << t.id << ": " << f << '\n';
  for (const auto& f : rep.failures) std::cout << "  " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ev: numerical checks for entangled four-linear forms"};
  app.require_subcommand(1);

  std::string suite, out, replay, dump;
  fs::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<unsigned> threads;
  bool no_baseline = false;

  auto* run = app.add_subcommand("run", "run one suite, or all with --suite all");
  run->add_option("--suite", suite, "suite name or 'all'");
  run->add_option("--config", config, "INI configuration")->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the seed");
  run->add_option("--trials", trials, "override the trial count");
  run->add_option("--threads", threads, "worker threads (0: all cores)");
  run->add_option("--out", out, "JSON report path");
  run->add_option("--replay", replay, "rerun the trial stored in a replay file")->check(CLI::ExistingFile);
  run->add_option("--dump-fields", dump, "directory for binary field dumps");
  run->add_flag("--no-baseline", no_baseline, "skip the baseline comparison");

  fs::path cal_out;
  auto* cal = app.add_subcommand("calibrate", "recompute the empirical-constant baseline");
  cal->add_option("--config", config, "INI configuration")->required()->check(CLI::ExistingFile);
  cal->add_option("--out", cal_out, "baseline file to write")->required();

  auto* list = app.add_subcommand("list", "list the suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*list) {
      for (const auto& s : ev::suite_registry()) {
        std::cout << s.name << "  " << s.checks;
        for (const auto& c : s.constants) std::cout << "  [" << c << "]";
        std::cout << '\n';
      }
      return kPass;
    }
    if (*cal) {
      auto b = ev::calibrate_baselines(config);
      ev::write_baseline(cal_out, b);
      for (const auto& [k, v] : b.constants) std::cout << k << " = " << v << '\n';
      return kPass;
    }

    std::vector<ev::SuiteConfig> configs;
    ev::RunOptions opt;
    if (!dump.empty()) opt.dump_fields = fs::path(dump);
    if (!replay.empty()) {
      std::ifstream in(replay);
      opt.replay = ev::Json::parse(in);
      configs.push_back(config_from_replay(*opt.replay));
    } else {
      if (suite.empty() || config.empty()) throw ev::ConfigError("run needs --suite and --config (or --replay)");
      if (suite == "all") {
        for (const auto& s : ev::suite_registry()) configs.push_back(ev::load_config(config, s.name));
      } else {
        configs.push_back(ev::load_config(config, suite));
      }
    }

    ev::Json reports = ev::Json::array();
    bool pass = true;
    for (auto& c : configs) {
      if (seed) c.seed = *seed;
      if (trials) c.trials = *trials;
      if (threads) c.threads = *threads;
      ev::RunOptions o = opt;
      if (!no_baseline && !opt.replay && !c.baseline.empty()) {
        if (!fs::exists(c.baseline)) throw ev::ConfigError("baseline " + c.baseline.string() + " not found");
        o.baseline = ev::read_baseline(c.baseline);
      }
      const auto rep = ev::run_suite(c, o);
      print_summary(rep);
      pass = pass && rep.pass();
      reports.push_back(rep.to_json());
      if (!out.empty()) {
        for (const auto& p : ev::write_replays(rep, out)) std::cout << "  replay: " << p.string() << '\n';
      }
    }
    if (!out.empty()) {
      std::ofstream f(out);
      if (!f) throw ev::ConfigError("cannot write " + out);
      f << (reports.size() == 1 ? reports[0] : reports).dump(2) << '\n';
    }
    return pass ? kPass : kFail;
  } catch (const ev::ConfigError& e) {
    std::cerr << "ev: " << e.what() << '\n';
    return kUsage;
  } catch (const ev::Json::exception& e) {
    std::cerr << "ev: " << e.what() << '\n';
    return kUsage;
  }
}
