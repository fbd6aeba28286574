#include "ev/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "suites.hpp"

namespace ev {

namespace pt = boost::property_tree;

namespace {

constexpr double kEmpiricalFactor = 1.5;

pt::ptree read_ini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return tree;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(trim(text));
  T v{};
  if (!(in >> v) || !in.eof()) throw ConfigError("key '" + key + "': cannot parse '" + text + "'");
  return v;
}

}  // namespace

// --- Configuration -------------------------------------------------------------

double SuiteConfig::get_double(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = parse_number<double>(key, it->second);
  if (!std::isfinite(v)) throw ConfigError("key '" + key + "': not finite");
  return v;
}

std::int64_t SuiteConfig::get_int(const std::string& key, std::int64_t fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_number<std::int64_t>(key, it->second);
}

Json SuiteConfig::to_json() const {
  Json j;
  j["suite"] = suite;
  j["seed"] = seed;
  j["trials"] = trials;
  Json p = Json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["params"] = p;
  return j;
}

SuiteConfig load_config(const std::filesystem::path& path, const std::string& suite) {
  if (!is_registered(suite)) throw ConfigError("unknown suite '" + suite + "'");
  const auto tree = read_ini(path);
  SuiteConfig c;
  c.suite = suite;
  auto apply = [&](const pt::ptree& section) {
    for (const auto& [key, node] : section) {
      const auto value = node.get_value<std::string>();
      if (key == "seed") {
        c.seed = parse_number<std::uint64_t>(key, value);
      } else if (key == "trials") {
        c.trials = parse_number<std::int64_t>(key, value);
        if (c.trials < 0) throw ConfigError("key 'trials': must be nonnegative");
      } else if (key == "threads") {
        c.threads = parse_number<unsigned>(key, value);
      } else if (key == "baseline") {
        std::filesystem::path b = trim(value);
        c.baseline = b.is_absolute() ? b : path.parent_path() / b;
      } else {
        c.params[key] = value;
      }
    }
  };
  if (const auto g = tree.get_child_optional("general")) apply(*g);
  if (const auto s = tree.get_child_optional(suite)) apply(*s);
  for (const auto& [key, value] : c.params) {
    if (key == "L" || key == "n") {
      if (!(parse_number<double>(key, value) > 0.0)) throw ConfigError("key '" + key + "': must be positive");
    }
  }
  return c;
}

std::string config_fingerprint(const std::filesystem::path& config_path) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + config_path.string());
  std::uint64_t h = 1469598103934665603ULL;
  char ch = 0;
  while (in.get(ch)) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

Baseline read_baseline(const std::filesystem::path& path) {
  const auto tree = read_ini(path);
  Baseline b;
  b.fingerprint = tree.get<std::string>("fingerprint.config", "");
  const auto consts = tree.get_child_optional("constants");
  if (!consts) throw ConfigError(path.string() + ": missing [constants]");
  for (const auto& [key, node] : *consts) b.constants[key] = parse_number<double>(key, node.get_value<std::string>());
  return b;
}

void write_baseline(const std::filesystem::path& path, const Baseline& baseline) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "[fingerprint]\nconfig = " << baseline.fingerprint << "\n\n[constants]\n";
  out << std::setprecision(17);
  for (const auto& [k, v] : baseline.constants) out << k << " = " << v << '\n';
}

// --- Records and reports -----------------------------------------------------------

void TrialRecord::check(bool ok, const std::string& what) {
  if (!ok) {
    pass = false;
    failures.push_back(what);
  }
}

bool TrialReport::pass() const {
  return failures.empty() && std::all_of(trials.begin(), trials.end(), [](const auto& t) { return t.pass; });
}

Json TrialReport::to_json(bool timing) const {
  Json j;
  j["suite"] = suite;
  j["seed"] = seed;
  j["config"] = config;
  Json list = Json::array();
  for (const auto& t : trials) {
    Json r;
    r["id"] = t.id;
    r["values"] = t.values;
    Json c = Json::object();
    for (const auto& [k, v] : t.constants) c[k] = v;
    r["constants"] = c;
    r["pass"] = t.pass;
    if (!t.failures.empty()) r["failures"] = t.failures;
    list.push_back(std::move(r));
  }
  j["trials"] = list;
  Json s;
  Json mc = Json::object();
  for (const auto& [k, v] : max_constants) mc[k] = v;
  s["max_constants"] = mc;
  std::vector<std::string> all = failures;
  for (const auto& t : trials)
    for (const auto& f : t.failures) all.push_back(t.id + ": " + f);
  s["failures"] = all;
  s["pass"] = pass();
  if (timing) s["wall_seconds"] = wall_seconds;
  j["summary"] = s;
  return j;
}

// --- Registry --------------------------------------------------------------------

const std::vector<SuiteInfo>& suite_registry() {
  static const std::vector<SuiteInfo> registry{
      {"dyadic", "leaf partition, generation nesting, boundary weight against exhaustive calibration", {"C_bdry"}},
      {"kernels", "superposition Phi at 0 and its x^-20 tail, kernel masses", {}},
      {"ftpair", "Fourier-pair identity for Gaussian and square-function pairs", {}},
      {"telescoping", "dilation telescoping residual and the two-pair tree estimate", {"C_tel"}},
      {"box", "box-average Cauchy-Schwarz chain and brute-force agreement", {}},
      {"error-boundary", "error and boundary sums over single trees", {"C_err", "C_bnd"}},
      {"tree", "single-tree estimate and its grid refinement", {"C_tree"}},
      {"parseval", "spatial and frequency-side truncated forms", {}},
      {"restricted", "exceptional set, tree selection and direct value against the majorant",
       {"C_rt", "C_HL", "C_gen"}},
  };
  return registry;
}

bool is_registered(const std::string& name) {
  const auto& r = suite_registry();
  return std::any_of(r.begin(), r.end(), [&](const SuiteInfo& s) { return s.name == name; });
}

namespace detail {

std::vector<TrialRecord> run_trials(const SuiteConfig& config, const RunOptions& options, std::int64_t count,
                                    const TrialFn& fn) {
  std::vector<std::int64_t> ids;
  if (options.replay) {
    const auto id = options.replay->value("trial", std::int64_t{-1});
    if (id >= 0) ids.push_back(id);
  } else {
    for (std::int64_t i = 0; i < count; ++i) ids.push_back(i);
  }
  std::vector<TrialRecord> out(ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      try {
        out[i] = fn(ids[i]);
      } catch (const std::exception& e) {
        out[i] = TrialRecord{};
        out[i].id = std::to_string(ids[i]);
        out[i].check(false, std::string("exception: ") + e.what());
        out[i].replay = replay_stub(config, ids[i]);
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, ids.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return out;
}

void dump_field(const RunOptions& options, const std::string& suite, const std::string& id, const std::string& name,
                const SampledField& field) {
  if (!options.dump_fields) return;
  std::filesystem::create_directories(*options.dump_fields);
  write_field(*options.dump_fields / (suite + "-" + id + "-" + name + ".bin"), field);
}

Json replay_stub(const SuiteConfig& config, std::int64_t id) {
  Json j;
  j["suite"] = config.suite;
  j["seed"] = config.seed;
  j["trial"] = id;
  Json p = Json::object();
  for (const auto& [k, v] : config.params) p[k] = v;
  j["params"] = p;
  return j;
}

}  // namespace detail

TrialReport run_suite(const SuiteConfig& config, const RunOptions& options) {
  using namespace detail;
  static const std::map<std::string, std::vector<TrialRecord> (*)(const SuiteConfig&, const RunOptions&)> runners{
      {"dyadic", suite_dyadic},       {"kernels", suite_kernels},
      {"ftpair", suite_ftpair},       {"telescoping", suite_telescoping},
      {"box", suite_box},             {"error-boundary", suite_error_boundary},
      {"tree", suite_tree},           {"parseval", suite_parseval},
      {"restricted", suite_restricted},
  };
  const auto it = runners.find(config.suite);
  if (it == runners.end()) throw ConfigError("unknown suite '" + config.suite + "'");

  TrialReport report;
  report.suite = config.suite;
  report.seed = config.seed;
  report.config = config.to_json();
  const auto start = std::chrono::steady_clock::now();
  report.trials = it->second(config, options);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (const auto& t : report.trials)
    for (const auto& [k, v] : t.constants) {
      auto& m = report.max_constants[k];
      m = std::max(m, v);
    }
  const auto info = std::find_if(suite_registry().begin(), suite_registry().end(),
                                 [&](const SuiteInfo& s) { return s.name == config.suite; });
  if (options.baseline) {
    for (const auto& name : info->constants) {
      const auto b = options.baseline->constants.find(name);
      if (b == options.baseline->constants.end()) {
        report.failures.push_back("baseline has no " + name);
        continue;
      }
      const auto m = report.max_constants.find(name);
      if (m != report.max_constants.end() && !(m->second <= kEmpiricalFactor * b->second)) {
        std::ostringstream msg;
        msg << std::setprecision(6) << name << " = " << m->second << " exceeds baseline " << b->second << " x "
            << kEmpiricalFactor;
        report.failures.push_back(msg.str());
      }
    }
  }
  return report;
}

std::vector<std::filesystem::path> write_replays(const TrialReport& report, const std::filesystem::path& report_path) {
  std::vector<std::filesystem::path> out;
  for (const auto& t : report.trials) {
    if (t.pass) continue;
    auto p = report_path;
    p += ".replay-" + report.suite + "-" + t.id + ".json";
    std::ofstream f(p);
    f << t.replay.dump(2) << '\n';
    out.push_back(p);
  }
  return out;
}

Baseline calibrate_baselines(const std::filesystem::path& config_path) {
  Baseline b;
  b.fingerprint = config_fingerprint(config_path);
  for (const auto& info : suite_registry()) {
    if (info.constants.empty()) continue;
    auto c = load_config(config_path, info.name);
    c.seed += 1;
    c.trials *= 4;
    const auto report = run_suite(c);
    for (const auto& name : info.constants) {
      const auto m = report.max_constants.find(name);
      b.constants[name] = m == report.max_constants.end() ? 0.0 : m->second;
    }
  }
  return b;
}

}  // namespace ev
