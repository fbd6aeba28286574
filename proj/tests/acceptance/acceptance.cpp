#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "ev/harness.hpp"

namespace fs = std::filesystem;

namespace {

struct Line {
  int number;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

bool any_failure(const ev::TrialReport& r, const std::function<bool(const std::string&)>& match) {
  for (const auto& t : r.trials)
    for (const auto& f : t.failures)
      if (match(f)) return true;
  return false;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: ev_acceptance <config.ini>\n";
    return 2;
  }
  const fs::path config = argv[1];
  std::map<std::string, ev::TrialReport> reports;
  auto run = [&](const std::string& suite) -> const ev::TrialReport& {
    auto it = reports.find(suite);
    if (it != reports.end()) return it->second;
    auto c = ev::load_config(config, suite);
    ev::RunOptions o;
    if (!c.baseline.empty() && fs::exists(c.baseline)) o.baseline = ev::read_baseline(c.baseline);
    return reports.emplace(suite, ev::run_suite(c, o)).first->second;
  };
  auto baseline_ok = [](const ev::TrialReport& r) { return r.failures.empty(); };

  std::vector<Line> lines;
  {
    const auto& r = run("ftpair");
    const auto& v = r.trials.at(0).values;
    const double secs = v.at("gaussian_seconds").get<double>();
    const bool ok = !any_failure(r, [](const std::string& f) { return contains(f, "Gaussian"); }) && secs < 1.0;
    lines.push_back({1, "Fourier pair identity, Gaussian pairs", ok,
                     fmt("max residual %.3g, %.3f s", std::max({v.at("gaussian_residual_1").get<double>(),
                                                                 v.at("gaussian_residual_2").get<double>(),
                                                                 v.at("gaussian_residual_5").get<double>()}),
                         secs),
                     r.wall_seconds});
    const bool ok2 = !any_failure(r, [](const std::string& f) { return !contains(f, "Gaussian"); });
    lines.push_back({2, "square-function pair", ok2,
                     fmt("fd residual %.3g, |phi^(+-2)| %.3g", v.at("square_fd_residual").get<double>(),
                         v.at("phi_hat_at_2").get<double>()),
                     0.0});
  }
  {
    const auto& r = run("telescoping");
    const auto& setup = r.trials.at(0);
    lines.push_back({3, "telescoping identity, 64 steps", setup.pass,
                     fmt("max relative error %.3g", setup.values.at("max_residual").get<double>()), r.wall_seconds});
  }
  {
    const auto& r = run("dyadic");
    const bool ok = r.pass() && r.wall_seconds < 30.0 && r.trials.size() >= 201;
    lines.push_back({4, "boundary weight of convex trees", ok,
                     fmt("calibrated %.4g, random max %.4g", r.trials.at(0).values.at("calibrated_ratio").get<double>(),
                         r.max_constants.count("C_bdry") ? r.max_constants.at("C_bdry") : 0.0),
                     r.wall_seconds});
  }
  {
    const auto& r = run("box");
    double bf = 0.0;
    for (const auto& t : r.trials) bf = std::max(bf, t.values.value("max_bruteforce_error", 0.0));
    lines.push_back({5, "box Cauchy-Schwarz chain", r.pass() && r.trials.size() >= 50,
                     fmt("%g quadruples, brute-force error %.3g", static_cast<double>(r.trials.size()), bf),
                     r.wall_seconds});
  }
  {
    const auto& r = run("error-boundary");
    lines.push_back({6, "error and boundary sums", r.pass() && r.trials.size() >= 50,
                     fmt("C_err %.4g, C_bnd %.4g", r.max_constants.at("C_err"), r.max_constants.at("C_bnd")),
                     r.wall_seconds});
  }
  {
    const auto& r = run("tree");
    double change = 0.0;
    for (const auto& t : r.trials) change = std::max(change, t.values.value("refinement_change", 0.0));
    lines.push_back({7, "single-tree estimate", r.pass() && r.trials.size() >= 100,
                     fmt("C_tree %.4g, max refinement change %.3f", r.max_constants.at("C_tree"), change),
                     r.wall_seconds});
  }
  {
    const auto& r = run("parseval");
    double rel = 0.0;
    for (const auto& t : r.trials) rel = std::max(rel, t.values.value("relative_difference", 0.0));
    lines.push_back({8, "spatial vs frequency side", r.pass() && r.wall_seconds < 60.0 && r.trials.size() >= 10,
                     fmt("max relative difference %.3g", rel), r.wall_seconds});
  }
  {
    const auto& r = run("restricted");
    const std::size_t instances = r.trials.size() - 1;
    const bool structural = !any_failure(r, [](const std::string& f) {
      return contains(f, "|H|") || contains(f, "E1'") || contains(f, "convex") || contains(f, "sum over S") ||
             contains(f, "exception");
    });
    lines.push_back({9, "stopping-time facts", structural && instances >= 100,
                     fmt("%g instances", static_cast<double>(instances)), r.wall_seconds});
    lines.push_back({10, "restricted-type sweep", r.pass() && baseline_ok(r) && instances >= 50,
                     fmt("C_rt %.4g, C_gen %.4g", r.max_constants.at("C_rt"), r.max_constants.at("C_gen")), 0.0});
  }
  {
    const auto& r = run("kernels");
    const auto& v = r.trials.at(0).values;
    lines.push_back({11, "Phi asymptotics", r.pass(),
                     fmt("Phi(0) %.15g, x^20 Phi(x) %.6g", v.at("Phi(0)").get<double>(), v.at("x^20 Phi(x)").get<double>()),
                     r.wall_seconds});
  }

  bool all = true;
  for (const auto& l : lines) {
    all = all && l.pass;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", l.pass ? "PASS" : "FAIL", l.number, l.name.c_str(), l.detail.c_str(),
                l.seconds);
  }
  for (const auto& [name, r] : reports)
    for (const auto& f : r.failures) std::printf("  %s: %s\n", name.c_str(), f.c_str());
  return all ? 0 : 1;
}
