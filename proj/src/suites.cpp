#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ev/decomposition.hpp"
#include "ev/dyadic.hpp"
#include "ev/forms.hpp"
#include "ev/maximal.hpp"
#include "ev/profiles.hpp"
#include "ev/random.hpp"
#include "suites.hpp"

namespace ev::detail {

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::uint64_t trial_seed(const SuiteConfig& c, std::int64_t id) {
  return Rng::mix(c.seed ^ Rng::mix(static_cast<std::uint64_t>(id) + 0x51ed2701ULL));
}

Grid grid_of(const SuiteConfig& c, double L, std::int64_t n) {
  Grid g{2, c.get_double("L", L), c.get_int("n", n)};
  validate_grid(g);
  return g;
}

// Uniform values in [lo, hi) on cells whose centre lies in [-a, a)^2.
SampledField random_field(const Grid& g, Rng& rng, double lo, double hi, double a) {
  SampledField f(g);
  for (std::int64_t i = 0; i < g.n; ++i)
    for (std::int64_t j = 0; j < g.n; ++j) {
      const double x = g.cell_center(i), y = g.cell_center(j);
      const double v = rng.uniform(lo, hi);
      if (x >= -a && x < a && y >= -a && y < a) f.at(i, j) = v;
    }
  return f;
}

EntangledQuadruple random_quad(const Grid& g, Rng& rng, double a) {
  return {random_field(g, rng, -1.0, 1.0, a), random_field(g, rng, -1.0, 1.0, a), random_field(g, rng, -1.0, 1.0, a),
          random_field(g, rng, -1.0, 1.0, a)};
}

// Root of scale k placed uniformly among the scale-k dyadic squares inside the box.
DyadicSquare random_root(const Grid& g, Rng& rng, int k) {
  const auto m = static_cast<std::int64_t>(std::llround(g.half_width / std::ldexp(1.0, k)));
  if (m < 1) throw std::invalid_argument("root larger than the grid box");
  return {k, rng.uniform_int(-m, m - 1), rng.uniform_int(-m, m - 1)};
}

std::string tree_text(const ConvexTree& t) {
  std::ostringstream out;
  write_tree(out, t);
  return out.str();
}

// Fields refined to twice the resolution by splitting every cell.
SampledField refine(const SampledField& f) {
  const auto& g = f.grid();
  SampledField out(Grid{2, g.half_width, 2 * g.n});
  for (std::int64_t i = 0; i < 2 * g.n; ++i)
    for (std::int64_t j = 0; j < 2 * g.n; ++j) out.at(i, j) = f.at(i / 2, j / 2);
  return out;
}

std::pair<double, double> packet_shifts(std::int64_t id) {
  static constexpr std::array<double, 3> kShifts{0.0, 1.0, 4.0};
  return {kShifts[static_cast<std::size_t>(id % 3)], kShifts[static_cast<std::size_t>((id / 3) % 3)]};
}

std::vector<double> logspace2(double a, double b, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(std::exp2(a + (b - a) * i / (count - 1)));
  return v;
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> v;
  for (int i = 0; i < count; ++i) v.push_back(a + (b - a) * i / (count - 1));
  return v;
}

}  // namespace

// --- dyadic ----------------------------------------------------------------------

std::vector<TrialRecord> suite_dyadic(const SuiteConfig& c, const RunOptions& o) {
  const int levels = static_cast<int>(c.get_int("enumeration_levels", 3));
  const int depth = static_cast<int>(c.get_int("max_depth", 8));
  const double refine_p = c.get_double("refine", 0.5);
  const double cap = c.get_double("cap", 144.0);

  TrialRecord setup;
  setup.id = "calibration";
  const auto t0 = Clock::now();
  double cal = 0.0;
  std::int64_t count = 0;
  enumerate_convex_trees(DyadicSquare{0, 0, 0}, levels, [&](const ConvexTree& t) {
    cal = std::max(cal, boundary_weight(t).ratio_to_root(t.root()));
    ++count;
  });
  setup.values["enumerated"] = count;
  setup.values["calibrated_ratio"] = cal;
  setup.values["seconds"] = seconds_since(t0);
  setup.check(cal > 0.0 && cal <= cap, "exhaustive calibration within the cap");
  setup.replay = replay_stub(c, -1);
  const double limit = std::min(cap, 1.5 * cal);

  auto trials = run_trials(c, o, c.trials, [&](std::int64_t id) {
    TrialRecord r;
    r.id = std::to_string(id);
    r.replay = replay_stub(c, id);
    const auto tree = random_convex_tree(trial_seed(c, id), depth, refine_p);
    r.replay["tree"] = tree_text(tree);
    const auto lv = leaves(tree);
    bool disjoint = true;
    for (std::size_t a = 0; a < lv.size(); ++a)
      for (std::size_t b = a + 1; b < lv.size(); ++b) disjoint = disjoint && lv[a].almost_disjoint(lv[b]);
    r.check(disjoint, "leaves pairwise disjoint");
    const auto scales = tree.scales();
    bool nested = true;
    for (std::size_t i = 0; i + 1 < scales.size(); ++i) {
      const auto coarse = generation(tree, scales[i + 1]);
      for (const auto& s : generation(tree, scales[i]).squares) nested = nested && coarse.contains(ancestor(s, coarse.k));
    }
    r.check(nested, "generations nested");
    const double ratio = boundary_weight(tree).ratio_to_root(tree.root());
    r.values["size"] = tree.size();
    r.values["leaves"] = lv.size();
    r.values["boundary_ratio"] = ratio;
    r.values["limit"] = limit;
    r.constants["C_bdry"] = ratio;
    r.check(ratio <= limit, "boundary weight ratio within min(cap, 1.5 x calibration)");
    return r;
  });
  if (o.replay) return trials;
  trials.insert(trials.begin(), std::move(setup));
  return trials;
}

// --- kernels ---------------------------------------------------------------------

std::vector<TrialRecord> suite_kernels(const SuiteConfig& c, const RunOptions& o) {
  return run_trials(c, o, 1, [&](std::int64_t id) {
    TrialRecord r;
    r.id = "oracles";
    r.replay = replay_stub(c, id);
    const double phi0 = phi_superposition(0.0);
    const double x = c.get_double("tail_point", 50.0);
    const double tail = std::pow(x, 20) * phi_superposition(x);
    r.values["Phi(0)"] = phi0;
    r.values["x^20 Phi(x)"] = tail;
    r.values["x"] = x;
    r.check(std::abs(phi0 - 0.05) <= 1e-10, "Phi(0) = 1/20");
    r.check(std::abs(tail / 181440.0 - 1.0) <= 0.01, "x^20 Phi(x) within 1% of 9!/2");
    r.check(std::abs(phi_superposition(0.5) - 0.039843838568391896) <= 1e-10, "Phi(1/2) oracle");
    r.check(std::abs(phi_superposition(2.0) - 0.0014071599322087098) <= 1e-10, "Phi(2) oracle");

    const double R = 200.0;
    const double mass = theta_rectangle_integral(-R, R, -R, R);
    r.values["theta_mass"] = mass;
    r.check(mass <= kPi * kPi / 2 && mass >= kPi * kPi / 2 - kPi / (R * R), "theta mass pi^2/2 up to the tail");
    const auto v2 = vartheta_squared_profile();
    r.values["vartheta_squared_mass"] = v2.antiderivative(1e9);
    r.check(std::abs(v2.antiderivative(1e9) - 2.0 / 7.0) <= 1e-10, "vartheta squared mass 2/7");
    r.check(vartheta(0.0) == 1.0 && vartheta(1.0) == 1.0 / 16.0, "vartheta values");
    bool positive = true;
    for (double u : linspace(-8, 8, 33))
      for (double v : linspace(-8, 8, 33)) positive = positive && theta(u, v) > 0.0;
    r.check(positive, "theta positive");
    return r;
  });
}

// --- ftpair ----------------------------------------------------------------------

std::vector<TrialRecord> suite_ftpair(const SuiteConfig& c, const RunOptions& o) {
  return run_trials(c, o, 1, [&](std::int64_t id) {
    TrialRecord r;
    r.id = "pairs";
    r.replay = replay_stub(c, id);
    const auto ts = logspace2(-2, 2, 16);
    const auto taus = linspace(-4, 4, 17);
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (double a : {1.0, 2.0, 5.0}) {
      const double res = fourier_pair_residual_numeric(gaussian_pair(a), ts, taus).relative();
      r.values["gaussian_residual_" + std::to_string(static_cast<int>(a))] = res;
      worst = std::max(worst, res);
    }
    r.values["gaussian_seconds"] = seconds_since(t0);
    r.check(worst <= 1e-10, "Gaussian pair residual <= 1e-10");

    const auto ts32 = logspace2(-2, 2, 32);
    const auto taus32 = linspace(-4, 4, 32);
    const double fd = fourier_pair_residual_fd(phi_hat_squared, [](double x) { return psi_hat(x) * psi_hat(x); },
                                               ts32, taus32)
                          .relative();
    r.values["square_fd_residual"] = fd;
    r.check(fd <= 1e-6, "square-function pair residual <= 1e-6");
    const double edge = std::max(std::abs(phi_hat(2.0)), std::abs(phi_hat(-2.0)));
    r.values["phi_hat_at_2"] = edge;
    r.check(edge <= 1e-10, "phi hat vanishes at +-2");
    return r;
  });
}

// --- telescoping -------------------------------------------------------------------

std::vector<TrialRecord> suite_telescoping(const SuiteConfig& c, const RunOptions& o) {
  const int steps = static_cast<int>(c.get_int("steps", 64));
  const auto g = grid_of(c, 4.0, 32);
  const auto sq = make_square_function_pair();

  TrialRecord setup;
  setup.id = "dilation";
  setup.replay = replay_stub(c, -1);
  const auto xs = linspace(-6, 6, 41);
  double worst = 0.0;
  for (int k : {-1, 0, 2}) {
    for (const auto& f : {gaussian(1.0), gaussian(2.0), gaussian_derivative(1.0), sq.rho}) {
      const double res = dilation_telescoping_residual(f, k, xs, steps).relative();
      worst = std::max(worst, res);
    }
  }
  setup.values["max_residual"] = worst;
  setup.values["steps"] = steps;
  setup.check(worst <= 1e-6, "telescoping residual <= 1e-6");

  const auto p1 = gaussian_pair(1.0);
  std::array<AdmissiblePair, 2> p2{gaussian_pair(1.0), gaussian_pair(2.0)};
  std::array<double, 2> cs{};
  const double r1 = schwartz_seminorm(p1.rho), s1 = schwartz_seminorm(p1.sigma);
  for (std::size_t i = 0; i < 2; ++i) {
    const double r2 = schwartz_seminorm(p2[i].rho), s2 = schwartz_seminorm(p2[i].sigma);
    cs[i] = r1 * r1 * s2 * s2 + s1 * s1 * r2 * r2 + r1 * r1 * r2 * r2;
  }

  auto trials = run_trials(c, o, c.trials, [&](std::int64_t id) {
    TrialRecord r;
    r.id = std::to_string(id);
    r.replay = replay_stub(c, id);
    auto rng = Rng::stream(c.seed, static_cast<std::uint64_t>(id));
    const auto Q = random_quad(g, rng, 2.0);
    const auto tree = random_convex_tree(rng.next(), 2, 0.5, random_root(Grid{2, 2.0, 2}, rng, 0));
    r.replay["tree"] = tree_text(tree);
    const std::vector<DyadicSquare> members(tree.members().begin(), tree.members().end());
    const auto& q2 = p2[static_cast<std::size_t>(id % 2)];
    const double lhs = local_form(Q, members, same_pair(p1.rho, q2.sigma)).value +
                       local_form(Q, members, same_pair(p1.sigma, q2.rho)).value;
    double scale = tree.root().area() * cs[static_cast<std::size_t>(id % 2)];
    for (const auto* f : {&Q.F1, &Q.F2, &Q.F3, &Q.F4}) scale *= tree_size(*f, tree).value;
    const EntangledQuadruple same{Q.F1, Q.F1, Q.F1, Q.F1};
    const double square = local_form(same, members, same_pair(p1.rho, q2.sigma)).value;
    r.values["lhs"] = lhs;
    r.values["scale"] = scale;
    r.values["seminorm_factor"] = cs[static_cast<std::size_t>(id % 2)];
    r.values["gamma"] = q2.alpha;
    r.values["square_form"] = square;
    r.constants["C_tel"] = scale > 0.0 ? std::abs(lhs) / scale : 0.0;
    r.check(std::isfinite(lhs) && std::isfinite(scale), "finite values");
    r.check(square >= -1e-9, "single-field form nonnegative");
    return r;
  });
  if (o.replay) return trials;
  trials.insert(trials.begin(), std::move(setup));
  return trials;
}

// --- box ---------------------------------------------------------------------------

std::vector<TrialRecord> suite_box(const SuiteConfig& c, const RunOptions& o) {
  const auto g = grid_of(c, 2.0, 8);
  const auto points = c.get_int("points", 20);
  const double slack = c.get_double("slack", 1e-9);
  return run_trials(c, o, c.trials, [&](std::int64_t id) {
    TrialRecord r;
    r.id = std::to_string(id);
    r.replay = replay_stub(c, id);
    auto rng = Rng::stream(c.seed, static_cast<std::uint64_t>(id));
    const auto Q = random_quad(g, rng, g.half_width);
    int j = 0;
    for (const auto* f : {&Q.F1, &Q.F2, &Q.F3, &Q.F4}) dump_field(o, c.suite, r.id, "F" + std::to_string(++j), *f);
    double worst_ratio = 0.0, worst_bf = 0.0;
    bool chain = true, first = true, bound = true;
    for (std::int64_t k = 0; k < points; ++k) {
      const double p = rng.uniform(-g.half_width, g.half_width), q = rng.uniform(-g.half_width, g.half_width);
      const double t = std::exp2(rng.uniform(-2.0, 1.0));
      const auto cs = box_cauchy_schwarz_check(Q, p, q, t, slack);
      double prod = 1.0;
      for (const auto* f : {&Q.F1, &Q.F2, &Q.F3, &Q.F4}) prod *= theta_average_at(*f, p, q, t);
      const double bf = box_average_bruteforce(Q, p, q, t);
      first = first && cs.first_ok;
      chain = chain && cs.chain_ok;
      bound = bound && cs.a <= prod + slack;
      worst_bf = std::max(worst_bf, std::abs(cs.a - bf) / std::max(1.0, std::abs(bf)));
      if (prod > 0.0) worst_ratio = std::max(worst_ratio, std::abs(cs.a) / prod);
    }
    r.values["max_A_over_prod_M"] = worst_ratio;
    r.values["max_bruteforce_error"] = worst_bf;
    r.check(first, "first Cauchy-Schwarz step");
    r.check(chain, "Cauchy-Schwarz chain");
    r.check(bound, "A <= prod_j M(F_j)");
    r.check(worst_bf <= 1e-10, "brute-force agreement 1e-10");
    return r;
  });
}

// --- error-boundary ----------------------------------------------------------------

std::vector<TrialRecord> suite_error_boundary(const SuiteConfig& c, const RunOptions& o) {
  const auto g = grid_of(c, 4.0, 64);
  const int depth = static_cast<int>(c.get_int("max_depth", 4));
  const int root_k = static_cast<int>(c.get_int("root_scale", 1));
  const int spo = static_cast<int>(c.get_int("steps_per_octave", 4));
  return run_trials(c, o, c.trials, [&](std::int64_t id) {
    TrialRecord r;
    r.id = std::to_string(id);
    r.replay = replay_stub(c, id);
    auto rng = Rng::stream(c.seed, static_cast<std::uint64_t>(id));
    const auto Q = random_quad(g, rng, 0.75 * g.half_width);
    const auto tree = random_convex_tree(rng.next(), depth, 0.5, random_root(g, rng, root_k));
    r.replay["tree"] = tree_text(tree);
    int j = 0;
    for (const auto* f : {&Q.F1, &Q.F2, &Q.F3, &Q.F4}) dump_field(o, c.suite, r.id, "F" + std::to_string(++j), *f);
    const auto t = error_boundary_terms(Q, tree, spo);
    r.values["error"] = t.error;
    r.values["boundary"] = t.boundary;
    r.values["tail_bound"] = t.tail_bound;
    r.values["scale"] = t.scale;
    r.values["tree_size"] = tree.size();
    r.constants["C_err"] = t.C_err();
    r.constants["C_bnd"] = t.C_bnd() + (t.scale > 0.0 ? t.tail_bound / t.scale : 0.0);
    r.check(t.error >= 0.0 && t.boundary >= 0.0, "sums nonnegative");
    r.check(std::isfinite(t.C_err()) && std::isfinite(t.C_bnd()), "constants finite");
    return r;
  });
}

// --- tree --------------------------------------------------------------------------

std::vector<TrialRecord> suite_tree(const SuiteConfig& c, const RunOptions& o) {
  const auto g = grid_of(c, 4.0, 32);
  const int depth = static_cast<int>(c.get_int("max_depth", 3));
  const int root_k = static_cast<int>(c.get_int("root_scale", 1));
  const double max_change = c.get_double("refinement_change", 0.2);
  const FormConfig fc{static_cast<int>(c.get_int("steps_per_octave", 4)),
                      static_cast<int>(c.get_int("form_points_per_side", 16))};
  const int size_points = static_cast<int>(c.get_int("size_points_per_side", 4));
  const auto sq = make_square_function_pair();
  return run_trials(c, o, c.trials, [&](std::int64_t id) {
    TrialRecord r;
    r.id = std::to_string(id);
    r.replay = replay_stub(c, id);
    auto rng = Rng::stream(c.seed, static_cast<std::uint64_t>(id));
    const auto Q = random_quad(g, rng, 0.75 * g.half_width);
    const auto tree = random_convex_tree(rng.next(), depth, 0.5, random_root(g, rng, root_k));
    r.replay["tree"] = tree_text(tree);
    const auto [u, v] = packet_shifts(id);
    double form_seconds = 0.0, size_seconds = 0.0;
    auto ratio = [&](const EntangledQuadruple& F) {
      const auto t0 = Clock::now();
      const double lhs = sublinear_local_form(F, tree, sq.rho, sq.sigma, u, v, fc).value;
      form_seconds += seconds_since(t0);
      const auto t1 = Clock::now();
      double scale = tree.root().area();
      for (const auto* f : {&F.F1, &F.F2, &F.F3, &F.F4})
        scale *= tree_size(*f, tree, fc.steps_per_octave, size_points).value;
      size_seconds += seconds_since(t1);
      return scale > 0.0 ? lhs / scale : 0.0;
    };
    const double coarse = ratio(Q);
    const double fine = ratio({refine(Q.F1), refine(Q.F2), refine(Q.F3), refine(Q.F4)});
    const double change = coarse > 0.0 ? std::abs(fine - coarse) / coarse : 0.0;
    r.values["u"] = u;
    r.values["v"] = v;
    r.values["ratio"] = coarse;
    r.values["ratio_refined"] = fine;
    r.values["refinement_change"] = change;
    r.values["form_seconds"] = form_seconds;
    r.values["size_seconds"] = size_seconds;
    r.constants["C_tree"] = std::max(coarse, fine);
    r.check(std::isfinite(coarse) && std::isfinite(fine), "ratios finite");
    r.check(change <= max_change, "refinement changes the ratio by at most 20%");
    return r;
  });
}

// --- parseval ----------------------------------------------------------------------

std::vector<TrialRecord> suite_parseval(const SuiteConfig& c, const RunOptions& o) {
  const auto g = grid_of(c, 2.0, 16);
  const auto cfg = TruncationConfig::symmetric(static_cast<int>(c.get_int("N", 2)),
                                               static_cast<int>(c.get_int("steps_per_octave", 2)));
  const double tol = c.get_double("tolerance", 1e-3);
  const auto sq = make_square_function_pair();
  return run_trials(c, o, c.trials, [&](std::int64_t id) {
    TrialRecord r;
    r.id = std::to_string(id);
    r.replay = replay_stub(c, id);
    auto rng = Rng::stream(c.seed, static_cast<std::uint64_t>(id));
    const auto Q = random_quad(g, rng, 0.75 * g.half_width);
    CoefficientSequence mu;
    for (std::size_t i = 0; i < cfg.size(); ++i) mu.mu.push_back(rng.sign());
    const double u = static_cast<double>(id % 2), v = static_cast<double>((id / 2) % 2);
    const auto K = packet_quad(sq.rho, sq.sigma, u, v);
    const auto a = truncated_form(Q, K, mu, cfg);
    const auto b = frequency_side_form(Q, K, mu, cfg);
    const double rel = std::abs(a.value - b.value) / std::max(std::abs(b.value), 1e-300);
    r.values["spatial"] = a.value;
    r.values["frequency"] = b.value;
    r.values["relative_difference"] = rel;
    r.values["imag_residual"] = b.imag_residual;
    r.check(rel <= tol, "spatial and frequency sides agree");
    r.check(b.imag_residual <= 1e-10, "frequency side real");
    return r;
  });
}

// --- restricted --------------------------------------------------------------------

std::vector<TrialRecord> suite_restricted(const SuiteConfig& c, const RunOptions& o) {
  const auto g = grid_of(c, 4.0, 32);
  const int t_lo = static_cast<int>(c.get_int("t_lo", -3));
  const int t_hi = static_cast<int>(c.get_int("t_hi", 2));
  RestrictedOptions base;
  base.threshold = c.get_double("threshold", 1024.0);
  base.steps_per_octave = static_cast<int>(c.get_int("steps_per_octave", 4));
  base.full_plane = c.get_int("full_plane", 1) != 0;
  static const std::array<std::array<double, 4>, 3> kAlpha{
      {{0.25, 0.25, 0.25, 0.25}, {0.5, 0.5, 0.5, -0.5}, {0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6}}};
  const auto sq = make_square_function_pair();

  TrialRecord setup;
  setup.id = "empty-set";
  setup.replay = replay_stub(c, -1);
  {
    auto inst = random_instance(g, kAlpha[0], t_lo, t_hi, c.seed);
    inst.E[2] = CellSet(g);
    const auto mu = CoefficientSequence::constant(TruncationConfig{inst.t_lo, inst.t_hi, base.steps_per_octave}, 1.0);
    const auto rep = restricted_type_verify(inst, sq, mu, base, c.seed);
    setup.values["direct"] = rep.direct;
    setup.values["lambda_full"] = rep.lambda_full;
    setup.check(rep.direct == 0.0 && rep.lambda_full == 0.0, "an empty set gives Lambda = 0");
  }

  auto trials = run_trials(c, o, 3 * c.trials, [&](std::int64_t id) {
    TrialRecord r;
    r.id = std::to_string(id);
    r.replay = replay_stub(c, id);
    const auto& alpha = kAlpha[static_cast<std::size_t>(id % 3)];
    const auto inst = random_instance(g, alpha, t_lo, t_hi, trial_seed(c, id));
    std::ostringstream dump;
    write_instance(dump, inst);
    r.replay["instance"] = dump.str();
    auto opt = base;
    std::tie(opt.u, opt.v) = packet_shifts(id / 3);
    opt.policy = (id / 9) % 2 ? SignPolicy::random_signs : SignPolicy::indicator;
    const TruncationConfig tc{inst.t_lo, inst.t_hi, opt.steps_per_octave};
    auto rng = Rng::stream(trial_seed(c, id), 7);
    CoefficientSequence mu;
    for (std::size_t i = 0; i < tc.size(); ++i) mu.mu.push_back(rng.sign());
    const auto rep = restricted_type_verify(inst, sq, mu, opt, trial_seed(c, id));

    r.values["alpha"] = alpha;
    r.values["u"] = opt.u;
    r.values["v"] = opt.v;
    r.values["signs"] = opt.policy == SignPolicy::random_signs;
    r.values["measures"] = rep.measures;
    r.values["k_norm"] = rep.k_norm;
    r.values["H_measure"] = rep.H_measure;
    r.values["E1_measure"] = rep.E1_measure;
    r.values["E1_prime_measure"] = rep.E1_prime_measure;
    r.values["direct"] = rep.direct;
    r.values["lambda_full"] = rep.lambda_full;
    r.values["majorant"] = rep.majorant;
    r.values["majorant_H"] = rep.majorant_H;
    r.values["tree_bound"] = rep.tree_bound;
    r.values["trees"] = rep.tree_count;
    r.constants["C_rt"] = std::max(rep.majorant, rep.lambda_full);
    r.constants["C_HL"] = rep.C_HL;
    r.constants["C_gen"] = rep.C_gen;
    r.check(rep.h_ok, "|H| <= 1/18");
    r.check(rep.e1_ok, "2|E1'| >= |E1|");
    r.check(rep.exponent_ok, "prod |E_j|^alpha_j >= prod |E_j|^{1/2} / 4");
    r.check(rep.convex_ok, "selected trees convex");
    r.check(rep.covered_ok, "window squares covered once");
    r.check(rep.below_threshold_ok, "averages off H below the threshold");
    r.check(rep.level_mass_ok, "tree tops inside the level sets");
    r.check(rep.packing_ok, "sum over S_{R,k} of |S| <= |R|");
    r.check(rep.majorant_ok, "direct <= majorant");
    r.check(rep.decay_ok, "H part decays in the generation");
    if (o.dump_fields) {
      for (std::size_t j = 0; j < 4; ++j) dump_field(o, c.suite, r.id, "E" + std::to_string(j + 1), inst.E[j].indicator());
    }
    return r;
  });
  if (o.replay) return trials;
  trials.insert(trials.begin(), std::move(setup));
  return trials;
}

}  // namespace ev::detail
