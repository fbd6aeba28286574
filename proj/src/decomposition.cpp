#include "ev/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

namespace ev {

namespace {

constexpr double kLn2 = std::numbers::ln2;

int exact_log2(double x, const char* what) {
  int e = 0;
  const double m = std::frexp(x, &e);
  if (m != 0.5) throw std::invalid_argument(std::string(what) + ": not a power of two");
  return e - 1;
}

// Smallest k with v <= 2^k, so that v lies in (2^{k-1}, 2^k].
int level_of(double v) {
  int e = 0;
  const double m = std::frexp(v, &e);
  return m == 0.5 ? e - 1 : e;
}

std::vector<double> prefix_sums(const SampledField& F) {
  const auto n = F.n();
  std::vector<double> s(static_cast<std::size_t>((n + 1) * (n + 1)), 0.0);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j)
      s[(i + 1) * (n + 1) + j + 1] =
          F.at(i, j) * F.at(i, j) + s[i * (n + 1) + j + 1] + s[(i + 1) * (n + 1) + j] - s[i * (n + 1) + j];
  return s;
}

double block_mean(const std::vector<double>& s, std::int64_t n, std::int64_t i0, std::int64_t j0,
                  std::int64_t len) {
  const auto w = n + 1;
  const double sum = s[(i0 + len) * w + j0 + len] - s[i0 * w + j0 + len] - s[(i0 + len) * w + j0] + s[i0 * w + j0];
  return std::max(0.0, sum) / static_cast<double>(len * len);
}

double containing_average_sat(const std::vector<std::vector<double>>& sats, std::int64_t n, const CellBlock& b) {
  double best = 0.0;
  for (const auto& sat : sats) {
    for (std::int64_t s = b.s; s <= n; s *= 2) {
      const auto a0 = std::max<std::int64_t>(0, b.i0 + b.s - s), a1 = std::min(b.i0, n - s);
      const auto c0 = std::max<std::int64_t>(0, b.j0 + b.s - s), c1 = std::min(b.j0, n - s);
      for (std::int64_t a = a0; a <= a1; ++a)
        for (std::int64_t c = c0; c <= c1; ++c) best = std::max(best, block_mean(sat, n, a, c, s));
    }
  }
  return std::sqrt(best);
}

bool block_in(const CellSet& set, const CellBlock& b) {
  for (std::int64_t i = b.i0; i < b.i0 + b.s; ++i)
    for (std::int64_t j = b.j0; j < b.j0 + b.s; ++j)
      if (!set.contains(i, j)) return false;
  return true;
}

}  // namespace

// --- Cell sets --------------------------------------------------------------

CellSet::CellSet(Grid g) : grid(g), mask(static_cast<std::size_t>(g.n * g.n), 0) {}

std::int64_t CellSet::count() const { return std::count(mask.begin(), mask.end(), std::uint8_t{1}); }

double CellSet::measure() const { return static_cast<double>(count()) * grid.spacing() * grid.spacing(); }

SampledField CellSet::indicator() const {
  SampledField f(grid);
  for (std::size_t i = 0; i < mask.size(); ++i) f[static_cast<std::int64_t>(i)] = mask[i] ? 1.0 : 0.0;
  return f;
}

CellBlock cell_block(const Grid& grid, const DyadicSquare& S) {
  const double h = grid.spacing();
  CellBlock b;
  if (S.k < exact_log2(h, "cell_block")) return b;
  b.s = static_cast<std::int64_t>(std::llround(S.side() / h));
  b.i0 = static_cast<std::int64_t>(std::llround((S.side() * static_cast<double>(S.mx) + grid.half_width) / h));
  b.j0 = static_cast<std::int64_t>(std::llround((S.side() * static_cast<double>(S.my) + grid.half_width) / h));
  b.inside = b.i0 >= 0 && b.j0 >= 0 && b.i0 + b.s <= grid.n && b.j0 + b.s <= grid.n;
  return b;
}

std::vector<DyadicSquare> window_squares(const Grid& grid, int lo, int hi) {
  const int kh = exact_log2(grid.spacing(), "window_squares");
  const int kL = exact_log2(grid.half_width, "window_squares");
  std::vector<DyadicSquare> out;
  for (int k = std::max(kh, lo + 1); k <= std::min(hi, kL); ++k) {
    const std::int64_t m = std::int64_t{1} << (kL - k);
    for (std::int64_t mx = -m; mx < m; ++mx)
      for (std::int64_t my = -m; my < m; ++my) out.push_back({k, mx, my});
  }
  return out;
}

// --- Instances --------------------------------------------------------------

void validate_exponents(const std::array<double, 4>& alpha) {
  double sum = 0.0;
  for (double a : alpha) {
    if (!(a >= -0.5 && a <= 0.5)) throw std::invalid_argument("alpha_j must lie in [-1/2, 1/2]");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("alpha must sum to 1");
}

RestrictedInstance relabel(const RestrictedInstance& inst) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < 4; ++j)
    if (inst.E[j].count() >= inst.E[best].count()) best = j;
  // Slot permutations of the Klein four-group keep the entangled pattern.
  static constexpr std::array<std::array<std::size_t, 4>, 4> kPerm{
      {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}}};
  auto out = inst;
  for (std::size_t j = 0; j < 4; ++j) {
    out.E[j] = inst.E[kPerm[best][j]];
    out.alpha[j] = inst.alpha[kPerm[best][j]];
  }
  return out;
}

NormalizedInstance normalize_instance(const RestrictedInstance& inst) {
  const double m = inst.E[0].measure();
  if (!(m > 0.0)) throw std::invalid_argument("normalize_instance: E_1 is empty");
  int k = 0;
  while (std::ldexp(m, -2 * k) > 4.0) ++k;
  while (std::ldexp(m, -2 * k) < 1.0) --k;
  NormalizedInstance out{inst, k, std::ldexp(1.0, k)};
  out.inst.grid.half_width = std::ldexp(inst.grid.half_width, -k);
  for (auto& e : out.inst.E) e.grid = out.inst.grid;
  out.inst.t_lo -= k;
  out.inst.t_hi -= k;
  return out;
}

RestrictedInstance random_instance(const Grid& grid, const std::array<double, 4>& alpha, int t_lo, int t_hi,
                                   std::uint64_t seed) {
  validate_grid(grid);
  validate_exponents(alpha);
  auto rng = Rng::stream(seed, 0);
  const double h = grid.spacing();
  const double box = 4.0 * grid.half_width * grid.half_width;
  std::array<double, 4> target{};
  target[0] = std::min(box, rng.uniform(1.0, 4.0));
  for (std::size_t j = 1; j < 4; ++j) target[j] = rng.uniform(h * h, target[0]);
  if (alpha[3] < 0.0) {
    const auto it = std::min_element(target.begin() + 1, target.end());
    std::iter_swap(it, target.begin() + 3);
  }
  RestrictedInstance inst;
  inst.grid = grid;
  inst.alpha = alpha;
  inst.t_lo = t_lo;
  inst.t_hi = t_hi;
  inst.seed = seed;
  // Rectangles are drawn inside a common cluster box; draws whose entangled
  // products vanish identically are repeated.
  const auto c = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(2.0 * std::sqrt(target[0]) / h)), 1,
                                          grid.n);
  const std::int64_t wmax = std::max<std::int64_t>(1, c / 2);
  for (int attempt = 0; attempt < 256; ++attempt) {
    const auto ci = rng.uniform_int(0, grid.n - c), cj = rng.uniform_int(0, grid.n - c);
    for (std::size_t j = 0; j < 4; ++j) {
      CellSet e(grid);
      while (e.measure() < target[j]) {
        const auto w = rng.uniform_int(1, wmax), ht = rng.uniform_int(1, wmax);
        const auto i0 = ci + rng.uniform_int(0, c - w), j0 = cj + rng.uniform_int(0, c - ht);
        for (std::int64_t a = i0; a < i0 + w; ++a)
          for (std::int64_t b = j0; b < j0 + ht; ++b) e.insert(a, b);
      }
      inst.E[j] = std::move(e);
    }
    if (entangled_count(inst.E) > 0) return inst;
  }
  throw std::runtime_error("random_instance: no non-degenerate draw");
}

std::int64_t entangled_count(const std::array<CellSet, 4>& E) {
  const auto n = E[0].grid.n;
  std::int64_t total = 0;
  for (std::int64_t x = 0; x < n; ++x)
    for (std::int64_t x2 = 0; x2 < n; ++x2) {
      std::int64_t a = 0, b = 0;
      for (std::int64_t y = 0; y < n; ++y) {
        a += E[0].contains(x, y) && E[1].contains(x2, y);
        b += E[3].contains(x, y) && E[2].contains(x2, y);
      }
      total += a * b;
    }
  return total;
}

void write_instance(std::ostream& out, const RestrictedInstance& inst) {
  out.precision(17);
  out << "restricted-instance 1\n"
      << inst.grid.half_width << ' ' << inst.grid.n << '\n'
      << inst.t_lo << ' ' << inst.t_hi << ' ' << inst.seed << '\n';
  for (double a : inst.alpha) out << a << ' ';
  out << '\n';
  for (const auto& e : inst.E) {
    for (auto c : e.mask) out << (c ? '1' : '0');
    out << '\n';
  }
}

RestrictedInstance read_instance(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "restricted-instance" || version != 1) {
    throw std::runtime_error("read_instance: bad header");
  }
  RestrictedInstance inst;
  inst.grid.dim = 2;
  if (!(in >> inst.grid.half_width >> inst.grid.n >> inst.t_lo >> inst.t_hi >> inst.seed)) {
    throw std::runtime_error("read_instance: bad grid line");
  }
  validate_grid(inst.grid);
  for (double& a : inst.alpha)
    if (!(in >> a)) throw std::runtime_error("read_instance: bad exponents");
  for (auto& e : inst.E) {
    std::string bits;
    if (!(in >> bits) || bits.size() != static_cast<std::size_t>(inst.grid.n * inst.grid.n)) {
      throw std::runtime_error("read_instance: bad mask");
    }
    e = CellSet(inst.grid);
    for (std::size_t i = 0; i < bits.size(); ++i) e.mask[i] = bits[i] == '1';
  }
  return inst;
}

// --- Exceptional set and trees ------------------------------------------------

ExceptionalSet build_exceptional_set(const RestrictedInstance& inst, double threshold) {
  const auto& g = inst.grid;
  const auto n = g.n;
  ExceptionalSet out{CellSet(g), {}, inst.E[0], false, false, false};
  for (const auto& e : inst.E) {
    const auto c = e.count();
    if (c == 0) continue;
    const auto M = quadratic_maximal((1.0 / std::sqrt(e.measure())) * e.indicator());
    for (std::int64_t i = 0; i < n * n; ++i)
      if (M.values[i] > threshold) out.H.mask[static_cast<std::size_t>(i)] = 1;
  }
  const int kh = exact_log2(g.spacing(), "build_exceptional_set");
  std::set<DyadicSquare> roots;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < n; ++j) {
      if (!out.H.contains(i, j)) continue;
      DyadicSquare s{kh, static_cast<std::int64_t>(std::floor((g.coord(i) + 0.5 * g.spacing()) / g.spacing())),
                     static_cast<std::int64_t>(std::floor((g.coord(j) + 0.5 * g.spacing()) / g.spacing()))};
      for (;;) {
        const auto b = cell_block(g, s.parent());
        if (!b.inside || !block_in(out.H, b)) break;
        s = s.parent();
      }
      roots.insert(s);
    }
  out.R.assign(roots.begin(), roots.end());
  for (const auto& r : out.R) {
    const auto b = cell_block(g, r);
    const auto i0 = b.i0 - b.s, j0 = b.j0 - b.s;
    if (i0 < 0 || j0 < 0 || i0 + 3 * b.s > n || j0 + 3 * b.s > n) out.escapes = true;
    for (auto i = std::max<std::int64_t>(0, i0); i < std::min(n, i0 + 3 * b.s); ++i)
      for (auto j = std::max<std::int64_t>(0, j0); j < std::min(n, j0 + 3 * b.s); ++j)
        out.E1_prime.mask[i * n + j] = 0;
  }
  out.h_ok = out.H.measure() <= 1.0 / 18.0;
  out.e1_ok = 2 * out.E1_prime.count() >= inst.E[0].count();
  return out;
}

double containing_average(const std::array<SampledField, 4>& G, const CellBlock& b) {
  std::vector<std::vector<double>> sats;
  for (const auto& f : G) sats.push_back(prefix_sums(f));
  return containing_average_sat(sats, G[0].n(), b);
}

Forest select_trees(const std::array<SampledField, 4>& G, const CellSet& H, int t_lo, int t_hi, double threshold) {
  const auto& g = G[0].grid();
  const auto n = g.n;
  std::vector<std::vector<double>> sats;
  for (const auto& f : G) sats.push_back(prefix_sums(f));
  Forest out;
  const auto squares = window_squares(g, t_lo, t_hi);
  std::size_t zero = 0;
  for (const auto& S : squares) {
    const auto b = cell_block(g, S);
    if (block_in(H, b)) {
      out.inside_H.push_back(S);
      continue;
    }
    const double v = containing_average_sat(sats, n, b);
    if (v > threshold) out.below_threshold_ok = false;
    if (v == 0.0) {
      ++zero;
      continue;
    }
    const int k = level_of(v);
    out.S[k].push_back(S);
    out.level[S] = k;
  }
  const int top = squares.empty() ? 0 : squares.back().k;
  std::map<DyadicSquare, std::vector<DyadicSquare>> groups;
  for (const auto& [S, k] : out.level) {
    DyadicSquare root = S;
    for (DyadicSquare a = S; a.k < top;) {
      a = a.parent();
      const auto it = out.level.find(a);
      if (it != out.level.end() && it->second == k) root = a;
    }
    groups[root].push_back(S);
  }
  std::size_t members = 0;
  for (auto& [root, list] : groups) {
    members += list.size();
    if (!is_convex(CandidateTree{root, list})) {
      out.convex_ok = false;
      continue;
    }
    out.trees.push_back({out.level.at(root), ConvexTree(root, std::move(list))});
  }
  out.covered_ok = members + out.inside_H.size() + zero == squares.size();
  return out;
}

// --- Restricted-type verification -----------------------------------------------

bool RestrictedReport::pass() const {
  return h_ok && e1_ok && exponent_ok && convex_ok && covered_ok && below_threshold_ok && level_mass_ok &&
         packing_ok && majorant_ok && decay_ok;
}

RestrictedReport restricted_type_verify(const RestrictedInstance& input, const AdmissiblePair& pair,
                                        const CoefficientSequence& mu, const RestrictedOptions& options,
                                        std::uint64_t sign_seed) {
  validate_exponents(input.alpha);
  const auto norm = normalize_instance(relabel(input));
  const auto& inst = norm.inst;
  const auto& g = inst.grid;
  const auto n = g.n;
  const double h = g.spacing();
  const TruncationConfig tc{inst.t_lo, inst.t_hi, options.steps_per_octave};
  mu.validate(tc);

  RestrictedReport rep;
  rep.k_norm = norm.k;
  for (std::size_t j = 0; j < 4; ++j) rep.measures[j] = inst.E[j].measure();

  const auto exc = build_exceptional_set(inst, options.threshold);
  rep.H_measure = exc.H.measure();
  rep.E1_measure = inst.E[0].measure();
  rep.E1_prime_measure = exc.E1_prime.measure();
  rep.h_ok = exc.h_ok;
  rep.e1_ok = exc.e1_ok;

  double lhs = 1.0, rhs = 0.25;
  for (std::size_t j = 0; j < 4; ++j) {
    lhs *= std::pow(rep.measures[j], inst.alpha[j]);
    rhs *= std::sqrt(rep.measures[j]);
  }
  rep.exponent_ok = lhs >= rhs * (1.0 - 1e-12);

  auto rng = Rng::stream(sign_seed, 1);
  std::array<SampledField, 4> G;
  for (std::size_t j = 0; j < 4; ++j) {
    const auto& cells = j == 0 ? exc.E1_prime : inst.E[j];
    SampledField f(g);
    const double c = rep.measures[j] > 0.0 ? 1.0 / std::sqrt(rep.measures[j]) : 0.0;
    for (std::int64_t i = 0; i < n * n; ++i) {
      if (!cells.mask[static_cast<std::size_t>(i)]) continue;
      f[i] = c * (options.policy == SignPolicy::random_signs ? rng.sign() : 1.0);
    }
    G[j] = std::move(f);
  }

  const auto forest = select_trees(G, exc.H, inst.t_lo, inst.t_hi, options.threshold);
  rep.convex_ok = forest.convex_ok;
  rep.covered_ok = forest.covered_ok;
  rep.below_threshold_ok = forest.below_threshold_ok;
  rep.tree_count = forest.trees.size();

  // Samples tagged by tree index, or by -1 - generation for squares inside H.
  std::vector<FormSample> samples;
  std::vector<std::int64_t> tag;
  for (std::size_t i = 0; i < forest.trees.size(); ++i) {
    const auto& m = forest.trees[i].tree.members();
    const std::vector<DyadicSquare> list(m.begin(), m.end());
    const auto s = whitney_samples(list, g, options.steps_per_octave);
    samples.insert(samples.end(), s.begin(), s.end());
    tag.insert(tag.end(), s.size(), static_cast<std::int64_t>(i));
  }
  rep.packing_ok = true;
  std::map<std::pair<DyadicSquare, int>, double> packed;
  for (const auto& S : forest.inside_H) {
    const auto it = std::find_if(exc.R.begin(), exc.R.end(), [&](const DyadicSquare& r) { return r.contains(S); });
    if (it == exc.R.end()) {
      rep.covered_ok = false;
      continue;
    }
    const int gen = it->k - S.k;
    packed[{*it, gen}] += S.area();
    const std::vector<DyadicSquare> one{S};
    const auto s = whitney_samples(one, g, options.steps_per_octave);
    samples.insert(samples.end(), s.begin(), s.end());
    tag.insert(tag.end(), s.size(), -1 - gen);
  }
  for (const auto& [key, area] : packed)
    if (area > key.first.area() * (1.0 + 1e-12)) rep.packing_ok = false;

  const EntangledQuadruple Q{G[0], G[1], G[2], G[3]};
  const auto K = packet_quad(pair.rho, pair.sigma, options.u, options.v);
  const auto values = sample_values(Q, K, samples);
  const auto ts = tc.t_samples();
  auto mu_at = [&](double t) {
    const auto idx = std::llround((std::log2(t) - tc.lo) * tc.steps_per_octave - 0.5);
    return (idx >= 0 && idx < static_cast<long long>(ts.size())) ? mu.mu[static_cast<std::size_t>(idx)] : 0.0;
  };
  double direct = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    direct += s.weight * mu_at(s.t) * values[i];
    const double a = s.weight * std::abs(values[i]);
    if (tag[i] >= 0) {
      rep.majorant_trees += a;
    } else {
      rep.majorant_H += a;
      rep.H_by_generation[static_cast<int>(-1 - tag[i])] += a;
    }
  }
  rep.direct = std::abs(direct);
  rep.majorant = rep.majorant_trees + rep.majorant_H;
  rep.majorant_ok = rep.direct <= rep.majorant * (1.0 + 1e-12) + 1e-300;
  rep.decay_ok = true;
  for (const auto& [gen, value] : rep.H_by_generation) {
    const auto next = rep.H_by_generation.find(gen + 1);
    if (gen >= 4 && next != rep.H_by_generation.end() && next->second > value) rep.decay_ok = false;
  }
  if (options.full_plane) rep.lambda_full = std::abs(truncated_form(Q, K, mu, tc).value);

  // Tree sizes from shared theta averages.
  std::map<double, std::array<SampledField, 4>> avg;
  for (const auto& st : forest.trees) {
    const auto& members = st.tree.members();
    std::array<double, 4> best{};
    for (const auto& S : members) {
      const auto b = cell_block(g, S);
      for (int q = 0; q < options.steps_per_octave; ++q) {
        const double t = std::exp2(S.k - 1.0 + (q + 0.5) / options.steps_per_octave);
        auto it = avg.find(t);
        if (it == avg.end()) {
          const auto table = theta_cell_table(g, t);
          std::array<SampledField, 4> a;
          for (std::size_t j = 0; j < 4; ++j) a[j] = theta_average(G[j], table);
          it = avg.emplace(t, std::move(a)).first;
        }
        for (std::size_t j = 0; j < 4; ++j)
          for (std::int64_t a = b.i0; a < b.i0 + b.s; ++a)
            for (std::int64_t c = b.j0; c < b.j0 + b.s; ++c) best[j] = std::max(best[j], it->second[j].at(a, c));
      }
    }
    double prod = st.tree.root().area();
    for (std::size_t j = 0; j < 4; ++j) {
      const double m = std::sqrt(best[j]);
      prod *= m;
      rep.C_gen = std::max(rep.C_gen, m / std::ldexp(1.0, st.k));
    }
    rep.tree_bound += prod;
  }

  // Weak-type masses of the level sets used by the selection.
  std::array<MaximalField, 4> M;
  std::array<double, 4> norms{};
  for (std::size_t j = 0; j < 4; ++j) {
    M[j] = quadratic_maximal(G[j]);
    norms[j] = G[j].squared().mass();
  }
  rep.level_mass_ok = true;
  for (const auto& [k, list] : forest.S) {
    const double lam = std::ldexp(1.0, k - 1);
    double roots = 0.0;
    for (const auto& st : forest.trees)
      if (st.k == k) roots += st.tree.root().area();
    double mass = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      const double m = level_set(M[j], lam).measure;
      mass += m;
      if (norms[j] > 0.0) rep.C_HL = std::max(rep.C_HL, m * lam * lam / norms[j]);
    }
    if (roots > mass + 1e-12 * h * h) rep.level_mass_ok = false;
  }
  return rep;
}

// --- Error and boundary sums -------------------------------------------------------

ErrorBoundaryTerms error_boundary_terms(const EntangledQuadruple& Q, const ConvexTree& tree, int steps_per_octave) {
  Q.validate();
  if (steps_per_octave < 1) throw std::invalid_argument("error_boundary_terms: steps_per_octave < 1");
  const auto& g = Q.grid();
  const auto n = g.n;
  const double h = g.spacing();
  const auto abs_field = [](const SampledField& f) {
    SampledField a = f;
    for (double& v : a.values()) v = std::abs(v);
    return a;
  };
  const std::array<SampledField, 4> A{abs_field(Q.F1), abs_field(Q.F2), abs_field(Q.F3), abs_field(Q.F4)};
  const auto v2 = vartheta_squared_profile();
  const KernelQuad K{v2, v2, v2, v2};

  ErrorBoundaryTerms out;
  std::map<int, std::vector<DyadicSquare>> by_scale;
  for (const auto& s : tree.members()) by_scale[s.k].push_back(s);
  const double inner = 2.0 * g.half_width * (2.0 / 7.0) * (2.0 / 7.0);
  for (const auto& [k, squares] : by_scale) {
    SampledField mask(g);
    for (const auto& s : squares) {
      const auto b = cell_block(g, s);
      if (!b.inside) throw std::invalid_argument("error_boundary_terms: tree square outside the grid box or below cell size");
      for (std::int64_t i = b.i0; i < b.i0 + b.s; ++i)
        for (std::int64_t j = b.j0; j < b.j0 + b.s; ++j) mask.at(i, j) = 1.0;
    }
    SampledField outside(g);
    for (std::int64_t i = 0; i < n * n; ++i) outside[i] = 1.0 - mask[i];

    const auto samples = whitney_samples(squares, g, steps_per_octave);
    out.error += sum_over_samples(EntangledQuadruple{A[0].pointwise(outside), A[1], A[2], A[3]}, K, samples,
                                  Integrand::signed_value);

    std::vector<FormSample> comp;
    for (int q = 0; q < steps_per_octave; ++q) {
      const double t = std::exp2(k - 1.0 + (q + 0.5) / steps_per_octave);
      for (std::int64_t i = 0; i < n; ++i)
        for (std::int64_t j = 0; j < n; ++j)
          if (outside.at(i, j) > 0.0) comp.push_back({g.cell_center(i), g.cell_center(j), t, h * h * kLn2 / steps_per_octave});
    }
    const EntangledQuadruple B{A[0].pointwise(mask), A[1].pointwise(mask), A[2].pointwise(mask),
                               A[3].pointwise(mask)};
    out.boundary += sum_over_samples(B, K, comp, Integrand::signed_value);

    double sup = 1.0;
    for (const auto* f : {&B.F1, &B.F2, &B.F3, &B.F4}) sup *= f->max_abs();
    const double outer = 2.0 * std::ldexp(1.0, k) / (49.0 * 13.0);
    out.tail_bound += kLn2 * sup * (2.0 * inner * outer + outer * outer);
  }
  double scale = tree.root().area();
  for (const auto& f : A) scale *= tree_size(f, tree, steps_per_octave).value;
  out.scale = scale;
  return out;
}

}  // namespace ev
