#include "hxc/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "hxc/rng.hpp"

namespace hxc {

// ---------------------------------------------------------------- intervals

double DyadicInterval::length() const { return std::ldexp(1.0, k); }
double DyadicInterval::left() const { return std::ldexp(static_cast<double>(n), k); }

bool DyadicInterval::contains(double x) const {
  const double a = left();
  return a < x && x <= a + length();
}

bool DyadicInterval::contains_cell(int i, int n_log2) const {
  const int lvl = level();
  if (lvl < 0 || lvl > n_log2) return false;
  return (static_cast<long long>(i) >> (n_log2 - lvl)) == n;
}

DyadicInterval DyadicInterval::of_cell(int i, int level, int n_log2) {
  if (level < 0 || level > n_log2) throw std::invalid_argument("DyadicInterval::of_cell: level out of range");
  return at_level(level, static_cast<long long>(i) >> (n_log2 - level));
}

double haar_eval(const DyadicInterval& interval, double x) {
  if (!interval.contains(x)) return 0.0;
  const double len = interval.length();
  const double amp = 1.0 / std::sqrt(len);
  return x <= interval.left() + 0.5 * len ? amp : -amp;
}

// ---------------------------------------------------------------- Haar transform

namespace {

void check_depth(int depth, int n_log2) {
  if (depth < 0 || depth > n_log2)
    throw std::invalid_argument("Haar depth " + std::to_string(depth) + " exceeds the grid resolution");
}

// Cell means at level `depth` (length 2^depth) -> [mean, Haar slots].
void haar_forward_1d(std::vector<cplx>& a, int depth) {
  std::vector<cplx> cur(a), next;
  for (int l = depth - 1; l >= 0; --l) {
    const int count = 1 << l;
    const double half_sqrt = 0.5 * std::sqrt(std::ldexp(1.0, -l));
    next.assign(count, cplx{});
    for (int p = 0; p < count; ++p) {
      const cplx left = cur[2 * p], right = cur[2 * p + 1];
      a[count + p] = half_sqrt * (left - right);
      next[p] = 0.5 * (left + right);
    }
    cur.swap(next);
  }
  a[0] = cur[0];
}

void haar_inverse_1d(std::vector<cplx>& a, int depth) {
  std::vector<cplx> cur{a[0]}, next;
  for (int l = 0; l < depth; ++l) {
    const int count = 1 << l;
    const double inv_sqrt = 1.0 / std::sqrt(std::ldexp(1.0, -l));
    next.assign(2 * count, cplx{});
    for (int p = 0; p < count; ++p) {
      const cplx d = a[count + p] * inv_sqrt;
      next[2 * p] = cur[p] + d;
      next[2 * p + 1] = cur[p] - d;
    }
    cur.swap(next);
  }
  a = std::move(cur);
}

template <class Fn>
void for_each_line(std::vector<cplx>& grid, int m, Fn&& fn) {
  std::vector<cplx> line(m);
  for (int sy = 0; sy < m; ++sy) {
    for (int sx = 0; sx < m; ++sx) line[sx] = grid[static_cast<std::size_t>(sx) * m + sy];
    fn(line);
    for (int sx = 0; sx < m; ++sx) grid[static_cast<std::size_t>(sx) * m + sy] = line[sx];
  }
  for (int sx = 0; sx < m; ++sx) {
    std::copy_n(grid.begin() + static_cast<std::ptrdiff_t>(sx) * m, m, line.begin());
    fn(line);
    std::copy_n(line.begin(), m, grid.begin() + static_cast<std::ptrdiff_t>(sx) * m);
  }
}

} // namespace

cplx HaarCoefficients::coefficient(const DyadicInterval& i, const DyadicInterval& j) const {
  if (i.level() < 0 || i.level() >= depth || j.level() < 0 || j.level() >= depth)
    throw std::out_of_range("HaarCoefficients: interval outside the resolved levels");
  return at(slot(i), slot(j));
}

double HaarCoefficients::haar_energy() const {
  double e = 0.0;
  for (int sx = 1; sx < slots(); ++sx)
    for (int sy = 1; sy < slots(); ++sy) e += std::norm(at(sx, sy));
  return e;
}

HaarCoefficients haar_transform(const SampledField& f, int depth) {
  check_depth(depth, f.n_log2());
  const int n = f.size();
  const int m = 1 << depth;
  const int block = n / m;
  HaarCoefficients c;
  c.n_log2 = f.n_log2();
  c.depth = depth;
  c.data.assign(static_cast<std::size_t>(m) * m, cplx{});
  const double inv = 1.0 / (static_cast<double>(block) * block);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.at(i / block, j / block) += f(i, j);
  for (auto& v : c.data) v *= inv;
  for_each_line(c.data, m, [depth](std::vector<cplx>& line) { haar_forward_1d(line, depth); });
  return c;
}

SampledField haar_inverse(const HaarCoefficients& c) {
  const int m = c.slots();
  std::vector<cplx> grid = c.data;
  for_each_line(grid, m, [&c](std::vector<cplx>& line) { haar_inverse_1d(line, c.depth); });
  SampledField out(c.n_log2);
  const int block = out.size() / m;
  for (int i = 0; i < out.size(); ++i)
    for (int j = 0; j < out.size(); ++j) out(i, j) = grid[static_cast<std::size_t>(i / block) * m + j / block];
  return out;
}

// ---------------------------------------------------------------- metric

double dyadic_metric(double x, double x2, double floor_scale) {
  if (!(x > 0.0 && x <= 1.0) || !(x2 > 0.0 && x2 <= 1.0))
    throw std::invalid_argument("dyadic_metric: points must lie in (0, 1]");
  if (!(floor_scale > 0.0)) throw std::invalid_argument("dyadic_metric: floor scale must be positive");
  auto position = [](double t, int level) { return std::ceil(std::ldexp(t, level)) - 1.0; };
  double length = 1.0;
  for (int level = 1; std::ldexp(1.0, -level) >= floor_scale; ++level) {
    if (position(x, level) != position(x2, level)) break;
    length = std::ldexp(1.0, -level);
  }
  return std::max(length, floor_scale);
}

double cell_metric(int i, int i2, int n_log2) {
  const auto diff = static_cast<unsigned>(i ^ i2);
  return std::ldexp(1.0, std::bit_width(diff) - n_log2);
}

// ---------------------------------------------------------------- model operator

std::string to_string(DyadicVariant v) { return v == DyadicVariant::squares ? "squares" : "rows"; }

DyadicVariant dyadic_variant_from_string(const std::string& s) {
  if (s == "squares") return DyadicVariant::squares;
  if (s == "rows") return DyadicVariant::rows;
  throw std::invalid_argument("unknown dyadic variant '" + s + "'");
}

double scale_product(int level_i, int level_j, double beta) {
  return std::ldexp(std::exp2(-static_cast<double>(level_j) * beta), -level_i);
}

namespace {

bool is_dyadic_value(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return false;
  int e = 0;
  return std::frexp(v, &e) == 0.5;
}

void require_dyadic(const LinearizerField& v, const char* what) {
  for (double x : v.values)
    if (!is_dyadic_value(x)) throw std::invalid_argument(std::string(what) + ": V must take values in {2^k}");
}

// Sign-carrying Haar value of the level-l interval at cell i: +-2^(l/2).
double haar_at_cell(int i, int level, int n_log2) {
  const bool right = (i >> (n_log2 - level - 1)) & 1;
  const double amp = std::sqrt(std::ldexp(1.0, level));
  return right ? -amp : amp;
}

struct Admissibility {
  DyadicVariant variant;
  double beta;
  double lipschitz;

  double effective_beta() const { return variant == DyadicVariant::squares ? 1.0 : beta; }
  bool side_ok(int ly) const {
    return variant == DyadicVariant::squares || std::exp2(-static_cast<double>(ly) * beta) >= lipschitz;
  }
  bool operator()(int lx, int ly, double v) const { return side_ok(ly) && scale_product(lx, ly, effective_beta()) <= v; }
};

} // namespace

DyadicModelResult dyadic_model_operator(const SampledField& f, const LinearizerField& v, double beta,
                                        double lipschitz, DyadicVariant variant, int depth, bool reference) {
  if (f.n_log2() != v.n_log2) throw std::invalid_argument("dyadic_model_operator: grid size mismatch");
  require_dyadic(v, "dyadic_model_operator");
  check_depth(depth, f.n_log2());
  const int n = f.size();
  const int nl = f.n_log2();
  const auto coeffs = haar_transform(f, depth);
  const Admissibility adm{variant, beta, lipschitz};

  DyadicModelResult res{SampledField(nl), true, ""};
  if (variant == DyadicVariant::squares) {
    for (double x : v.values)
      if (!(std::sqrt(x) > lipschitz)) {
        res.hypotheses_hold = false;
        res.note = "sqrt(V) > L fails at some grid point";
        break;
      }
  }

  const int d = depth;
  std::vector<cplx> term(static_cast<std::size_t>(d) * d);
  std::vector<cplx> suffix(static_cast<std::size_t>(d + 1) * (d + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double val = v(i, j);
      for (int lx = 0; lx < d; ++lx) {
        const int sx = (1 << lx) + (i >> (nl - lx));
        const double hx = haar_at_cell(i, lx, nl);
        for (int ly = 0; ly < d; ++ly) {
          const int sy = (1 << ly) + (j >> (nl - ly));
          term[static_cast<std::size_t>(lx) * d + ly] = coeffs.at(sx, sy) * (hx * haar_at_cell(j, ly, nl));
        }
      }
      cplx acc = 0.0;
      if (reference) {
        for (int lx = 0; lx < d; ++lx)
          for (int ly = 0; ly < d; ++ly)
            if (adm(lx, ly, val)) acc += term[static_cast<std::size_t>(lx) * d + ly];
        res.field(i, j) = acc;
        continue;
      }
      // suffix[lx][ly] = sum over lx' >= lx of term[lx'][ly]
      auto sx_at = [&](int lx, int ly) -> cplx& { return suffix[static_cast<std::size_t>(lx) * (d + 1) + ly]; };
      for (int ly = 0; ly < d; ++ly) {
        sx_at(d, ly) = 0.0;
        for (int lx = d - 1; lx >= 0; --lx) sx_at(lx, ly) = sx_at(lx + 1, ly) + term[static_cast<std::size_t>(lx) * d + ly];
      }
      // smallest lx with the pair admissible; admissibility only grows with lx
      auto first_x = [&](int ly, int from) {
        int lx = from;
        while (lx < d && !adm(lx, ly, val)) ++lx;
        return lx;
      };
      if (variant == DyadicVariant::rows) {
        for (int ly = 0; ly < d; ++ly)
          if (adm.side_ok(ly)) acc += sx_at(first_x(ly, 0), ly);
      } else {
        // |I| <= |J|
        for (int ly = 0; ly < d; ++ly) acc += sx_at(first_x(ly, ly), ly);
        // |J| < |I|, the transposed sum
        for (int lx = 0; lx < d; ++lx) {
          int ly = lx + 1;
          while (ly < d && !adm(lx, ly, val)) ++ly;
          for (; ly < d; ++ly) acc += term[static_cast<std::size_t>(lx) * d + ly];
        }
      }
      res.field(i, j) = acc;
    }
  }
  return res;
}

// ---------------------------------------------------------------- selection stability

SelectionReport check_selection_stability(const LinearizerField& v, double lipschitz, double beta,
                                          DyadicVariant variant) {
  const int n = v.size();
  const int nl = v.n_log2;
  const Admissibility adm{variant, beta, lipschitz};
  constexpr std::size_t kKeep = 16;

  std::vector<SelectionReport> rows(n);
#pragma omp parallel for schedule(dynamic)
  for (int y = 0; y < n; ++y) {
    auto& rep = rows[y];
    for (int lx = 0; lx <= nl; ++lx) {
      const int len = n >> lx;
      for (int p = 0; p < (1 << lx); ++p) {
        const int lo = p * len;
        for (int ly = 0; ly <= nl; ++ly) {
          if (!adm.side_ok(ly)) continue;
          if (variant == DyadicVariant::squares && lx < ly) continue;  // |I| <= |J|
          const double a = scale_product(lx, ly, adm.effective_beta());
          int admissible = 0, first_in = -1, first_out = -1;
          for (int x = lo; x < lo + len; ++x) {
            if (a <= v(x, y)) {
              ++admissible;
              if (first_in < 0) first_in = x;
            } else if (first_out < 0) {
              first_out = x;
            }
          }
          rep.checked += static_cast<std::uint64_t>(admissible);
          if (admissible > 0 && first_out >= 0) {
            rep.violations += static_cast<std::uint64_t>(admissible);
            rep.witnesses.push_back({first_in, first_out, y, lx, ly});
          }
        }
      }
      if (rep.witnesses.size() > 4 * kKeep) {
        std::sort(rep.witnesses.begin(), rep.witnesses.end());
        rep.witnesses.resize(kKeep);
      }
    }
  }

  SelectionReport total;
  for (auto& r : rows) {
    total.checked += r.checked;
    total.violations += r.violations;
    total.witnesses.insert(total.witnesses.end(), r.witnesses.begin(), r.witnesses.end());
  }
  std::sort(total.witnesses.begin(), total.witnesses.end());
  if (total.witnesses.size() > kKeep) total.witnesses.resize(kKeep);
  return total;
}

// ---------------------------------------------------------------- dyadic Lipschitz

DyadicLipschitzReport verify_dyadic_lipschitz(const LinearizerField& v, double lipschitz, DyadicVariant variant) {
  const int n = v.size();
  const int nl = v.n_log2;
  DyadicLipschitzReport rep;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!is_dyadic_value(v(i, j))) {
        rep.pass = false;
        ++rep.violations;
        if (rep.witness[0] < 0) rep.witness = {i, j, i, j};
      }
  if (!rep.pass) return rep;

  // A block (square or interval) of side s violates the condition exactly when
  // V is not constant on it and its maximum exceeds L s: the maximizing point
  // and any point with a different value are at distance <= s.
  auto record = [&](int xa, int ya, int xb, int yb) {
    ++rep.violations;
    if (rep.witness[0] < 0) rep.witness = {xa, ya, xb, yb};
  };
  for (int level = 0; level < nl; ++level) {
    const int len = n >> level;
    const double bound = lipschitz * std::ldexp(1.0, -level);
    if (variant == DyadicVariant::squares) {
      for (int bx = 0; bx < n; bx += len)
        for (int by = 0; by < n; by += len) {
          int mx = bx, my = by;
          bool constant = true;
          for (int x = bx; x < bx + len; ++x)
            for (int y = by; y < by + len; ++y) {
              if (v(x, y) != v(bx, by)) constant = false;
              if (v(x, y) > v(mx, my)) mx = x, my = y;
            }
          if (constant || !(v(mx, my) > bound)) continue;
          for (int x = bx, found = 0; x < bx + len && !found; ++x)
            for (int y = by; y < by + len; ++y)
              if (v(x, y) != v(mx, my)) {
                record(mx, my, x, y);
                found = 1;
                break;
              }
        }
    } else {
      for (int y = 0; y < n; ++y)
        for (int bx = 0; bx < n; bx += len) {
          int mx = bx;
          bool constant = true;
          for (int x = bx; x < bx + len; ++x) {
            if (v(x, y) != v(bx, y)) constant = false;
            if (v(x, y) > v(mx, y)) mx = x;
          }
          if (constant || !(v(mx, y) > bound)) continue;
          for (int x = bx; x < bx + len; ++x)
            if (v(x, y) != v(mx, y)) {
              record(mx, y, x, y);
              break;
            }
        }
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

// ---------------------------------------------------------------- generators

LinearizerField generate_dyadic_linearizer(int n_log2, double lipschitz, DyadicVariant variant, std::uint64_t seed) {
  const int n = grid_size(n_log2);
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz))
    throw std::invalid_argument("generate_dyadic_linearizer: L must be positive");
  Rng rng(seed);
  std::vector<double> values(static_cast<std::size_t>(n) * n, 0.0);

  // Values 2^e with e_lo <= e <= floor(log2(L s)) for a leaf of side s.
  int e_lo;
  if (variant == DyadicVariant::squares) {
    if (lipschitz > 0.5) throw std::invalid_argument("generate_dyadic_linearizer: squares needs L <= 1/2");
    e_lo = dyadic_level(lipschitz * lipschitz) + 1;  // smallest power of two above L^2
  } else {
    e_lo = dyadic_level(lipschitz) - 4;
  }
  auto top_exponent = [&](int leaf_level) { return dyadic_level(std::ldexp(lipschitz, -leaf_level)); };
  auto leaf_value = [&](int leaf_level) {
    const int hi = top_exponent(leaf_level);
    return std::ldexp(1.0, static_cast<int>(rng.between(e_lo, hi)));
  };
  auto can_split = [&](int level) { return level < n_log2 && top_exponent(level + 1) >= e_lo; };

  if (variant == DyadicVariant::squares) {
    std::function<void(int, int, int)> square = [&](int level, int bx, int by) {
      const int len = n >> level;
      if (can_split(level) && (level == 0 || rng.uniform() < 0.55)) {
        const int h = len / 2;
        square(level + 1, bx, by);
        square(level + 1, bx + h, by);
        square(level + 1, bx, by + h);
        square(level + 1, bx + h, by + h);
        return;
      }
      const double val = leaf_value(level);
      for (int x = bx; x < bx + len; ++x)
        for (int y = by; y < by + len; ++y) values[static_cast<std::size_t>(x) * n + y] = val;
    };
    square(0, 0, 0);
  } else {
    for (int y = 0; y < n; ++y) {
      std::function<void(int, int)> interval = [&](int level, int bx) {
        const int len = n >> level;
        if (can_split(level) && rng.uniform() < 0.6) {
          interval(level + 1, bx);
          interval(level + 1, bx + len / 2);
          return;
        }
        const double val = leaf_value(level);
        for (int x = bx; x < bx + len; ++x) values[static_cast<std::size_t>(x) * n + y] = val;
      };
      interval(0, 0);
    }
  }
  auto field = LinearizerField::from_values(n_log2, std::move(values), RegularityKind::dyadic_of_lipschitz);
  field.spec.lipschitz = lipschitz;
  field.seed = seed;
  return field;
}

LinearizerField generate_violating_dyadic_linearizer(int n_log2, double lipschitz, double beta,
                                                     DyadicVariant variant, std::uint64_t seed,
                                                     SelectionWitness* planted) {
  const int n = grid_size(n_log2);
  Rng rng(seed);
  const Admissibility adm{variant, beta, lipschitz};
  const int lx = static_cast<int>(rng.between(0, n_log2 - 1));
  std::vector<int> choices;
  for (int ly = 0; ly <= n_log2; ++ly) {
    if (!adm.side_ok(ly)) continue;
    if (variant == DyadicVariant::squares && ly > lx) continue;
    choices.push_back(ly);
  }
  if (choices.empty()) throw std::invalid_argument("generate_violating_dyadic_linearizer: no J meets the side conditions");
  const int ly = choices[rng.below(choices.size())];
  const double a = scale_product(lx, ly, adm.effective_beta());
  const double hi = std::ldexp(1.0, dyadic_level(a) + (is_dyadic_value(a) ? 0 : 1));  // smallest 2^e >= a
  const double lo = hi / 2 < a ? hi / 2 : hi / 4;                                      // largest 2^e < a

  const int len = n >> lx;
  const int p = static_cast<int>(rng.below(static_cast<std::uint64_t>(1) << lx));
  const int y = static_cast<int>(rng.below(n));
  const double base = std::max(1.0, 2.0 * hi);
  std::vector<double> values(static_cast<std::size_t>(n) * n, base);
  for (int x = p * len; x < (p + 1) * len; ++x)
    values[static_cast<std::size_t>(x) * n + y] = x < p * len + len / 2 ? hi : lo;
  if (planted) *planted = {p * len, p * len + len / 2, y, lx, ly};
  auto field = LinearizerField::from_values(n_log2, std::move(values), RegularityKind::dyadic_of_lipschitz);
  field.spec.lipschitz = lipschitz;
  field.seed = seed;
  return field;
}

// ---------------------------------------------------------------- telescoping

std::vector<DyadicInterval> collection_J(const DyadicInterval& interval, int y, const LinearizerField& v) {
  const int nl = v.n_log2;
  const int lx = interval.level();
  if (lx < 0 || lx > nl) throw std::invalid_argument("collection_J: interval outside the grid");
  const int len = v.size() >> lx;
  const int lo = static_cast<int>(interval.n) * len;
  std::vector<DyadicInterval> out;
  for (int ly = 0; ly <= lx; ++ly) {
    const double a = scale_product(lx, ly, 1.0);
    bool any = false;
    for (int x = lo; x < lo + len && !any; ++x) any = a <= v(x, y);
    if (any) out.push_back(DyadicInterval::of_cell(y, ly, nl));
  }
  return out;
}

TelescopingReport telescoping_check(const LinearizerField& v, const SampledField& f, int depth) {
  if (f.n_log2() != v.n_log2) throw std::invalid_argument("telescoping_check: grid size mismatch");
  check_depth(depth, f.n_log2());
  const int n = v.size();
  const int nl = v.n_log2;
  const auto coeffs = haar_transform(f, depth);
  TelescopingReport rep;

  std::vector<cplx> g(n), prefix(n + 1);
  for (int lx = 0; lx < depth; ++lx) {
    const int len = n >> lx;
    for (int p = 0; p < (1 << lx); ++p) {
      const int lo = p * len;
      const DyadicInterval interval = DyadicInterval::at_level(lx, p);
      // g(y) = <h_I, f(., y)>_1 by direct summation over cells, then block
      // averaged to the Haar depth
      for (int y = 0; y < n; ++y) {
        cplx acc = 0.0;
        for (int x = lo; x < lo + len; ++x) acc += haar_at_cell(x, lx, nl) * f(x, y);
        g[y] = acc / static_cast<double>(n);
      }
      prefix[0] = 0.0;
      for (int y = 0; y < n; ++y) prefix[y + 1] = prefix[y] + g[y];
      auto average = [&](int y, int level) {
        const int w = n >> level;
        const int a = (y / w) * w;
        return (prefix[a + w] - prefix[a]) / static_cast<double>(w);
      };

      for (int y = 0; y < n; ++y) {
        const auto coll = collection_J(interval, y, v);
        std::vector<int> levels;
        for (const auto& j : coll) levels.push_back(j.level());
        for (std::size_t t = 1; t < levels.size(); ++t)
          if (levels[t] != levels[t - 1] + 1) rep.convex = false;
        for (int x = lo; x < lo + len && rep.x_independent; ++x) {
          std::vector<int> own;
          for (int ly = 0; ly <= lx; ++ly)
            if (scale_product(lx, ly, 1.0) <= v(x, y)) own.push_back(ly);
          if (own != levels) rep.x_independent = false;
        }
        // sum over the resolved part of the collection vs E_{b+1} g - E_a g
        cplx sum = 0.0;
        int first = -1, last = -1;
        for (int ly : levels) {
          if (ly >= depth) continue;
          const int sy = (1 << ly) + (y >> (nl - ly));
          sum += coeffs.at(HaarCoefficients::slot(interval), sy) * haar_at_cell(y, ly, nl);
          if (first < 0) first = ly;
          last = ly;
        }
        const cplx diff = first < 0 ? cplx{} : average(y, last + 1) - average(y, first);
        rep.max_identity_error = std::max(rep.max_identity_error, std::abs(sum - diff));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------- martingales

SampledField martingale_average(const SampledField& f, int level, Axis axis) {
  const int n = f.size();
  if (level < 0 || level > f.n_log2()) throw std::invalid_argument("martingale_average: level out of range");
  const int w = n >> level;
  SampledField out(f.n_log2());
  for (int i = 0; i < n; ++i) {
    for (int b = 0; b < n; b += w) {
      cplx acc = 0.0;
      for (int t = b; t < b + w; ++t) acc += axis == Axis::second ? f(i, t) : f(t, i);
      acc /= static_cast<double>(w);
      for (int t = b; t < b + w; ++t) (axis == Axis::second ? out(i, t) : out(t, i)) = acc;
    }
  }
  return out;
}

SampledField dyadic_maximal_m2(const SampledField& f) {
  const int n = f.size();
  SampledField out(f.n_log2());
  std::vector<double> prefix(n + 1);
  for (int i = 0; i < n; ++i) {
    prefix[0] = 0.0;
    for (int j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + std::abs(f(i, j));
    for (int j = 0; j < n; ++j) {
      double best = 0.0;
      for (int level = 0; level <= f.n_log2(); ++level) {
        const int w = n >> level;
        const int a = (j / w) * w;
        best = std::max(best, (prefix[a + w] - prefix[a]) / w);
      }
      out(i, j) = best;
    }
  }
  return out;
}

SampledField dyadic_square_function(const SampledField& f, Axis axis) {
  SampledField out(f.n_log2());
  auto prev = martingale_average(f, 0, axis);
  std::vector<double> acc(f.count(), 0.0);
  for (int level = 1; level <= f.n_log2(); ++level) {
    auto cur = martingale_average(f, level, axis);
    const auto a = cur.samples();
    const auto b = prev.samples();
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += std::norm(a[k] - b[k]);
    prev = std::move(cur);
  }
  auto o = out.samples();
  for (std::size_t k = 0; k < acc.size(); ++k) o[k] = std::sqrt(acc[k]);
  return out;
}

} // namespace hxc
