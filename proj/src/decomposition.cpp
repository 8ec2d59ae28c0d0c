#include "hxc/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "hxc/rng.hpp"

namespace hxc {

// ---------------------------------------------------------------- ladders

double ScaleLadder::scale(int k) const { return std::exp2(k * log2_ratio); }

namespace {

double ladder_theta(const ScaleLadder& s, double u) {
  if (s.sharp) return u >= s.offset ? 1.0 : 0.0;
  return smoothstep5(u - s.offset);
}

double ladder_coordinate(const ScaleLadder& s, double w) { return std::log2(std::abs(w)) / s.log2_ratio; }

// Both Theta evaluations subtract an integer from the same coordinate, so
// neighbouring ladder terms cancel exactly and the sum telescopes to 1.
double ladder_profile_at(const ScaleLadder& s, double coord, int k) {
  return (ladder_theta(s, coord - k) - ladder_theta(s, coord - (k + s.period))) / s.period;
}

ScaleLadder make_ladder(double log2_ratio, int period, double offset, bool sharp, int n_log2) {
  ScaleLadder s;
  s.log2_ratio = log2_ratio;
  s.period = period;
  s.offset = offset;
  s.sharp = sharp;
  const double top = (n_log2 - 1) / log2_ratio;  // coordinate of N/2
  s.k_min = static_cast<int>(std::floor(-offset - period - 1));
  s.k_max = static_cast<int>(std::ceil(top - offset));
  return s;
}

} // namespace

double ScaleLadder::profile(double w, int k) const {
  if (w == 0.0) return 0.0;
  return ladder_profile_at(*this, ladder_coordinate(*this, w), k);
}

std::vector<ScaleLadder::Entry> ScaleLadder::nonzero(double w) const {
  std::vector<Entry> out;
  if (w == 0.0) return out;
  const double c = ladder_coordinate(*this, w);
  const int lo = std::max(k_min, static_cast<int>(std::floor(c - offset - period - 1)));
  const int hi = std::min(k_max, static_cast<int>(std::ceil(c - offset)));
  for (int k = lo; k <= hi; ++k) {
    const double v = ladder_profile_at(*this, c, k);
    if (v != 0.0) out.push_back({k, v});
  }
  return out;
}

std::string to_string(LadderKind k) { return k == LadderKind::dyadic ? "dyadic" : "quarter"; }

LadderKind ladder_from_string(const std::string& s) {
  if (s == "dyadic") return LadderKind::dyadic;
  if (s == "quarter") return LadderKind::quarter;
  throw std::invalid_argument("unknown ladder kind '" + s + "'");
}

// ---------------------------------------------------------------- family

namespace {

double bump_b(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

double bump_b2(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double q = 1.0 - u * u;
  const double g1 = -2.0 * u / (q * q);
  const double g2 = -2.0 / (q * q) - 8.0 * u * u / (q * q * q);
  return bump_b(u) * (g1 * g1 + g2);
}

// int_{-1}^{1} b(u) cos(2 pi nu u) du; b is flat at the endpoints, so the
// trapezoid rule converges faster than any power of the step.
double bump_cosine_transform(double nu) {
  constexpr int kSteps = 4096;
  const double h = 2.0 / kSteps;
  double acc = 0.0;
  for (int i = 1; i < kSteps; ++i) {
    const double u = -1.0 + i * h;
    acc += bump_b(u) * std::cos(2.0 * std::numbers::pi * nu * u);
  }
  return acc * h;
}

} // namespace

LPFamily::LPFamily(double beta, int n_log2, LadderKind kind)
    : beta_(beta), n_log2_(n_log2), kind_(kind), radius_(1.0 / 48.0), norm_(1.0) {
  if (!std::isfinite(beta)) throw std::invalid_argument("make_lp_family: beta must be finite");
  if (n_log2 < 4) throw std::invalid_argument("make_lp_family: the grid must have N >= 16 to host the annuli");
  grid_size(n_log2);

  t_ = kind == LadderKind::dyadic ? make_ladder(1.0, 1, 0.0, true, n_log2) : make_ladder(0.25, 3, 0.0, false, n_log2);
  if (beta == 0.0) {
    s_ = t_;
  } else {
    const double ab = std::abs(beta);
    s_ = make_ladder(ab <= 1.0 ? 1.0 : 1.0 / ab, 1, -1.0, false, n_log2);
  }

  const double rho = radius_;
  norm_ = 1.0 / (rho * std::pow(2.0 * std::numbers::pi * rho, 2) * bump_cosine_transform(rho));

  const int half = size() / 2;
  s_table_.resize(static_cast<std::size_t>(half) + 1);
  t_table_.resize(static_cast<std::size_t>(half) + 1);
  for (int w = 1; w <= half; ++w) {
    for (const auto& e : s_.nonzero(w)) s_table_[w].push_back({e.k, e.value, 1.0});
    for (const auto& e : t_.nonzero(w)) {
      const double psi = psi2_hat(w / t_.scale(e.k));
      if (psi == 0.0) throw std::logic_error("make_lp_family: psi2_hat vanishes inside the annulus");
      t_table_[w].push_back({e.k, e.value / psi, psi});
    }
  }
}

double LPFamily::psi2_hat(double omega) const {
  const double x = 2.0 * std::numbers::pi * omega * radius_;
  return norm_ * radius_ * x * x * bump_cosine_transform(omega * radius_);
}

double LPFamily::phi2_hat(double eta, int l) const {
  const double p = product_hat(eta, l);
  if (p == 0.0) return 0.0;
  return p / psi2_hat(std::abs(eta) / t_.scale(l));
}

double LPFamily::psi2(double y) const { return -norm_ * bump_b2(y / radius_); }

std::vector<double> LPFamily::psi2_samples() const {
  const int n = size();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int signed_j = j <= n / 2 ? j : j - n;
    out[j] = psi2(static_cast<double>(signed_j) / n);
  }
  return out;
}

LPFamily make_lp_family(double beta, int n_log2, LadderKind kind) { return LPFamily(beta, n_log2, kind); }

// ---------------------------------------------------------------- projections

SymbolGrid lp_symbol(const LPFamily& fam, LPKind kind, int scale) {
  const auto& ladder = kind == LPKind::phi1 ? fam.s_ladder() : fam.t_ladder();
  if (!ladder.contains(scale))
    throw std::out_of_range("project: scale index " + std::to_string(scale) + " is outside the ladder [" +
                            std::to_string(ladder.k_min) + ", " + std::to_string(ladder.k_max) + "]");
  return SymbolGrid::from_function(fam.n_log2(), [&](int xi, int eta) {
    switch (kind) {
    case LPKind::phi1: return fam.phi1_hat(xi, scale);
    case LPKind::phi2: return fam.phi2_hat(eta, scale);
    case LPKind::psi2: return eta == 0 ? 0.0 : fam.psi2_hat(std::abs(eta) / ladder.scale(scale));
    }
    return 0.0;
  });
}

SampledField project(const SampledField& f, const LPFamily& fam, LPKind kind, int scale) {
  if (f.n_log2() != fam.n_log2()) throw std::invalid_argument("project: grid size mismatch");
  return apply_fixed_multiplier(f, lp_symbol(fam, kind, scale));
}

namespace {

// Visits every grid frequency with its two ladder entry lists.
template <class F>
void for_each_frequency(const LPFamily& fam, F&& fn) {
  const int n = fam.size();
  for (int kx = 0; kx < n; ++kx) {
    const int xi = frequency_of_index(kx, n);
    const auto& se = fam.s_entries(std::abs(xi));
    for (int ky = 0; ky < n; ++ky) {
      const int eta = frequency_of_index(ky, n);
      fn(static_cast<std::size_t>(kx) * n + ky, xi, eta, se, fam.t_entries(std::abs(eta)));
    }
  }
}

} // namespace

SampledField resolved_part(const SampledField& f) {
  const auto mask = SymbolGrid::from_function(f.n_log2(), [](int xi, int eta) { return xi != 0 && eta != 0 ? 1.0 : 0.0; });
  return apply_fixed_multiplier(f, mask);
}

SymbolGrid calderon_symbol(const LPFamily& fam) {
  SymbolGrid out(fam.n_log2());
  auto v = out.values();
  for_each_frequency(fam, [&](std::size_t k, int, int, const auto& se, const auto& te) {
    double acc = 0.0;
    for (const auto& a : se)
      for (const auto& b : te) acc += a.phi * b.phi * b.psi;
    v[k] = acc;
  });
  return out;
}

double calderon_residual(const SampledField& f, const LPFamily& fam) {
  if (f.n_log2() != fam.n_log2()) throw std::invalid_argument("calderon_residual: grid size mismatch");
  const double norm = lp_norm(f, 2.0);
  if (norm == 0.0) return 0.0;
  auto g = apply_fixed_multiplier(f, calderon_symbol(fam));
  g -= f;
  return lp_norm(g, 2.0) / norm;
}

bool principal_pair(const LPFamily& fam, int k, int l, int j) {
  return fam.t_ladder().log2_scale(l) + (j + 3) + fam.beta() * fam.s_ladder().log2_scale(k) < 0.0;
}

namespace {

struct LevelSymbols {
  std::vector<double> principal;
  std::vector<double> remainder;
};

LevelSymbols level_symbols(const LPFamily& fam, int j) {
  const std::size_t n2 = static_cast<std::size_t>(fam.size()) * fam.size();
  LevelSymbols out{std::vector<double>(n2, 0.0), std::vector<double>(n2, 0.0)};
  for_each_frequency(fam, [&](std::size_t k, int, int, const auto& se, const auto& te) {
    double p = 0.0, r = 0.0;
    for (const auto& a : se)
      for (const auto& b : te) {
        const double w = a.phi * b.phi * b.psi;
        if (principal_pair(fam, a.k, b.k, j))
          p += w;
        else
          r += w;
      }
    out.principal[k] = p;
    out.remainder[k] = r;
  });
  return out;
}

double plateau_of(const MultiplierProfile& m) {
  const double r = m.plateau_radius();
  if (!(r > 0.0)) throw std::invalid_argument("decomposition: the profile needs m = 1 on some [0, r], r > 0");
  return r;
}

SymbolGrid scaled_argument(const LPFamily& fam) {
  return hyperbolic_argument(fam.beta(), fam.n_log2(), Orientation::second_scaled);
}

void check_inputs(const SampledField& f, const LinearizerField& v, const LPFamily& fam, const char* what) {
  if (f.n_log2() != fam.n_log2() || v.n_log2 != fam.n_log2())
    throw std::invalid_argument(std::string(what) + ": grid size mismatch");
}

std::vector<int> occupied_levels(const LinearizerField& v, const MultiplierProfile& m) {
  std::vector<int> levels;
  for (double x : v.values)
    if (x > 0.0) levels.push_back(decomposition_level(x, m));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

// V replaced by r 2^j on Omega_j (zero stays zero).
LinearizerField level_representative(const LinearizerField& v, const MultiplierProfile& m) {
  const double r = plateau_of(m);
  auto q = v;
  for (auto& x : q.values)
    if (x > 0.0) x = r * std::ldexp(1.0, decomposition_level(x, m));
  q.internal.clear();
  return q;
}

using LevelCache = std::map<int, LevelSymbols>;

std::shared_ptr<const LevelCache> build_cache(const LPFamily& fam, const std::vector<int>& levels) {
  auto cache = std::make_shared<LevelCache>();
  for (int j : levels) cache->emplace(j, level_symbols(fam, j));
  return cache;
}

SymbolFamily principal_family(const LPFamily& fam, const MultiplierProfile& m,
                              std::shared_ptr<const LevelCache> cache) {
  auto calderon = calderon_symbol(fam);
  std::vector<double> full(calderon.values().begin(), calderon.values().end());
  SymbolGrid zeros(fam.n_log2());
  auto value = [m, cache, full = std::move(full)](double lambda, std::size_t k) {
    if (lambda == 0.0) return full[k];
    return cache->at(decomposition_level(lambda, m)).principal[k];
  };
  return SymbolFamily{std::move(zeros), std::numeric_limits<double>::infinity(), std::move(value)};
}

SymbolFamily error_family(const LPFamily& fam, const MultiplierProfile& m, std::shared_ptr<const LevelCache> cache) {
  auto argument = scaled_argument(fam);
  std::vector<double> a(argument.values().begin(), argument.values().end());
  auto value = [m, cache, a = std::move(a)](double lambda, std::size_t k) {
    if (lambda == 0.0) return 0.0;
    const double w = m(lambda * a[k]);
    if (w == 0.0) return 0.0;
    return w * cache->at(decomposition_level(lambda, m)).remainder[k];
  };
  return SymbolFamily{std::move(argument), m.support_radius(), std::move(value)};
}

} // namespace

SymbolGrid principal_symbol(const LPFamily& fam, int j) {
  return SymbolGrid(fam.n_log2(), level_symbols(fam, j).principal);
}

SymbolGrid remainder_symbol(const LPFamily& fam, int j) {
  return SymbolGrid(fam.n_log2(), level_symbols(fam, j).remainder);
}

int decomposition_level(double lambda, const MultiplierProfile& m) {
  return dyadic_level(lambda / plateau_of(m));
}

SymbolGrid error_symbol(const LPFamily& fam, const MultiplierProfile& m, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("error_symbol: lambda must be positive and finite");
  const auto rem = level_symbols(fam, decomposition_level(lambda, m)).remainder;
  auto out = scaled_argument(fam);
  auto v = out.values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = v[k] < 0.0 ? 0.0 : m(lambda * v[k]) * rem[k];
  return out;
}

SymbolGrid base_error_symbol(const LPFamily& fam, const MultiplierProfile& m, int j) {
  return error_symbol(fam, m, plateau_of(m) * std::ldexp(1.0, j));
}

// ---------------------------------------------------------------- terms

SampledField principal_term(const SampledField& f, const LinearizerField& v, const LPFamily& fam,
                            const MultiplierProfile& m, Exec exec) {
  check_inputs(f, v, fam, "principal_term");
  auto cache = build_cache(fam, occupied_levels(v, m));
  return apply_symbol_family(f, level_representative(v, m), principal_family(fam, m, cache), exec);
}

SampledField error_term(const SampledField& f, const LinearizerField& v, const LPFamily& fam,
                        const MultiplierProfile& m, Exec exec) {
  check_inputs(f, v, fam, "error_term");
  auto cache = build_cache(fam, occupied_levels(v, m));
  return apply_symbol_family(f, v, error_family(fam, m, cache), exec);
}

SampledField large_variation_term(const SampledField& f, const LinearizerField& v, const LPFamily& fam,
                                  const MultiplierProfile& m, Exec exec) {
  check_inputs(f, v, fam, "large_variation_term");
  auto cache = build_cache(fam, occupied_levels(v, m));
  return apply_symbol_family(f, level_representative(v, m), error_family(fam, m, cache), exec);
}

DecompositionTerms decompose(const SampledField& f, const LinearizerField& v, const LPFamily& fam,
                             const MultiplierProfile& m, Exec exec) {
  check_inputs(f, v, fam, "decompose");
  DecompositionTerms out{SampledField(f.n_log2()), SampledField(f.n_log2()), SampledField(f.n_log2()),
                         SampledField(f.n_log2()), SampledField(f.n_log2()), {}, {}};
  out.levels = occupied_levels(v, m);
  auto cache = build_cache(fam, out.levels);
  for (int j : out.levels) {
    const auto& p = cache->at(j).principal;
    if (std::all_of(p.begin(), p.end(), [](double x) { return x == 0.0; }))
      out.notes.push_back("level " + std::to_string(j) + ": no ladder pair is principal on this grid");
  }
  const auto rep = level_representative(v, m);
  out.direct = apply_linearized_bucketed(f, v, m, fam.beta(), Quantize::exact, Orientation::second_scaled, false, exec);
  out.principal = apply_symbol_family(f, rep, principal_family(fam, m, cache), exec);
  const auto ef = error_family(fam, m, cache);
  out.error = apply_symbol_family(f, v, ef, exec);
  out.large_variation = apply_symbol_family(f, rep, ef, exec);
  out.small_variation = out.error;
  out.small_variation -= out.large_variation;
  return out;
}

SampledField large_variation_error(const SampledField& f, int j, const LPFamily& fam, const MultiplierProfile& m) {
  if (f.n_log2() != fam.n_log2()) throw std::invalid_argument("large_variation_error: grid size mismatch");
  return apply_fixed_multiplier(f, base_error_symbol(fam, m, j));
}

SampledField small_variation_error(const SampledField& f, const LinearizerField& v, const LPFamily& fam,
                                   const MultiplierProfile& m, int nodes_per_octave) {
  check_inputs(f, v, fam, "small_variation_error");
  if (nodes_per_octave < 1) throw std::invalid_argument("small_variation_error: need at least one interval");
  const double r = plateau_of(m);
  const auto argument = scaled_argument(fam);
  const auto av = argument.values();
  const auto spec = forward_transform(f);

  SampledField out(f.n_log2());
  auto ov = out.samples();
  for (int j : occupied_levels(v, m)) {
    std::vector<std::size_t> points;
    for (std::size_t p = 0; p < v.values.size(); ++p)
      if (v.values[p] > 0.0 && decomposition_level(v.values[p], m) == j) points.push_back(p);
    const auto rem = level_symbols(fam, j).remainder;
    std::vector<double> acc(points.size(), 0.0);
    std::vector<double> prev(points.size(), 0.0);
    double prev_tau = 0.0;
    for (int node = 0; node <= nodes_per_octave; ++node) {
      const double tau = r * std::exp2(j + static_cast<double>(node) / nodes_per_octave);
      const double h = tau * 0x1.0p-7;
      SymbolGrid d(fam.n_log2());
      auto dv = d.values();
      for (std::size_t k = 0; k < dv.size(); ++k) {
        if (av[k] < 0.0 || rem[k] == 0.0) continue;
        const double a = av[k];
        const double coarse = (m((tau + h) * a) - m((tau - h) * a)) / (2.0 * h);
        const double fine = (m((tau + h / 2) * a) - m((tau - h / 2) * a)) / h;
        dv[k] = rem[k] * (4.0 * fine - coarse) / 3.0;
      }
      SpectralField s = spec;
      multiply_spectrum(s, d);
      const auto g = inverse_transform(s);
      const auto gv = g.samples();
      for (std::size_t q = 0; q < points.size(); ++q) {
        const double here = std::abs(gv[points[q]]);
        if (node > 0) acc[q] += 0.5 * (tau - prev_tau) * (here + prev[q]);
        prev[q] = here;
      }
      prev_tau = tau;
    }
    for (std::size_t q = 0; q < points.size(); ++q) ov[points[q]] = acc[q];
  }
  return out;
}

// ---------------------------------------------------------------- support and overlap

std::uint64_t error_support_violations(const LPFamily& fam, const MultiplierProfile& m, int j) {
  const auto e = base_error_symbol(fam, m, j);
  const auto a = scaled_argument(fam);
  const auto ev = e.values();
  const auto av = a.values();
  const double lo = std::ldexp(1.0, -j - 5), hi = std::ldexp(1.0, -j + 4);
  std::uint64_t bad = 0;
  for (std::size_t k = 0; k < ev.size(); ++k)
    if (ev[k] != 0.0 && (av[k] < lo || av[k] > hi)) ++bad;
  return bad;
}

int overlap_count(const LPFamily& fam, const MultiplierProfile& m, int j_lo, int j_hi) {
  if (j_hi < j_lo) return 0;
  const auto a = scaled_argument(fam);
  double a_min = std::numeric_limits<double>::infinity(), a_max = 0.0;
  for (double x : a.values())
    if (x > 0.0) {
      a_min = std::min(a_min, x);
      a_max = std::max(a_max, x);
    }
  if (a_max == 0.0) return 0;
  // E_(2^j) needs 2^(-j-4) < a < (support / plateau) 2^-j for some grid value a
  const double widen = std::log2(m.support_radius() / plateau_of(m));
  const int lo = std::max(j_lo, static_cast<int>(std::floor(-std::log2(a_max))) - 5);
  const int hi = std::min(j_hi, static_cast<int>(std::ceil(-std::log2(a_min) + widen)) + 1);
  std::vector<int> count(a.values().size(), 0);
  for (int j = lo; j <= hi; ++j) {
    const auto e = base_error_symbol(fam, m, j);
    const auto ev = e.values();
    for (std::size_t k = 0; k < ev.size(); ++k)
      if (ev[k] != 0.0) ++count[k];
  }
  return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

RegimeReport regime_check(const LPFamily& fam, const MultiplierProfile& m, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("regime_check: lambda must be positive and finite");
  const double r = plateau_of(m);
  const double beta = fam.beta();
  RegimeReport rep;
  const int half = fam.size() / 2;
  for (int xi = 1; xi <= half; ++xi) {
    for (int eta = 1; eta <= half; ++eta) {
      const double a = (beta == 0.0 ? 1.0 : std::pow(static_cast<double>(xi), beta)) * eta;
      const double weight = m(r * lambda * a);
      for (const auto& se : fam.s_entries(xi)) {
        const double sb = std::exp2(beta * fam.s_ladder().log2_scale(se.k));
        for (const auto& te : fam.t_entries(eta)) {
          const double t = fam.t_ladder().scale(te.k);
          if (4.0 * sb * t <= 1.0 / lambda) {
            ++rep.unit_checked;
            if (weight != 1.0) ++rep.unit_violations;
          }
          if (t > 4.0 / (lambda * sb)) {
            ++rep.vanishing_checked;
            if (weight != 0.0) ++rep.vanishing_violations;
          }
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------- ratio inequality

RatioReport lipschitz_ratio_check(const LinearizerField& v, const LPFamily& fam, double lipschitz,
                                  RatioVariant variant, std::size_t triples, std::uint64_t seed) {
  if (v.n_log2 != fam.n_log2()) throw std::invalid_argument("lipschitz_ratio_check: grid size mismatch");
  if (!(lipschitz > 0.0)) throw std::invalid_argument("lipschitz_ratio_check: L must be positive");
  if (variant == RatioVariant::cone && fam.beta() != 1.0)
    throw std::invalid_argument("lipschitz_ratio_check: the cone variant needs beta = 1");
  const int n = v.size();
  const double rho = fam.psi2_radius();
  Rng rng(seed);
  RatioReport rep;
  for (std::size_t s = 0; s < triples; ++s) {
    const int x = static_cast<int>(rng.below(n));
    const int z = static_cast<int>(rng.below(n));
    ++rep.triples;
    const double vz = v(x, z);
    if (!(vz > 0.0)) continue;
    // |y - z| < rho / t, and the (s, t) regime bounds 1/t:
    //   band: 1/t <= v s^beta <= 2 v / L   (band |xi|^beta <= 1/L)
    //   cone:  1/t <= 2 / sqrt(t s) <= 2 sqrt(v)   (s <= 4t)
    const double vt = dyadic_round_up(vz);
    const double reach = variant == RatioVariant::band ? 2.0 * rho * vt / lipschitz : 2.0 * rho * std::sqrt(vt);
    const long long kmax =
        std::min<long long>(n / 2, static_cast<long long>(std::ceil(reach * n)) - 1);  // k / N < reach
    const long long off = kmax > 0 ? rng.between(-kmax, kmax) : 0;
    const int y = static_cast<int>(((z + off) % n + n) % n);
    ++rep.relevant;
    const double vy = v(x, y);
    const double hi = std::max(vy, vz), lo = std::min(vy, vz);
    const double ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.witness = {x, y, z};
    }
    if (ratio > 1.5 * (1.0 + 1e-12)) ++rep.violations;
  }
  return rep;
}

namespace {

// Largest power of two <= b.
double pow2_floor(double b) { return std::ldexp(1.0, dyadic_level(b)); }

} // namespace

std::vector<bool> f1_mask(const LinearizerField& v) {
  std::vector<bool> out(v.values.size(), false);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double x = v.values[k];
    out[k] = x > 0.0 && pow2_floor(1.5 * x) > x;
  }
  return out;
}

std::vector<bool> f2_mask(const LinearizerField& v) {
  std::vector<bool> out(v.values.size(), false);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double x = v.values[k];
    out[k] = x > 0.0 && pow2_floor(x) >= 2.0 * x / 3.0;
  }
  return out;
}

int variation_sign(double v_xz, double v_xy) {
  const double a = dyadic_round_up(v_xz), b = dyadic_round_up(v_xy);
  if (2.0 * a == b) return 1;
  if (a == 2.0 * b) return -1;
  return 0;
}

// ---------------------------------------------------------------- diagnostics

SampledField hl_maximal_m1(const SampledField& f) {
  const int n = f.size();
  std::vector<int> widths;
  for (int w = 1; w < n / 2; w *= 2) widths.push_back(w);
  SampledField out(f.n_log2());
  std::vector<double> prefix(3 * static_cast<std::size_t>(n) + 1);
  for (int j = 0; j < n; ++j) {
    prefix[0] = 0.0;
    for (int t = 0; t < 3 * n; ++t) prefix[t + 1] = prefix[t] + std::abs(f(t % n, j));
    const double full = (prefix[n] - prefix[0]) / n;
    for (int i = 0; i < n; ++i) {
      double best = std::max(full, std::abs(f(i, j)));  // half-width 0 taken exactly
      for (int w : widths) {
        const double sum = prefix[n + i + w + 1] - prefix[n + i - w];
        best = std::max(best, sum / (2 * w + 1));
      }
      out(i, j) = best;
    }
  }
  return out;
}

SampledField continuous_square_function(const SampledField& f, const LPFamily& fam, LPKind kind) {
  if (f.n_log2() != fam.n_log2()) throw std::invalid_argument("continuous_square_function: grid size mismatch");
  const auto& ladder = kind == LPKind::phi1 ? fam.s_ladder() : fam.t_ladder();
  std::vector<double> acc(f.count(), 0.0);
  for (int k = ladder.k_min; k <= ladder.k_max; ++k) {
    const auto g = project(f, fam, kind, k);
    const auto gv = g.samples();
    for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += std::norm(gv[p]);
  }
  SampledField out(f.n_log2());
  auto ov = out.samples();
  for (std::size_t p = 0; p < acc.size(); ++p) ov[p] = std::sqrt(acc[p]);
  return out;
}

double square_function_constant(const LPFamily& fam, LPKind kind) {
  const auto& ladder = kind == LPKind::phi1 ? fam.s_ladder() : fam.t_ladder();
  std::vector<double> acc(static_cast<std::size_t>(fam.size()) * fam.size(), 0.0);
  for (int k = ladder.k_min; k <= ladder.k_max; ++k) {
    const auto s = lp_symbol(fam, kind, k);
    const auto sv = s.values();
    for (std::size_t p = 0; p < acc.size(); ++p) acc[p] += sv[p] * sv[p];
  }
  return std::sqrt(*std::max_element(acc.begin(), acc.end()));
}

double first_variable_kernel_constant(const MultiplierProfile& m, std::span<const double> lambdas, int n_log2) {
  const int n = grid_size(n_log2);
  std::vector<double> distinct(lambdas.begin(), lambdas.end());
  for (double l : distinct)
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("kernel constant: lambda must be >= 0");
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> cosine(n);
  for (int t = 0; t < n; ++t) cosine[t] = std::cos(2.0 * std::numbers::pi * t / n);
  std::vector<int> widths;
  for (int w = 1; w < n / 2; w *= 2) widths.push_back(w);
  const int half = n / 2;

  std::vector<double> constants(distinct.size(), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t q = 0; q < distinct.size(); ++q) {
    const double lambda = distinct[q];
    std::vector<double> sym(n);
    for (int xi = -half; xi < half; ++xi) sym[xi + half] = m(lambda * std::abs(xi));
    // weight of |x - x'| = d in the normalized convolution, d = 0 .. N/2
    std::vector<double> w(half + 1);
    for (int d = 0; d <= half; ++d) {
      double acc = 0.0;
      for (int xi = -half; xi < half; ++xi) {
        const long long phase = ((static_cast<long long>(xi) * d) % n + n) % n;
        acc += sym[xi + half] * cosine[static_cast<std::size_t>(phase)];
      }
      w[d] = std::abs(acc) / n;
    }
    // decreasing majorant
    for (int d = half - 1; d >= 0; --d) w[d] = std::max(w[d], w[d + 1]);
    // step heights on shells {0}, (0,1], (1,2], (2,4], ..., (W_last, N/2]
    std::vector<double> heights;
    std::vector<double> counts;
    int prev = -1;
    for (int width : widths) {
      heights.push_back(w[prev + 1]);
      counts.push_back(2.0 * width + 1.0);
      prev = width;
    }
    heights.push_back(prev + 1 <= half ? w[prev + 1] : 0.0);
    counts.push_back(n);
    double c = 0.0;
    for (std::size_t s = 0; s < heights.size(); ++s) {
      const double next = s + 1 < heights.size() ? heights[s + 1] : 0.0;
      c += (heights[s] - next) * counts[s];
    }
    constants[q] = c;
  }
  return constants.empty() ? 0.0 : *std::max_element(constants.begin(), constants.end());
}

} // namespace hxc
