#include "hxc/multiplier.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hxc {

namespace {

// S(x) = x^6 (462 - 1980x + 3465x^2 - 3080x^3 + 1386x^4 - 252x^5)
constexpr std::array<double, 6> kSmoothstepTail{462.0, -1980.0, 3465.0, -3080.0, 1386.0, -252.0};

bool is_dyadic_unit(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) return false;
  int e = 0;
  const double mant = std::frexp(eps, &e);
  return mant == 0.5;
}

} // namespace

namespace {

double smoothstep5_lower(double x) {
  double poly = 0.0;
  for (int k = 5; k >= 0; --k) poly = poly * x + kSmoothstepTail[k];
  const double x2 = x * x;
  return x2 * x2 * x2 * poly;
}

} // namespace

double smoothstep5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // S(x) = 1 - S(1 - x); the upper half is evaluated through the flat end so
  // the result never leaves [0, 1].
  return x <= 0.5 ? smoothstep5_lower(x) : 1.0 - smoothstep5_lower(1.0 - x);
}

double smoothstep5_integral(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return x - 0.5;
  // sum c_k x^(k+7) / (k+7)
  double poly = 0.0;
  for (int k = 5; k >= 0; --k) poly = poly * x + kSmoothstepTail[k] / (k + 7);
  const double x2 = x * x;
  return x2 * x2 * x2 * x * poly;
}

// ---------------------------------------------------------------- profiles

MultiplierProfile MultiplierProfile::bump(double epsilon) {
  if (!is_dyadic_unit(epsilon))
    throw std::invalid_argument("bump profile: epsilon must be 2^-i with i >= 0, got " + std::to_string(epsilon));
  MultiplierProfile m;
  m.kind_ = ProfileKind::bump;
  m.epsilon_ = epsilon;
  m.inner_ = epsilon;
  m.outer_ = 2.0 * epsilon;
  m.name_ = "bump";
  return m;
}

MultiplierProfile MultiplierProfile::plateau(double inner, double outer) {
  if (!(inner >= 0.0) || !(outer > inner) || !std::isfinite(outer))
    throw std::invalid_argument("plateau profile: need 0 <= inner < outer < inf");
  MultiplierProfile m;
  m.kind_ = ProfileKind::plateau;
  m.inner_ = inner;
  m.outer_ = outer;
  m.name_ = "plateau";
  return m;
}

MultiplierProfile MultiplierProfile::custom(std::string name, std::function<double(double)> fn,
                                            double support_radius) {
  if (!(support_radius > 0.0) || !std::isfinite(support_radius))
    throw std::invalid_argument("custom profile: support radius must be positive and finite");
  MultiplierProfile m;
  m.kind_ = ProfileKind::custom;
  m.outer_ = support_radius;
  m.name_ = std::move(name);
  m.custom_ = std::make_shared<const std::function<double(double)>>(std::move(fn));
  return m;
}

MultiplierProfile MultiplierProfile::dilated(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("dilated: factor must be positive");
  if (kind_ == ProfileKind::custom) {
    auto base = *this;
    return custom(name_ + "_dilated", [base, c](double u) { return base(u / c); }, outer_ * c);
  }
  MultiplierProfile m = *this;
  m.inner_ *= c;
  m.outer_ *= c;
  if (kind_ == ProfileKind::bump) {
    if (is_dyadic_unit(epsilon_ * c)) {
      m.epsilon_ = epsilon_ * c;
    } else {
      m.kind_ = ProfileKind::plateau;
      m.name_ = "plateau";
      m.epsilon_ = 1.0;
    }
  }
  return m;
}

MultiplierProfile make_bump_profile(double epsilon) { return MultiplierProfile::bump(epsilon); }

// ---------------------------------------------------------------- smoothness constant

SmoothnessConstant smoothness_terms(const MultiplierProfile& m) {
  const double radius = m.support_radius();
  const double lo = -2.0 * radius;
  const double span = 4.0 * radius;
  // h = 2^-10 R balances truncation (h^2 m^(5)) against rounding (eps / h^3)
  // for the third difference.
  const double h = std::ldexp(radius, -10);
  constexpr int kPoints = 1 << 17;
  SmoothnessConstant out;
  for (int k = 0; k <= kPoints; ++k) {
    const double t = lo + span * static_cast<double>(k) / kPoints;
    const double f0 = m(t);
    const double fp1 = m(t + h), fm1 = m(t - h);
    const double fp2 = m(t + 2 * h), fm2 = m(t - 2 * h);
    if (!std::isfinite(f0) || !std::isfinite(fp1) || !std::isfinite(fm1) || !std::isfinite(fp2) ||
        !std::isfinite(fm2))
      throw std::domain_error("smoothness_constant: profile is not finite at t = " + std::to_string(t));
    const double d1 = (fp1 - fm1) / (2 * h);
    const double d2 = (fp1 - 2 * f0 + fm1) / (h * h);
    const double d3 = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h * h * h);
    const double at = std::abs(t);
    out.terms[0] = std::max(out.terms[0], std::abs(f0));
    out.terms[1] = std::max(out.terms[1], at * std::abs(d1));
    out.terms[2] = std::max(out.terms[2], at * at * std::abs(d2));
    out.terms[3] = std::max(out.terms[3], at * at * at * std::abs(d3));
  }
  out.total = out.terms[0] + out.terms[1] + out.terms[2] + out.terms[3];
  return out;
}

double smoothness_constant(const MultiplierProfile& m) { return smoothness_terms(m).total; }

// ---------------------------------------------------------------- layers

namespace {

// Convex C^6 smoothing of max(u, knot): equals max(u, knot) outside
// [knot - w/2, knot + w/2] and is monotone in both u and knot.
double soft_max(double u, double knot, double w) {
  return knot + w * smoothstep5_integral((u - knot) / w + 0.5);
}

} // namespace

LayerDecomposition layer_decomposition(const MultiplierProfile& m, int depth) {
  if (depth < 1) throw std::invalid_argument("layer_decomposition: depth must be positive");
  if (std::abs(m(0.0) - 1.0) > 1e-9) throw std::invalid_argument("layer_decomposition: requires m(0) = 1");
  if (m.support_radius() > 2.0) throw std::invalid_argument("layer_decomposition: support must lie in [-2, 2]");
  constexpr int kScan = 1 << 14;
  double prev = m(0.0);
  for (int k = 1; k <= kScan; ++k) {
    const double t = 2.0 * k / kScan;
    const double v = m(t);
    if (v < -1e-9) throw std::invalid_argument("layer_decomposition: m must be non-negative");
    if (v > prev + 1e-9)
      throw std::invalid_argument("layer_decomposition: m is not non-increasing near t = " + std::to_string(t));
    prev = v;
  }

  constexpr double kWindow = 1.0 / 16.0;
  auto capped = [m](int i) {
    const double knot = std::ldexp(1.0, -i);
    const double w = kWindow * knot;
    return [m, knot, w](double u) { return m(soft_max(u, knot, w)); };
  };

  LayerDecomposition out;
  out.window_factor = kWindow;
  out.depth = depth;
  const double radius = m.support_radius();
  for (int i = 1; i <= depth; ++i) {
    auto upper = capped(i);
    std::function<double(double)> fn;
    if (i == 1) {
      fn = upper;
    } else {
      auto lower = capped(i - 1);
      fn = [upper, lower](double u) { return upper(u) - lower(u); };
    }
    out.layers.push_back(MultiplierProfile::custom("layer" + std::to_string(i), std::move(fn), radius));
  }
  auto last = capped(depth);
  out.layers.push_back(
      MultiplierProfile::custom("layer_tail", [m, last](double u) { return m(u) - last(u); }, radius));
  return out;
}

// ---------------------------------------------------------------- symbols

SymbolGrid hyperbolic_argument(double beta, int n_log2, Orientation orient) {
  if (!std::isfinite(beta)) throw std::invalid_argument("hyperbolic_argument: beta must be finite");
  return SymbolGrid::from_function(n_log2, [beta, orient](int xi, int eta) {
    const double plain = std::abs(orient == Orientation::first_scaled ? xi : eta);
    const double scaled = std::abs(orient == Orientation::first_scaled ? eta : xi);
    double power;
    if (beta == 0.0) {
      power = 1.0;
    } else if (scaled == 0.0) {
      if (beta < 0.0) return -1.0;
      power = 0.0;
    } else {
      power = std::pow(scaled, beta);
    }
    return plain * power;
  });
}

SymbolGrid hyperbolic_symbol_from(double lambda, const MultiplierProfile& m, const SymbolGrid& argument) {
  if (!std::isfinite(lambda) || !(lambda > 0.0))
    throw std::invalid_argument("hyperbolic_symbol: lambda must be positive and finite");
  SymbolGrid out(argument.n_log2());
  const auto a = argument.values();
  auto v = out.values();
  for (std::size_t k = 0; k < a.size(); ++k) v[k] = a[k] < 0.0 ? 0.0 : m(lambda * a[k]);
  return out;
}

SymbolGrid hyperbolic_symbol(double lambda, double beta, const MultiplierProfile& m, int n_log2,
                             Orientation orient) {
  return hyperbolic_symbol_from(lambda, m, hyperbolic_argument(beta, n_log2, orient));
}

SymbolGrid pi_beta_mask(double beta, int n_log2) {
  return SymbolGrid::from_function(n_log2, [beta](int, int eta) {
    const int a = std::abs(eta);
    if (beta > 0.0) return a <= 1 ? 1.0 : 0.0;
    if (beta < 0.0) return a >= 1 ? 1.0 : 0.0;
    return 1.0;
  });
}

} // namespace hxc
