#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hxc/grid.hpp"

namespace hxc {

/// Generalized smoothstep of order 5 (degree 11): 0 for x <= 0, 1 for x >= 1,
/// with five vanishing derivatives at both ends.
double smoothstep5(double x);

/// Antiderivative of smoothstep5 with value 0 at x = 0; equals x - 1/2 for x >= 1.
double smoothstep5_integral(double x);

enum class ProfileKind { bump, plateau, custom };

/// Even, compactly supported one-variable profile m.
///
/// bump(eps):        1 on [0, eps], smoothstep fall to 0 on [eps, 2 eps].
/// plateau(a, b):    1 on [0, a], smoothstep fall to 0 on [a, b]; a may be 0.
/// custom:           arbitrary callable evaluated at |t|, zero beyond the radius.
class MultiplierProfile {
public:
  static MultiplierProfile bump(double epsilon);
  static MultiplierProfile plateau(double inner, double outer);
  static MultiplierProfile custom(std::string name, std::function<double(double)> fn, double support_radius);

  double operator()(double t) const {
    const double u = t < 0 ? -t : t;
    switch (kind_) {
    case ProfileKind::bump:
    case ProfileKind::plateau:
      if (u <= inner_) return 1.0;
      if (u >= outer_) return 0.0;
      return 1.0 - smoothstep5((u - inner_) / (outer_ - inner_));
    case ProfileKind::custom:
      break;
    }
    return u > outer_ ? 0.0 : (*custom_)(u);
  }

  ProfileKind kind() const { return kind_; }
  /// Dyadic epsilon for bumps; 1 for other kinds.
  double epsilon() const { return epsilon_; }
  double support_radius() const { return outer_; }
  /// Largest r with m = 1 on [0, r] known by construction (0 for custom profiles).
  double plateau_radius() const { return kind_ == ProfileKind::custom ? 0.0 : inner_; }
  const std::string& name() const { return name_; }

  /// Profile dilated so that the new profile is m(t / c); c > 0.
  MultiplierProfile dilated(double c) const;

private:
  MultiplierProfile() = default;

  ProfileKind kind_ = ProfileKind::custom;
  double epsilon_ = 1.0;
  double inner_ = 0.0;
  double outer_ = 0.0;
  std::string name_;
  std::shared_ptr<const std::function<double(double)>> custom_;
};

/// The sandwich-bump 1_(-eps,eps) <= m <= 1_(-2eps,2eps); eps must be 2^-i, i >= 0.
MultiplierProfile make_bump_profile(double epsilon);

/// A = sum_{i=0..3} sup_t |t^i m^(i)(t)| by central differences on a uniform scan.
struct SmoothnessConstant {
  double total = 0.0;
  double terms[4] = {0.0, 0.0, 0.0, 0.0};
};

SmoothnessConstant smoothness_terms(const MultiplierProfile& m);
double smoothness_constant(const MultiplierProfile& m);

/// Layers m_1..m_depth plus a final tail layer whose pointwise sum is m.
///
/// Layer i is P_i - P_{i-1} with P_0 = 0 and P_i(t) = m(g_i(|t|)), where g_i is
/// a C^6 convex smoothing of max(|t|, 2^-i) over a window of width
/// window_factor * 2^-i around the knot. The tail is m - P_depth.
struct LayerDecomposition {
  std::vector<MultiplierProfile> layers;
  double window_factor = 0.0;
  int depth = 0;
};

/// Requires m(0) = 1, m non-increasing on [0, inf) to 1e-9 and support in [-2, 2].
LayerDecomposition layer_decomposition(const MultiplierProfile& m, int depth);

/// Which variable carries the exponent beta in the hyperbolic argument.
///   first_scaled:  a(xi, eta) = |xi| |eta|^beta
///   second_scaled: a(xi, eta) = |xi|^beta |eta|
enum class Orientation { first_scaled, second_scaled };

/// Hyperbolic argument a over the frequency grid; excluded points (|0|^beta
/// with beta < 0) are marked with -1 and receive symbol value 0.
SymbolGrid hyperbolic_argument(double beta, int n_log2, Orientation orient = Orientation::first_scaled);

/// m(lambda * a(xi, eta)) with the conventions of hyperbolic_argument.
SymbolGrid hyperbolic_symbol(double lambda, double beta, const MultiplierProfile& m, int n_log2,
                             Orientation orient = Orientation::first_scaled);

/// Same, reusing a precomputed argument grid.
SymbolGrid hyperbolic_symbol_from(double lambda, const MultiplierProfile& m, const SymbolGrid& argument);

/// Indicator of {|eta|^beta <= 1}: beta > 0 keeps |eta| <= 1, beta < 0 keeps
/// |eta| >= 1 (eta = 0 dropped), beta = 0 keeps everything.
SymbolGrid pi_beta_mask(double beta, int n_log2);

} // namespace hxc
