#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hxc/exec.hpp"
#include "hxc/grid.hpp"
#include "hxc/linearized.hpp"
#include "hxc/multiplier.hpp"

namespace hxc {

// Littlewood-Paley machinery for operators with symbol m(V |xi|^beta |eta|):
// the first variable carries the beta power, the second variable the
// Lipschitz regularity of V.

/// Partition of unity on the geometric ladder of scales q^k.
///
///   P(w, k) = (Theta(u - k) - Theta(u - k - M)) / M,   u = log_q |w|,
///
/// where Theta rises from 0 to 1 on [offset, offset + 1] (a smoothstep, or a
/// unit step at offset when sharp). Summing over k telescopes to 1 for w != 0;
/// P(., k) is supported in q^(k + offset) < |w| < q^(k + offset + M + 1).
struct ScaleLadder {
  double log2_ratio = 1.0;  // log2 q
  int period = 1;           // M
  double offset = 0.0;
  bool sharp = false;
  int k_min = 0;
  int k_max = 0;

  struct Entry {
    int k;
    double value;
  };

  double scale(int k) const;
  double log2_scale(int k) const { return k * log2_ratio; }
  bool contains(int k) const { return k >= k_min && k <= k_max; }
  double profile(double w, int k) const;
  /// Ladder indices with P(w, k) != 0, ascending.
  std::vector<Entry> nonzero(double w) const;
};

enum class LadderKind {
  dyadic,   // t-scales 2^l; the product phi2_hat psi2_hat is the indicator of [1, 2)
  quarter,  // t-scales 2^(l/4); smooth product supported in (1, 2)
};

std::string to_string(LadderKind k);
LadderKind ladder_from_string(const std::string& s);

enum class LPKind { phi1, phi2, psi2 };

/// Littlewood-Paley family on an N x N grid.
///
/// phi1 acts on the first variable on the s-ladder; phi2 and psi2 act on the
/// second variable on the t-ladder. psi2 is the second derivative of a bump of
/// radius 2^-4 / 3 (compact support in space, mean zero); phi2_hat is the
/// product profile divided by psi2_hat, so the product normalization is exact.
class LPFamily {
public:
  LPFamily(double beta, int n_log2, LadderKind kind);

  double beta() const { return beta_; }
  int n_log2() const { return n_log2_; }
  int size() const { return 1 << n_log2_; }
  LadderKind kind() const { return kind_; }
  const ScaleLadder& s_ladder() const { return s_; }
  const ScaleLadder& t_ladder() const { return t_; }
  double psi2_radius() const { return radius_; }

  double phi1_hat(double xi, int k) const { return s_.profile(xi, k); }
  /// Product phi2_hat(eta / t_l) psi2_hat(eta / t_l).
  double product_hat(double eta, int l) const { return t_.profile(eta, l); }
  double psi2_hat(double omega) const;  // at unit scale
  double phi2_hat(double eta, int l) const;
  double psi2(double y) const;  // at unit scale

  /// psi2 sampled at j / N on the torus (j > N/2 wraps to negative y).
  std::vector<double> psi2_samples() const;

  struct AxisEntry {
    int k;
    double phi;  // phi1_hat, or phi2_hat on the t-ladder
    double psi;  // psi2_hat on the t-ladder; 1 on the s-ladder
  };
  /// Nonzero ladder entries for grid frequency |w| (0 .. N/2) on each axis.
  const std::vector<AxisEntry>& s_entries(int w) const { return s_table_.at(static_cast<std::size_t>(w)); }
  const std::vector<AxisEntry>& t_entries(int w) const { return t_table_.at(static_cast<std::size_t>(w)); }

private:
  double beta_;
  int n_log2_;
  LadderKind kind_;
  ScaleLadder s_;
  ScaleLadder t_;
  double radius_;
  double norm_;
  std::vector<std::vector<AxisEntry>> s_table_;
  std::vector<std::vector<AxisEntry>> t_table_;
};

LPFamily make_lp_family(double beta, int n_log2, LadderKind kind = LadderKind::dyadic);

/// One-axis multiplier of the given kind at ladder index `scale`.
SymbolGrid lp_symbol(const LPFamily& fam, LPKind kind, int scale);
SampledField project(const SampledField& f, const LPFamily& fam, LPKind kind, int scale);

/// sum_k sum_l phi1_hat phi2_hat psi2_hat at every grid frequency.
SymbolGrid calderon_symbol(const LPFamily& fam);

/// f with every coefficient on the axes xi = 0 or eta = 0 removed, i.e. the
/// part of f the ladders reproduce.
SampledField resolved_part(const SampledField& f);

/// ||f - sum_k sum_l P1 P2 P3 f||_2 / ||f||_2 (0 for f = 0).
double calderon_residual(const SampledField& f, const LPFamily& fam);

/// Does the ladder pair (k, l) belong to the principal part at level j,
/// i.e. t_l < (2^(j+3) s_k^beta)^-1 ?
bool principal_pair(const LPFamily& fam, int k, int l, int j);

/// Sum of P1 P2 P3 over principal pairs at level j, and over the remaining pairs.
SymbolGrid principal_symbol(const LPFamily& fam, int j);
SymbolGrid remainder_symbol(const LPFamily& fam, int j);

/// Level of a value of V. Values are measured in units of the profile's
/// plateau radius r (m = 1 on [0, r]), so j = floor(log2(lambda / r)).
int decomposition_level(double lambda, const MultiplierProfile& m);

/// Symbol of E_lambda: m(lambda |xi|^beta |eta|) times the remainder at lambda's level.
SymbolGrid error_symbol(const LPFamily& fam, const MultiplierProfile& m, double lambda);

/// Symbol of E_(2^j), i.e. lambda = r 2^j.
SymbolGrid base_error_symbol(const LPFamily& fam, const MultiplierProfile& m, int j);

struct DecompositionTerms {
  SampledField direct;           // T_{m,V} f
  SampledField principal;        // S f
  SampledField error;            // E f
  SampledField large_variation;  // sum_j 1_{Omega_j} E_(2^j) f
  SampledField small_variation;  // E f - large_variation, signed
  std::vector<int> levels;       // occupied j, ascending
  std::vector<std::string> notes;
};

/// All terms of the split T = S + E = S + LV + SV for the linearized operator.
DecompositionTerms decompose(const SampledField& f, const LinearizerField& v, const LPFamily& fam,
                             const MultiplierProfile& m, Exec exec = Exec::parallel);

SampledField principal_term(const SampledField& f, const LinearizerField& v, const LPFamily& fam,
                            const MultiplierProfile& m, Exec exec = Exec::parallel);
SampledField error_term(const SampledField& f, const LinearizerField& v, const LPFamily& fam,
                        const MultiplierProfile& m, Exec exec = Exec::parallel);
SampledField large_variation_term(const SampledField& f, const LinearizerField& v, const LPFamily& fam,
                                  const MultiplierProfile& m, Exec exec = Exec::parallel);

/// E_(2^j) f on the whole grid.
SampledField large_variation_error(const SampledField& f, int j, const LPFamily& fam, const MultiplierProfile& m);

/// Pointwise bound int_{2^j}^{2^(j+1)} |d/dtau E_tau f| dtau on Omega_j (tau in units
/// of the plateau radius): Richardson-extrapolated central differences of m at
/// nodes_per_octave + 1 geometric nodes, trapezoid rule in tau.
SampledField small_variation_error(const SampledField& f, const LinearizerField& v, const LPFamily& fam,
                                   const MultiplierProfile& m, int nodes_per_octave = 8);

/// Grid frequencies where E_(2^j) is nonzero outside 2^(-j-5) <= |xi|^beta |eta| <= 2^(-j+4).
std::uint64_t error_support_violations(const LPFamily& fam, const MultiplierProfile& m, int j);

/// max over grid frequencies of #{j in [j_lo, j_hi] : E_(2^j) != 0 there}.
/// Levels whose symbol is certified zero by the support bound are skipped.
int overlap_count(const LPFamily& fam, const MultiplierProfile& m, int j_lo, int j_hi);

struct RegimeReport {
  std::uint64_t unit_checked = 0;
  std::uint64_t unit_violations = 0;       // m != 1 where 4 s^beta t <= 1/lambda
  std::uint64_t vanishing_checked = 0;
  std::uint64_t vanishing_violations = 0;  // m != 0 where t > 4 / (lambda s^beta)
};

/// Scans every ladder pair and every grid frequency in the pair's support
/// (lambda in units of the plateau radius).
RegimeReport regime_check(const LPFamily& fam, const MultiplierProfile& m, double lambda);

enum class RatioVariant {
  band,   // V Lipschitz in the second variable, band |xi|^beta <= 1/L
  cone,   // beta = 1, V >= L^2 with the max(L^2, L d) modulus, frequencies in |xi| <= |eta|
};

struct RatioReport {
  std::uint64_t triples = 0;
  std::uint64_t relevant = 0;
  std::uint64_t violations = 0;
  double worst_ratio = 1.0;
  std::array<int, 3> witness{{-1, -1, -1}};  // (x, y, z) grid indices
  bool pass() const { return violations == 0; }
};

/// Samples (x, y, z) with |y - z| inside the support of psi2 at some scale t
/// reachable in the variant's (s, t) regime, and checks
/// max(V(x,y), V(x,z)) / min(V(x,y), V(x,z)) <= 3/2.
RatioReport lipschitz_ratio_check(const LinearizerField& v, const LPFamily& fam, double lipschitz,
                                  RatioVariant variant, std::size_t triples, std::uint64_t seed);

/// Points (x, z) with (V, 3V/2] meeting the powers of two.
std::vector<bool> f1_mask(const LinearizerField& v);
/// Points (x, y) with [2V/3, V] meeting the powers of two.
std::vector<bool> f2_mask(const LinearizerField& v);
/// +1 if 2 v(x,z) = v(x,y), -1 if v(x,z) = 2 v(x,y), else 0 (v the dyadic rounding).
int variation_sign(double v_xz, double v_xy);

/// Centered average of |f| along the first variable, maximized over half-widths
/// 0, 1, 2, 4, ... < N/2 and the full circle.
SampledField hl_maximal_m1(const SampledField& f);

/// (sum over the ladder of |P f|^2)^(1/2) for the given kind.
SampledField continuous_square_function(const SampledField& f, const LPFamily& fam, LPKind kind);

/// sqrt(max over frequencies of sum over the ladder of |symbol|^2).
double square_function_constant(const LPFamily& fam, LPKind kind);

/// Constant C with |K_lambda * g| <= C M1 g for every lambda in the list,
/// where K_lambda is the first-variable kernel of m(lambda |xi|). Built from
/// the decreasing majorant of |K_lambda| stepped on the M1 windows.
double first_variable_kernel_constant(const MultiplierProfile& m, std::span<const double> lambdas, int n_log2);

} // namespace hxc
