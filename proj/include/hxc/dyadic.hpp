#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hxc/grid.hpp"
#include "hxc/linearized.hpp"

namespace hxc {

/// The dyadic interval 2^k ((0,1] + n): left-open, right-closed.
/// On the unit interval k <= 0; level() = -k counts halvings from (0,1].
struct DyadicInterval {
  int k = 0;
  long long n = 0;

  double length() const;
  double left() const;
  int level() const { return -k; }
  bool contains(double x) const;
  /// Cell index i of an N-point grid (cell i is identified with (i/N, (i+1)/N]).
  bool contains_cell(int i, int n_log2) const;

  static DyadicInterval at_level(int level, long long position) { return {-level, position}; }
  /// The level-`level` interval containing grid cell i.
  static DyadicInterval of_cell(int i, int level, int n_log2);

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

/// Center of grid cell i, the sample point used to evaluate step functions on cells.
inline double cell_center(int i, int n) { return (i + 0.5) / n; }

/// L^2-normalized Haar function: +|I|^-1/2 on the left half, -|I|^-1/2 on the right half.
double haar_eval(const DyadicInterval& interval, double x);

/// Tensor Haar coefficients of a field treated as constant on grid cells.
///
/// Along each axis, slot 0 holds the mean <1_(0,1], f> and slot 2^l + n holds
/// the interval of level l and position n, for levels 0 .. depth-1 (so every
/// interval has both halves resolved at cell size 2^-depth).
struct HaarCoefficients {
  int n_log2 = 0;
  int depth = 0;
  std::vector<cplx> data;  // (2^depth)^2, slot_x * 2^depth + slot_y

  int slots() const { return 1 << depth; }
  cplx& at(int sx, int sy) { return data[static_cast<std::size_t>(sx) * slots() + sy]; }
  cplx at(int sx, int sy) const { return data[static_cast<std::size_t>(sx) * slots() + sy]; }
  cplx coefficient(const DyadicInterval& i, const DyadicInterval& j) const;

  static int slot(const DyadicInterval& interval) { return (1 << interval.level()) + static_cast<int>(interval.n); }

  /// Sum of |c|^2 over pure Haar pairs (no mean slot in either axis).
  double haar_energy() const;
};

HaarCoefficients haar_transform(const SampledField& f, int depth);
SampledField haar_inverse(const HaarCoefficients& c);

/// Length of the smallest dyadic interval containing x and x', at least floor_scale.
double dyadic_metric(double x, double x2, double floor_scale);

/// Same for grid cells i, i2 of an N = 2^n_log2 grid; coincident cells give 1/N.
double cell_metric(int i, int i2, int n_log2);

enum class DyadicVariant { squares, rows };

std::string to_string(DyadicVariant v);
DyadicVariant dyadic_variant_from_string(const std::string& s);

/// |I||J|^beta for |I| = 2^-level_i and |J| = 2^-level_j.
double scale_product(int level_i, int level_j, double beta);

struct DyadicModelResult {
  SampledField field;
  bool hypotheses_hold = true;
  std::string note;
};

/// Sum over admissible (I, J) of <h_I (x) h_J, f> h_I(x) h_J(y), with |I|,|J| >= 2^-(depth-1).
///   rows: |I||J|^beta <= V(x,y) and |J|^beta >= L
///   squares: |I||J| <= V(x,y) (beta is ignored); requires sqrt(V) > L
/// V must be dyadic-valued. A violated squares floor is reported in the result.
/// The reference path sums every level pair at every point; the fast path
/// uses the monotonicity of the admissible scales (and, for squares, the split
/// |I| <= |J| plus its transpose).
DyadicModelResult dyadic_model_operator(const SampledField& f, const LinearizerField& v, double beta, double lipschitz,
                                        DyadicVariant variant, int depth, bool reference = false);

struct SelectionWitness {
  int x = 0, x2 = 0, y = 0;  // cells: admissible at (x, y), not at (x2, y)
  int level_i = 0, level_j = 0;
  friend auto operator<=>(const SelectionWitness&, const SelectionWitness&) = default;
};

struct SelectionReport {
  std::uint64_t checked = 0;     // admissible (x, y, I, J) tuples examined
  std::uint64_t violations = 0;  // tuples with some x' in I where admissibility fails
  std::vector<SelectionWitness> witnesses;  // lexicographically smallest, at most 16
};

/// Exhaustive check of the selection-stability property over every grid point
/// and every I, J (all levels 0 .. n_log2) satisfying the variant's side conditions.
SelectionReport check_selection_stability(const LinearizerField& v, double lipschitz, double beta,
                                          DyadicVariant variant);

struct DyadicLipschitzReport {
  bool pass = true;
  std::uint64_t violations = 0;
  std::array<int, 4> witness{{-1, -1, -1, -1}};  // (x, y, x', y')
};

/// Lipschitz condition with respect to the dyadic metric, where distinct dyadic
/// values a != b are at distance max(a, b). squares uses dyadic squares in the
/// plane, rows the first variable only.
DyadicLipschitzReport verify_dyadic_lipschitz(const LinearizerField& v, double lipschitz, DyadicVariant variant);

/// Random dyadic-valued V satisfying the variant's hypotheses with a factor-2 margin:
/// a random dyadic quadtree (squares) or per-row binary tree (rows) whose leaf
/// values obey V <= L |leaf|; for squares also V > L^2, which needs L <= 1/2.
LinearizerField generate_dyadic_linearizer(int n_log2, double lipschitz, DyadicVariant variant, std::uint64_t seed);

/// Dyadic V that breaks selection stability: a step from a to a/2 across the
/// halves of a random interval I on one row, with a = |I||J|^beta for a random
/// J obeying the variant's side conditions. Returns the planted pair in `planted`.
LinearizerField generate_violating_dyadic_linearizer(int n_log2, double lipschitz, double beta, DyadicVariant variant,
                                                     std::uint64_t seed, SelectionWitness* planted = nullptr);

/// Intervals J containing cell y with |I| <= |J| and |I||J| <= V(x, y) for some x in I.
std::vector<DyadicInterval> collection_J(const DyadicInterval& interval, int y, const LinearizerField& v);

struct TelescopingReport {
  bool convex = true;            // J' subset J'' subset J with J, J' in the collection implies J'' in it
  bool x_independent = true;     // membership agrees with |I||J| <= V(x, y) for every x in I
  double max_identity_error = 0;  // inner sum vs difference of two martingale averages
  bool ok() const { return convex && x_independent && max_identity_error <= 1e-10; }
};

/// Runs the three checks over every (I, y) with |I| >= 2^-(depth-1); the identity
/// uses f's Haar coefficients at the given depth.
TelescopingReport telescoping_check(const LinearizerField& v, const SampledField& f, int depth);

enum class Axis { first, second };

/// Average over the dyadic interval of length 2^-level containing each point, along the axis.
SampledField martingale_average(const SampledField& f, int level, Axis axis);

/// sup over dyadic J containing y of the average of |f(x, .)| over J.
SampledField dyadic_maximal_m2(const SampledField& f);

/// (sum_l |E_{l+1} f - E_l f|^2)^{1/2} along the axis, levels 0 .. n_log2-1.
SampledField dyadic_square_function(const SampledField& f, Axis axis);

} // namespace hxc
