#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hxc/grid.hpp"
#include "hxc/multiplier.hpp"

namespace hxc {

/// Declared regularity of a linearizing function V.
///   constant             V = value everywhere
///   lip_x                |V(x,y) - V(x',y)| <= L |x - x'|           (first variable)
///   lip_2d               |V(z) - V(z')| <= max(L^2, L |z - z'|), V >= floor (default L^2)
///   dyadic_of_lipschitz  V = 2^floor(log2 v) for an L-Lipschitz v >= base
enum class RegularityKind { constant, lip_x, lip_2d, dyadic_of_lipschitz };

std::string to_string(RegularityKind k);
RegularityKind regularity_from_string(const std::string& s);

struct LinearizerSpec {
  RegularityKind kind = RegularityKind::constant;
  double value = 1.0;      // constant
  double lipschitz = 1.0;  // L
  double base = 1.0;       // minimum of V (lip_x) or of the internal v (dyadic)
  double floor = -1.0;     // lip_2d lower bound; negative means L^2
  double amplitude = 0.0;  // peak-to-peak; 0 means "largest allowed by the margin"
  int modes = 4;           // band of the random series
};

/// V sampled on the grid; distances are torus distances on [0,1)^2.
struct LinearizerField {
  int n_log2 = 0;
  std::vector<double> values;  // row-major (i, j), same layout as SampledField
  LinearizerSpec spec;
  std::uint64_t seed = 0;
  std::vector<double> internal;  // the Lipschitz v behind a dyadic field, else empty
  double measured_lipschitz_x = 0.0;
  double measured_lipschitz_2d = 0.0;

  int size() const { return 1 << n_log2; }
  double operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * size() + j]; }
  double min_value() const;
  double max_value() const;

  /// W(x, y) = V(y, x); swaps the roles of the variables.
  LinearizerField transposed() const;

  static LinearizerField from_values(int n_log2, std::vector<double> values,
                                     RegularityKind declared = RegularityKind::constant);
  static LinearizerField constant(int n_log2, double value);
};

/// Deterministic pseudo-random V of the requested class; the random series is
/// rescaled by its measured Lipschitz constant so the class holds with >= 5% margin.
LinearizerField generate_linearizer(const LinearizerSpec& spec, std::uint64_t seed, int n_log2);

/// JSON sidecar {kind, params, seed, measured_constants}.
std::string linearizer_sidecar_json(const LinearizerField& v);

/// Real part only, in the HXF1 layout.
SampledField linearizer_as_field(const LinearizerField& v);

struct LipschitzReport {
  bool pass = true;
  double worst_ratio = 0.0;
  std::array<int, 4> witness{{-1, -1, -1, -1}};  // (i, j, i', j')
};

enum class LipschitzMode { lip_x, lip_2d, dyadic };

/// Checks the declared regularity. lip_x and lip_2d compare every adjacent
/// pair; lip_2d additionally draws 10^4 random long-range pairs (seeded).
/// worst_ratio is |V(z) - V(z')| divided by the admissible bound, so pass
/// means worst_ratio <= 1. With periodic = false, wrap-around pairs are skipped.
LipschitzReport verify_lipschitz(const LinearizerField& v, LipschitzMode mode, double lipschitz,
                                 bool periodic = true, std::uint64_t seed = 0);

/// min{2^(j+2) : 2^j > lambda}; brackets lambda as 2^-3 r <= lambda < 2^-2 r.
double dyadic_round_up(double lambda);

/// floor(log2 lambda) for lambda > 0, exact.
int dyadic_level(double lambda);

struct Bucket {
  double key = 0.0;  // the exact value, or 2^level for dyadic level sets
  int level = 0;     // floor(log2 key); unused for the zero bucket
  bool zero = false;
  std::vector<std::uint32_t> points;  // flat indices i * N + j
};

/// Partition of the grid into buckets, ordered by key (zero bucket first).
struct BucketDecomposition {
  int n_log2 = 0;
  std::vector<Bucket> buckets;

  std::vector<bool> mask(std::size_t b) const;
  bool is_partition() const;
};

/// Dyadic level sets {2^j <= V < 2^(j+1)}; points with V = 0 go to the zero bucket.
BucketDecomposition level_sets(const LinearizerField& v);

/// One bucket per distinct value of V.
BucketDecomposition exact_buckets(const LinearizerField& v);

/// Definition-level oracle: every output point sums the full frequency grid,
/// with the input spectrum from a direct DFT. O(N^4).
SampledField apply_linearized_bruteforce(const SampledField& f, const LinearizerField& v,
                                         const MultiplierProfile& m, double beta,
                                         Orientation orient = Orientation::first_scaled,
                                         bool truncate = true, Exec exec = Exec::parallel);

enum class Quantize { exact, dyadic };

/// One fixed multiplier per distinct value of V, gathered on that value's
/// points. Small buckets are synthesized directly over the symbol support,
/// large ones through an inverse FFT. truncate applies Pi_beta.
SampledField apply_linearized_bucketed(const SampledField& f, const LinearizerField& v,
                                       const MultiplierProfile& m, double beta,
                                       Quantize quantize = Quantize::exact,
                                       Orientation orient = Orientation::first_scaled,
                                       bool truncate = true, Exec exec = Exec::parallel);

/// Adjoint of apply_linearized_bucketed (exact mode) for the normalized inner product.
SampledField apply_linearized_adjoint(const SampledField& g, const LinearizerField& v,
                                      const MultiplierProfile& m, double beta,
                                      Orientation orient = Orientation::first_scaled,
                                      bool truncate = true, Exec exec = Exec::parallel);

/// Operator whose symbol at a point z depends on lambda = V(z) only.
/// value(lambda, k) is the symbol at flat spectral index k. Indices with a
/// negative argument, or with lambda * argument > radius, are never visited,
/// so the symbol must vanish there.
struct SymbolFamily {
  SymbolGrid argument;
  double radius = 0.0;
  std::function<double(double lambda, std::size_t k)> value;
};

/// Bucketed application of a symbol family (one bucket per distinct value of V).
SampledField apply_symbol_family(const SampledField& f, const LinearizerField& v, const SymbolFamily& family,
                                 Exec exec = Exec::parallel);

/// Adjoint of apply_symbol_family for the normalized inner product.
SampledField apply_symbol_family_adjoint(const SampledField& g, const LinearizerField& v,
                                         const SymbolFamily& family, Exec exec = Exec::parallel);

/// The family m(lambda a) with a the hyperbolic argument, optionally truncated by Pi_beta.
SymbolFamily hyperbolic_family(const MultiplierProfile& m, double beta, int n_log2,
                               Orientation orient = Orientation::first_scaled, bool truncate = true);

/// V with every positive value replaced by 2^floor(log2 V).
LinearizerField dyadic_quantized(const LinearizerField& v);

/// Pointwise max over t in {t_min * 2^(k/refine)} <= t_max of |T_{m,t} f|,
/// where T_{m,t} has symbol m(t |xi| |eta|^beta). refine is 1 or 4.
SampledField maximal_over_scales(const SampledField& f, const MultiplierProfile& m, double beta,
                                 double t_min, double t_max, int refine = 1);

} // namespace hxc
