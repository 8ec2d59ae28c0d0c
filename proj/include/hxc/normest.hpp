#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hxc/exec.hpp"
#include "hxc/grid.hpp"
#include "hxc/linearized.hpp"
#include "hxc/multiplier.hpp"

namespace hxc {

/// A linear map on N x N fields with an optional adjoint.
struct LinearOperator {
  int n_log2 = 0;
  std::function<SampledField(const SampledField&)> apply;
  std::function<SampledField(const SampledField&)> adjoint;
  std::string name;
};

LinearOperator identity_operator(int n_log2);
LinearOperator fixed_multiplier_operator(const SymbolGrid& symbol);
/// T_{m,V} (optionally composed with Pi_beta) with its bucketed adjoint.
LinearOperator linearized_operator(const LinearizerField& v, const MultiplierProfile& m, double beta,
                                   Orientation orient = Orientation::first_scaled, bool truncate = true,
                                   Exec exec = Exec::parallel);

/// Matrix of the operator in the standard basis, column-major (N^2 x N^2). Small N only.
std::vector<cplx> dense_matrix(const LinearOperator& op);

/// A certified lower bound on the operator norm with the input that attains it.
struct NormEstimate {
  double p = 2.0;
  double value = 0.0;
  int iterations = 0;
  SampledField witness{3};
  bool converged = false;
};

/// lp_norm(T f, p) / lp_norm(f, p); 0 for f = 0.
double norm_ratio(const LinearOperator& op, const SampledField& f, double p);

/// Power iteration on T*T from a seeded random start. The value is the ratio
/// attained by the best iterate, so it is a lower bound by construction.
NormEstimate l2_norm_power_iteration(const LinearOperator& op, double tol = 1e-10, int max_iter = 500,
                                     std::uint64_t seed = 0);

struct AscentOptions {
  int restarts = 25;
  int max_iter = 200;
  double tol = 1e-10;
  Exec exec = Exec::parallel;  // restarts run concurrently
};

/// Maximizes the p-norm ratio. Each step tries the dual-map fixed point
/// f <- J_p'(T* J_p(T f)) and falls back to a backtracking gradient step on the
/// log-ratio when that does not improve. Best restart wins, lowest index on ties.
NormEstimate lp_norm_ascent(const LinearOperator& op, double p, std::uint64_t seed, const AscentOptions& opt = {});

/// Best-so-far values after each restart (non-decreasing), for diagnostics.
std::vector<double> lp_ascent_trace(const LinearOperator& op, double p, std::uint64_t seed,
                                    const AscentOptions& opt = {});

struct SweepRow {
  double p = 2.0;
  double beta = 1.0;
  double epsilon = 1.0;
  int n = 0;
  std::uint64_t seed = 0;
  double smoothness = 0.0;  // A(epsilon)
  double estimate = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double fitted_c = 0.0;     // least c with estimate <= c A (log2(1/eps) + 1)
  double shape_ratio = 0.0;  // max / min over rows of estimate / (log2(1/eps) + 1)
};

struct SweepOptions {
  int restarts = 4;  // for p != 2
  double tol = 1e-9;
  int max_iter = 300;
  Exec exec = Exec::parallel;
};

/// One norm estimate of T_{m_eps,V} Pi_beta per epsilon, with the bump profile of
/// that epsilon and one V drawn from vspec and seed.
SweepResult epsilon_sweep(double p, double beta, const LinearizerSpec& vspec, const std::vector<double>& epsilons,
                          int n_log2, std::uint64_t seed, const SweepOptions& opt = {});

std::string sweep_csv(const SweepResult& r, const std::string& config_hash);

enum class SearchConstraint { lipschitz, none };

/// V(x, y) = g(x) with g piecewise linear through `knots` equispaced knots whose
/// values are 2^e, e in [level_lo, level_hi]. With the Lipschitz constraint,
/// candidates whose slope exceeds L are rejected.
struct SearchSpec {
  int n_log2 = 6;
  double beta = 1.0;
  double p = 2.0;
  int knots = 16;
  double level_lo = -4.0;
  double level_hi = 4.0;
  double lipschitz = 8.0;
  int budget = 1000;
  std::uint64_t seed = 0;
};

struct SearchReport {
  SearchConstraint constraint = SearchConstraint::none;
  double best_value = 0.0;
  std::vector<double> best_levels;
  LinearizerField best_v;
  double measured_lipschitz = 0.0;
  int evaluations = 0;
  int rejected = 0;
  std::vector<double> history;  // best value after each evaluation
};

LinearizerField search_linearizer(const SearchSpec& spec, const std::vector<double>& levels);

/// (1+1) evolution strategy with a success-rule step size. `start` seeds the
/// incumbent (default: all levels at the midpoint).
SearchReport adversarial_linearizer_search(const SearchSpec& spec, const MultiplierProfile& m,
                                           SearchConstraint constraint,
                                           const std::optional<std::vector<double>>& start = std::nullopt);

} // namespace hxc
