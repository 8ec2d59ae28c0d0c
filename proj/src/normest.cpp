#include "hxc/normest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hxc/rng.hpp"

namespace hxc {

LinearOperator identity_operator(int n_log2) {
  grid_size(n_log2);
  auto same = [](const SampledField& f) { return f; };
  return {n_log2, same, same, "identity"};
}

LinearOperator fixed_multiplier_operator(const SymbolGrid& symbol) {
  // real symbols are self-adjoint
  auto fn = [symbol](const SampledField& f) { return apply_fixed_multiplier(f, symbol); };
  return {symbol.n_log2(), fn, fn, "fixed_multiplier"};
}

LinearOperator linearized_operator(const LinearizerField& v, const MultiplierProfile& m, double beta,
                                   Orientation orient, bool truncate, Exec exec) {
  auto family = std::make_shared<const SymbolFamily>(hyperbolic_family(m, beta, v.n_log2, orient, truncate));
  auto field = std::make_shared<const LinearizerField>(v);
  LinearOperator op;
  op.n_log2 = v.n_log2;
  op.apply = [family, field, exec](const SampledField& f) { return apply_symbol_family(f, *field, *family, exec); };
  op.adjoint = [family, field, exec](const SampledField& g) {
    return apply_symbol_family_adjoint(g, *field, *family, exec);
  };
  op.name = "linearized";
  return op;
}

std::vector<cplx> dense_matrix(const LinearOperator& op) {
  const int n = grid_size(op.n_log2);
  const std::size_t n2 = static_cast<std::size_t>(n) * n;
  if (n2 > 4096) throw std::invalid_argument("dense_matrix: grid too large");
  std::vector<cplx> out(n2 * n2);
  for (std::size_t c = 0; c < n2; ++c) {
    SampledField e(op.n_log2);
    e.samples()[c] = 1.0;
    const auto col = op.apply(e);
    const auto cv = col.samples();
    std::copy(cv.begin(), cv.end(), out.begin() + static_cast<std::ptrdiff_t>(c * n2));
  }
  return out;
}

double norm_ratio(const LinearOperator& op, const SampledField& f, double p) {
  const double den = lp_norm(f, p);
  if (den == 0.0) return 0.0;
  return lp_norm(op.apply(f), p) / den;
}

namespace {

void normalize(SampledField& f, double p) {
  const double nrm = lp_norm(f, p);
  if (nrm > 0.0) f *= 1.0 / nrm;
}

// |u|^(q-1) u / |u|, the duality map of l^q up to normalization.
SampledField duality_map(const SampledField& u, double q) {
  SampledField out(u.n_log2());
  auto ov = out.samples();
  const auto uv = u.samples();
  for (std::size_t k = 0; k < uv.size(); ++k) {
    const double a = std::abs(uv[k]);
    ov[k] = a == 0.0 ? cplx{} : uv[k] * std::pow(a, q - 2.0);
  }
  return out;
}

double mean_power(const SampledField& u, double p) {
  double acc = 0.0;
  for (const auto& z : u.samples()) acc += std::pow(std::abs(z), p);
  return acc / static_cast<double>(u.count());
}

struct RestartResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  SampledField witness{3};
};

RestartResult ascend(const LinearOperator& op, double p, std::uint64_t seed, const AscentOptions& opt) {
  const double q = p / (p - 1.0);
  SampledField f = random_field(op.n_log2, seed);
  normalize(f, p);
  RestartResult res;
  double r = norm_ratio(op, f, p);
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    const auto g = op.apply(f);
    auto cand = duality_map(op.adjoint(duality_map(g, p)), q);
    normalize(cand, p);
    const double rc = norm_ratio(op, cand, p);
    if (rc > r * (1.0 + opt.tol)) {
      f = std::move(cand);
      r = rc;
      continue;
    }
    // gradient of log ratio: T* J_p(Tf) / |Tf|^p - J_p(f) / |f|^p
    const double gp = mean_power(g, p), fp = mean_power(f, p);
    if (gp == 0.0) {
      res.converged = true;
      break;
    }
    auto dir = op.adjoint(duality_map(g, p));
    dir *= 1.0 / gp;
    auto back = duality_map(f, p);
    back *= 1.0 / fp;
    dir -= back;
    const double dn = lp_norm(dir, 2.0);
    if (dn == 0.0) {
      res.converged = true;
      break;
    }
    double alpha = lp_norm(f, 2.0) / dn;
    bool moved = false;
    for (int h = 0; h < 30; ++h, alpha *= 0.5) {
      SampledField trial = f;
      auto step = dir;
      step *= alpha;
      trial += step;
      const double rt = norm_ratio(op, trial, p);
      if (rt > r * (1.0 + opt.tol)) {
        f = std::move(trial);
        normalize(f, p);
        r = rt;
        moved = true;
        break;
      }
    }
    if (!moved) {
      res.converged = true;
      break;
    }
  }
  res.iterations = it;
  res.value = norm_ratio(op, f, p);
  res.witness = std::move(f);
  return res;
}

std::vector<RestartResult> run_restarts(const LinearOperator& op, double p, std::uint64_t seed,
                                        const AscentOptions& opt) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_norm_ascent: p must be in (1, inf)");
  if (!op.apply || !op.adjoint) throw std::invalid_argument("lp_norm_ascent: operator needs apply and adjoint");
  if (opt.restarts < 1) throw std::invalid_argument("lp_norm_ascent: need at least one restart");
  std::vector<RestartResult> results(static_cast<std::size_t>(opt.restarts));
#pragma omp parallel for schedule(dynamic) if (opt.exec == Exec::parallel)
  for (int r = 0; r < opt.restarts; ++r) results[r] = ascend(op, p, derive_seed(seed, static_cast<std::uint64_t>(r)), opt);
  return results;
}

} // namespace

NormEstimate l2_norm_power_iteration(const LinearOperator& op, double tol, int max_iter, std::uint64_t seed) {
  if (!op.apply || !op.adjoint) throw std::invalid_argument("power iteration: operator needs apply and adjoint");
  if (max_iter < 1) throw std::invalid_argument("power iteration: max_iter must be positive");
  SampledField x = random_field(op.n_log2, seed);
  normalize(x, 2.0);
  NormEstimate est;
  est.p = 2.0;
  est.witness = x;
  double best = -1.0, prev = -1.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    const auto y = op.apply(x);
    const double val = lp_norm(y, 2.0) / lp_norm(x, 2.0);
    if (val > best) {
      best = val;
      est.witness = x;
    }
    if (val == 0.0 || (prev >= 0.0 && std::abs(val - prev) <= tol * val)) {
      est.converged = true;
      ++it;
      break;
    }
    prev = val;
    auto z = op.adjoint(y);
    if (lp_norm(z, 2.0) == 0.0) {
      est.converged = true;
      ++it;
      break;
    }
    normalize(z, 2.0);
    x = std::move(z);
  }
  est.iterations = it;
  est.value = norm_ratio(op, est.witness, 2.0);
  return est;
}

NormEstimate lp_norm_ascent(const LinearOperator& op, double p, std::uint64_t seed, const AscentOptions& opt) {
  auto results = run_restarts(op, p, seed, opt);
  std::size_t best = 0;
  for (std::size_t r = 1; r < results.size(); ++r)
    if (results[r].value > results[best].value) best = r;
  NormEstimate est;
  est.p = p;
  est.value = results[best].value;
  est.iterations = results[best].iterations;
  est.converged = results[best].converged;
  est.witness = std::move(results[best].witness);
  return est;
}

std::vector<double> lp_ascent_trace(const LinearOperator& op, double p, std::uint64_t seed,
                                    const AscentOptions& opt) {
  const auto results = run_restarts(op, p, seed, opt);
  std::vector<double> trace;
  double best = 0.0;
  for (const auto& r : results) {
    best = std::max(best, r.value);
    trace.push_back(best);
  }
  return trace;
}

// ---------------------------------------------------------------- sweep

SweepResult epsilon_sweep(double p, double beta, const LinearizerSpec& vspec, const std::vector<double>& epsilons,
                          int n_log2, std::uint64_t seed, const SweepOptions& opt) {
  if (epsilons.empty()) throw std::invalid_argument("epsilon_sweep: empty epsilon list");
  const auto v = generate_linearizer(vspec, seed, n_log2);
  SweepResult out;
  double shape_max = 0.0, shape_min = std::numeric_limits<double>::infinity();
  for (double eps : epsilons) {
    const auto m = MultiplierProfile::bump(eps);
    const auto op = linearized_operator(v, m, beta, Orientation::first_scaled, true, opt.exec);
    NormEstimate est;
    if (p == 2.0) {
      est = l2_norm_power_iteration(op, opt.tol, opt.max_iter, seed);
    } else {
      AscentOptions ao;
      ao.restarts = opt.restarts;
      ao.max_iter = opt.max_iter;
      ao.exec = opt.exec;
      est = lp_norm_ascent(op, p, seed, ao);
    }
    SweepRow row;
    row.p = p;
    row.beta = beta;
    row.epsilon = eps;
    row.n = grid_size(n_log2);
    row.seed = seed;
    row.smoothness = smoothness_constant(m);
    row.estimate = est.value;
    row.iterations = est.iterations;
    row.converged = est.converged;
    const double shape = std::log2(1.0 / eps) + 1.0;
    out.fitted_c = std::max(out.fitted_c, row.estimate / (row.smoothness * shape));
    shape_max = std::max(shape_max, row.estimate / shape);
    shape_min = std::min(shape_min, row.estimate / shape);
    out.rows.push_back(row);
  }
  out.shape_ratio = shape_min > 0.0 ? shape_max / shape_min : std::numeric_limits<double>::infinity();
  return out;
}

std::string sweep_csv(const SweepResult& r, const std::string& config_hash) {
  std::ostringstream os;
  os << "p,beta,epsilon,N,seed,A,estimate,iterations,converged,config_hash\n";
  char buf[512];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%llu,%.17g,%.17g,%d,%d,%s\n", row.p, row.beta, row.epsilon,
                  row.n, static_cast<unsigned long long>(row.seed), row.smoothness, row.estimate, row.iterations,
                  row.converged ? 1 : 0, config_hash.c_str());
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------- adversarial search

LinearizerField search_linearizer(const SearchSpec& spec, const std::vector<double>& levels) {
  const int n = grid_size(spec.n_log2);
  const int k = static_cast<int>(levels.size());
  if (k < 1 || k > n) throw std::invalid_argument("search_linearizer: need 1 <= knots <= N");
  std::vector<double> knot(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) knot[i] = std::exp2(levels[i]);
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) * k / n;
    const int i0 = static_cast<int>(std::floor(u));
    const double frac = u - i0;
    const double g = (1.0 - frac) * knot[i0 % k] + frac * knot[(i0 + 1) % k];
    std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(i) * n, n, g);
  }
  return LinearizerField::from_values(spec.n_log2, std::move(values), RegularityKind::lip_x);
}

namespace {

double gaussian(Rng& rng) {
  double u1 = rng.uniform();
  while (u1 <= 0.0) u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double evaluate(const SearchSpec& spec, const MultiplierProfile& m, const LinearizerField& v) {
  const auto op = linearized_operator(v, m, spec.beta, Orientation::first_scaled, true, Exec::parallel);
  if (spec.p == 2.0) return l2_norm_power_iteration(op, 1e-8, 200, spec.seed).value;
  AscentOptions ao;
  ao.restarts = 2;
  ao.max_iter = 60;
  return lp_norm_ascent(op, spec.p, spec.seed, ao).value;
}

} // namespace

SearchReport adversarial_linearizer_search(const SearchSpec& spec, const MultiplierProfile& m,
                                           SearchConstraint constraint,
                                           const std::optional<std::vector<double>>& start) {
  if (spec.budget < 1) throw std::invalid_argument("adversarial search: budget must be positive");
  if (!(spec.level_hi >= spec.level_lo)) throw std::invalid_argument("adversarial search: empty level range");
  SearchReport rep;
  rep.constraint = constraint;
  std::vector<double> cur =
      start ? *start : std::vector<double>(static_cast<std::size_t>(spec.knots), 0.5 * (spec.level_lo + spec.level_hi));
  if (static_cast<int>(cur.size()) != spec.knots) throw std::invalid_argument("adversarial search: start has wrong size");
  auto feasible = [&](const LinearizerField& v) {
    return constraint == SearchConstraint::none || v.measured_lipschitz_x <= spec.lipschitz * (1.0 + 1e-12);
  };
  auto v0 = search_linearizer(spec, cur);
  if (!feasible(v0)) throw std::invalid_argument("adversarial search: start point violates the constraint");
  double cur_val = evaluate(spec, m, v0);
  rep.evaluations = 1;
  rep.best_value = cur_val;
  rep.best_levels = cur;
  rep.best_v = v0;
  rep.history.push_back(cur_val);

  Rng rng(derive_seed(spec.seed, 0x5ea7c4));
  double sigma = std::max(1e-3, 0.25 * (spec.level_hi - spec.level_lo));
  while (rep.evaluations < spec.budget) {
    std::vector<double> cand = cur;
    for (auto& e : cand) e = std::clamp(e + sigma * gaussian(rng), spec.level_lo, spec.level_hi);
    ++rep.evaluations;
    const auto v = search_linearizer(spec, cand);
    if (!feasible(v)) {
      ++rep.rejected;
      sigma *= 0.95;
      rep.history.push_back(rep.best_value);
      continue;
    }
    const double val = evaluate(spec, m, v);
    if (val >= cur_val) {
      cur = std::move(cand);
      cur_val = val;
      sigma *= 1.2;
      if (val > rep.best_value) {
        rep.best_value = val;
        rep.best_levels = cur;
        rep.best_v = v;
      }
    } else {
      sigma *= 0.95;
    }
    sigma = std::clamp(sigma, 1e-4, spec.level_hi - spec.level_lo + 1e-4);
    rep.history.push_back(rep.best_value);
  }
  rep.measured_lipschitz = rep.best_v.measured_lipschitz_x;
  return rep;
}

} // namespace hxc
