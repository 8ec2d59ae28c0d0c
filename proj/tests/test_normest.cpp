#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>

#include "hxc/normest.hpp"
#include "hxc/rng.hpp"

using namespace hxc;

namespace {

double dense_operator_norm(const LinearOperator& op) {
  const auto a = dense_matrix(op);
  const auto dim = static_cast<Eigen::Index>(std::sqrt(static_cast<double>(a.size())));
  Eigen::Map<const Eigen::MatrixXcd> m(a.data(), dim, dim);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

SymbolGrid gapped_symbol(int n_log2, std::uint64_t seed) {
  Rng rng(seed);
  auto s = SymbolGrid::from_function(n_log2, [&](int, int) { return rng.uniform(-0.8, 0.8); });
  s(1, 2) = 1.3;  // one clear maximum
  return s;
}

LinearizerField random_v(int n_log2, std::uint64_t seed) {
  LinearizerSpec spec;
  spec.kind = RegularityKind::lip_x;
  spec.lipschitz = 6.0;
  spec.base = 0.1;
  return generate_linearizer(spec, seed, n_log2);
}

} // namespace

TEST_SUITE("normest") {
  TEST_CASE("identity") {
    const auto id = identity_operator(4);
    const auto est = l2_norm_power_iteration(id, 1e-12, 50, 1);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-10));
    AscentOptions opt;
    opt.restarts = 3;
    opt.max_iter = 20;
    for (double p : {1.5, 2.0, 4.0}) CHECK(lp_norm_ascent(id, p, 2, opt).value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(norm_ratio(id, SampledField(4), 2.0) == 0.0);
    CHECK_THROWS_AS(lp_norm_ascent(id, 1.0, 0, opt), std::invalid_argument);
  }

  TEST_CASE("dense matrix of a multiplier") {
    const auto s = gapped_symbol(3, 3);
    const auto op = fixed_multiplier_operator(s);
    const auto id = dense_matrix(identity_operator(3));
    for (std::size_t c = 0; c < 64; ++c)
      for (std::size_t r = 0; r < 64; ++r) CHECK(std::abs(id[c * 64 + r] - (r == c ? 1.0 : 0.0)) < 1e-14);
    CHECK(dense_operator_norm(op) == doctest::Approx(s.max_abs()).epsilon(1e-12));
  }

  TEST_CASE("fixed multiplier norm is the largest symbol value") {
    const auto s = gapped_symbol(4, 5);
    const auto op = fixed_multiplier_operator(s);
    const auto est = l2_norm_power_iteration(op, 1e-14, 2000, 9);
    CHECK(std::abs(est.value - s.max_abs()) <= 1e-10);
    CHECK(est.value <= s.max_abs() + 1e-12);
    AscentOptions opt;
    opt.restarts = 4;
    opt.max_iter = 300;
    opt.tol = 1e-14;
    CHECK(std::abs(lp_norm_ascent(op, 2.0, 3, opt).value - est.value) <= 1e-6);
  }

  TEST_CASE("linearized operator with constant V matches its fixed multiplier") {
    const auto m = make_bump_profile(0.5);
    const auto v = LinearizerField::constant(4, 0.3);
    const auto op = linearized_operator(v, m, 1.0);
    auto s = hyperbolic_symbol(0.3, 1.0, m, 4);
    s *= pi_beta_mask(1.0, 4);
    const auto est = l2_norm_power_iteration(op, 1e-13, 1000, 1);
    CHECK(est.value == doctest::Approx(s.max_abs()).epsilon(1e-10));
  }

  TEST_CASE("estimates are sound against the dense oracle") {
    const auto m = make_bump_profile(0.25);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto op = linearized_operator(random_v(3, seed), m, 1.0);
      const double exact = dense_operator_norm(op);
      const auto power = l2_norm_power_iteration(op, 1e-12, 2000, seed);
      CHECK(power.value <= exact + 1e-8);
      CHECK(power.value >= 0.999 * exact);
      AscentOptions opt;
      opt.restarts = 3;
      opt.max_iter = 100;
      CHECK(lp_norm_ascent(op, 2.0, seed, opt).value <= exact + 1e-8);
    }
  }

  TEST_CASE("adjoint is the dense conjugate transpose") {
    const auto op = linearized_operator(random_v(3, 4), make_bump_profile(0.5), -1.0);
    const auto a = dense_matrix(op);
    LinearOperator adj{3, op.adjoint, op.apply, "adjoint"};
    const auto b = dense_matrix(adj);
    double worst = 0.0;
    for (std::size_t c = 0; c < 64; ++c)
      for (std::size_t r = 0; r < 64; ++r) worst = std::max(worst, std::abs(b[c * 64 + r] - std::conj(a[r * 64 + c])));
    CHECK(worst < 1e-13);
  }

  TEST_CASE("witness reproduces the value") {
    const auto op = linearized_operator(random_v(4, 1), make_bump_profile(0.25), 1.0);
    const auto est = l2_norm_power_iteration(op, 1e-10, 300, 2);
    CHECK(std::abs(norm_ratio(op, est.witness, 2.0) - est.value) <= 1e-10);
    AscentOptions opt;
    opt.restarts = 3;
    opt.max_iter = 60;
    for (double p : {1.5, 3.0}) {
      const auto a = lp_norm_ascent(op, p, 5, opt);
      CHECK(std::abs(norm_ratio(op, a.witness, p) - a.value) <= 1e-10);
      CHECK(a.p == p);
    }
  }

  TEST_CASE("best-so-far never decreases over restarts") {
    const auto op = linearized_operator(random_v(4, 2), make_bump_profile(0.25), 1.0);
    AscentOptions opt;
    opt.restarts = 6;
    opt.max_iter = 30;
    const auto trace = lp_ascent_trace(op, 3.0, 7, opt);
    REQUIRE(trace.size() == 6);
    for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] >= trace[k - 1]);
    CHECK(trace.back() == lp_norm_ascent(op, 3.0, 7, opt).value);
  }

  TEST_CASE("ascent is independent of the execution policy") {
    const auto op_s = linearized_operator(random_v(4, 3), make_bump_profile(0.5), 1.0, Orientation::first_scaled, true,
                                          Exec::serial);
    AscentOptions serial, parallel;
    serial.restarts = parallel.restarts = 4;
    serial.max_iter = parallel.max_iter = 40;
    serial.exec = Exec::serial;
    parallel.exec = Exec::parallel;
    const auto a = lp_norm_ascent(op_s, 3.0, 11, serial);
    const auto b = lp_norm_ascent(op_s, 3.0, 11, parallel);
    CHECK(a.value == b.value);
    CHECK(a.witness == b.witness);
  }

  TEST_CASE("epsilon sweep") {
    LinearizerSpec spec;
    spec.kind = RegularityKind::lip_x;
    spec.lipschitz = 4.0;
    const auto one = epsilon_sweep(2.0, 1.0, spec, {1.0}, 4, 3);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0].estimate >= 1.0 - 1e-12);

    SweepOptions opt;
    opt.exec = Exec::serial;
    const auto a = epsilon_sweep(2.0, 1.0, spec, {0.5, 0.25, 0.125}, 4, 5, opt);
    const auto b = epsilon_sweep(2.0, 1.0, spec, {0.5, 0.25, 0.125}, 4, 5, opt);
    REQUIRE(a.rows.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(a.rows[k].estimate == b.rows[k].estimate);
      CHECK(a.rows[k].smoothness == smoothness_constant(make_bump_profile(a.rows[k].epsilon)));
    }
    CHECK(std::isfinite(a.fitted_c));
    for (const auto& r : a.rows) CHECK(r.estimate <= a.fitted_c * r.smoothness * (std::log2(1 / r.epsilon) + 1) * (1 + 1e-12));
    CHECK(sweep_csv(a, "abc") == sweep_csv(b, "abc"));
    const auto csv = sweep_csv(a, "abc");
    CHECK(csv.rfind("p,beta,epsilon,N,seed,A,estimate,iterations,converged,config_hash\n", 0) == 0);
  }

  TEST_CASE("linearizer search") {
    SearchSpec spec;
    spec.n_log2 = 4;
    spec.knots = 4;
    spec.budget = 40;
    spec.lipschitz = 2.0;
    spec.seed = 3;
    const auto m = make_bump_profile(0.25);
    const auto con = adversarial_linearizer_search(spec, m, SearchConstraint::lipschitz);
    const auto free = adversarial_linearizer_search(spec, m, SearchConstraint::none, con.best_levels);
    CHECK(con.best_value <= free.best_value);
    CHECK(con.measured_lipschitz <= spec.lipschitz * (1 + 1e-12));
    CHECK(con.evaluations == spec.budget);
    for (std::size_t k = 1; k < free.history.size(); ++k) CHECK(free.history[k] >= free.history[k - 1]);
    // repeatable
    CHECK(adversarial_linearizer_search(spec, m, SearchConstraint::lipschitz).best_value == con.best_value);

    // a single admissible level: V is constant and the search finds the multiplier norm
    SearchSpec flat = spec;
    flat.level_lo = flat.level_hi = -1.0;
    flat.budget = 5;
    const auto r = adversarial_linearizer_search(flat, m, SearchConstraint::none);
    auto s = hyperbolic_symbol(0.5, 1.0, m, 4);
    s *= pi_beta_mask(1.0, 4);
    CHECK(r.best_value == doctest::Approx(s.max_abs()).epsilon(1e-8));
  }
}
