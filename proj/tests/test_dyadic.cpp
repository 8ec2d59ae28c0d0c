#include <doctest.h>

#include <cmath>

#include "hxc/dyadic.hpp"
#include "hxc/rng.hpp"

using namespace hxc;

namespace {

SampledField haar_tensor(const DyadicInterval& i, const DyadicInterval& j, int n_log2) {
  const int n = 1 << n_log2;
  SampledField f(n_log2);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) f(a, b) = haar_eval(i, cell_center(a, n)) * haar_eval(j, cell_center(b, n));
  return f;
}

bool admissible_42(const DyadicInterval& i, const DyadicInterval& j, double v, double beta, double lipschitz) {
  const double jb = std::pow(j.length(), beta);
  return i.length() * jb <= v && jb >= lipschitz;
}

} // namespace

TEST_SUITE("dyadic") {
  TEST_CASE("intervals are left-open and right-closed") {
    const auto unit = DyadicInterval::at_level(0, 0);
    CHECK(unit.length() == 1.0);
    CHECK_FALSE(unit.contains(0.0));
    CHECK(unit.contains(1.0));
    const auto q = DyadicInterval::at_level(2, 1);
    CHECK(q.left() == 0.25);
    CHECK(q.contains(0.5));
    CHECK_FALSE(q.contains(0.25));
    CHECK(DyadicInterval::of_cell(5, 2, 4) == q);
    CHECK(q.contains_cell(4, 4));
    CHECK_FALSE(q.contains_cell(8, 4));
  }

  TEST_CASE("Haar functions") {
    const auto unit = DyadicInterval::at_level(0, 0);
    CHECK(haar_eval(unit, 0.25) == 1.0);
    CHECK(haar_eval(unit, 0.75) == -1.0);
    CHECK(haar_eval(DyadicInterval::at_level(2, 3), 0.8) == 2.0);
    CHECK(haar_eval(DyadicInterval::at_level(2, 3), 0.3) == 0.0);

    // mean zero and orthonormal under cell-center quadrature at N = 32
    const int n = 32;
    std::vector<DyadicInterval> all;
    for (int l = 0; l < 5; ++l)
      for (long long p = 0; p < (1LL << l); ++p) all.push_back(DyadicInterval::at_level(l, p));
    for (const auto& a : all) {
      double mean = 0.0;
      for (int i = 0; i < n; ++i) mean += haar_eval(a, cell_center(i, n));
      CHECK(std::abs(mean) < 1e-14);
      for (const auto& b : all) {
        double ip = 0.0;
        for (int i = 0; i < n; ++i) ip += haar_eval(a, cell_center(i, n)) * haar_eval(b, cell_center(i, n));
        CHECK(ip / n == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("Haar transform") {
    const auto c = haar_transform(SampledField::from_function(4, [](double, double) { return cplx(3.0); }), 4);
    CHECK(c.haar_energy() == 0.0);
    CHECK(std::abs(c.at(0, 0) - 3.0) < 1e-14);
    for (int sx = 0; sx < c.slots(); ++sx)
      for (int sy = 0; sy < c.slots(); ++sy)
        if (sx || sy) CHECK(std::abs(c.at(sx, sy)) < 1e-14);

    const auto i0 = DyadicInterval::at_level(1, 1), j0 = DyadicInterval::at_level(3, 5);
    const auto h = haar_transform(haar_tensor(i0, j0, 5), 5);
    for (int sx = 0; sx < h.slots(); ++sx)
      for (int sy = 0; sy < h.slots(); ++sy) {
        const bool hit = sx == HaarCoefficients::slot(i0) && sy == HaarCoefficients::slot(j0);
        CHECK(std::abs(h.at(sx, sy) - (hit ? 1.0 : 0.0)) < 1e-13);
      }
    CHECK(std::abs(h.coefficient(i0, j0) - 1.0) < 1e-13);

    for (int n_log2 : {3, 5, 6}) {
      const auto f = random_field(n_log2, 50 + n_log2);
      CHECK(max_abs_diff(haar_inverse(haar_transform(f, n_log2)), f) < 1e-12);
    }
  }

  TEST_CASE("dyadic metric") {
    CHECK(dyadic_metric(0.3, 0.3, 1.0 / 64) == 1.0 / 64);
    CHECK(dyadic_metric(0.3, 0.6, 1.0 / 64) == 1.0);
    CHECK(dyadic_metric(0.1, 0.2, 1.0 / 64) == 0.25);
    CHECK(cell_metric(3, 3, 4) == 1.0 / 16);
    CHECK(cell_metric(7, 8, 4) == 1.0);
    CHECK(cell_metric(4, 7, 4) == 0.25);
    CHECK(scale_product(1, 2, 2.0) == doctest::Approx(0.5 * 0.0625));
  }

  TEST_CASE("model operator with everything admissible is the Haar projection") {
    const int n_log2 = 4, depth = 4;
    const auto f = random_field(n_log2, 6);
    const auto v = LinearizerField::constant(n_log2, std::ldexp(1.0, 20));
    const double L = std::ldexp(1.0, -(depth - 1));
    auto c = haar_transform(f, depth);
    for (int s = 0; s < c.slots(); ++s) {
      c.at(0, s) = 0.0;
      c.at(s, 0) = 0.0;
    }
    const auto projection = haar_inverse(c);
    const auto out = dyadic_model_operator(f, v, 1.0, L, DyadicVariant::rows, depth);
    CHECK(max_abs_diff(out.field, projection) < 1e-12);
    CHECK(out.hypotheses_hold);
  }

  TEST_CASE("model operator on a single Haar pair") {
    const int n_log2 = 5, n = 32, depth = 5;
    const double L = 0.25, beta = 1.0;
    const auto v = generate_dyadic_linearizer(n_log2, L, DyadicVariant::rows, 4);
    const auto i0 = DyadicInterval::at_level(2, 1), j0 = DyadicInterval::at_level(1, 0);
    const auto f = haar_tensor(i0, j0, n_log2);
    const auto out = dyadic_model_operator(f, v, beta, L, DyadicVariant::rows, depth);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        const double expect = admissible_42(i0, j0, v(x, y), beta, L) ? f(x, y).real() : 0.0;
        CHECK(std::abs(out.field(x, y) - expect) < 1e-12);
      }
  }

  TEST_CASE("fast model path equals direct summation") {
    for (auto variant : {DyadicVariant::squares, DyadicVariant::rows})
      for (int seed = 0; seed < 4; ++seed) {
        const auto v = generate_dyadic_linearizer(5, 0.5, variant, 100 + seed);
        const auto f = random_field(5, 200 + seed);
        const auto fast = dyadic_model_operator(f, v, 1.0, 0.5, variant, 5);
        const auto ref = dyadic_model_operator(f, v, 1.0, 0.5, variant, 5, true);
        CHECK(relative_l2_error(fast.field, ref.field) < 1e-10);
      }
  }

  TEST_CASE("selection stability") {
    const auto c = LinearizerField::constant(4, 0.5);
    CHECK(check_selection_stability(c, 0.5, 1.0, DyadicVariant::rows).violations == 0);
    for (int seed = 0; seed < 5; ++seed) {
      for (auto variant : {DyadicVariant::squares, DyadicVariant::rows}) {
        const auto v = generate_dyadic_linearizer(5, 0.5, variant, seed);
        CHECK(verify_dyadic_lipschitz(v, 0.5, variant).pass);
        const auto rep = check_selection_stability(v, 0.5, 1.0, variant);
        CHECK(rep.checked > 0);
        CHECK(rep.violations == 0);
      }
    }
  }

  TEST_CASE("constructed violations are found and witnessed") {
    for (auto variant : {DyadicVariant::squares, DyadicVariant::rows})
      for (int seed = 0; seed < 4; ++seed) {
        SelectionWitness planted;
        const auto v = generate_violating_dyadic_linearizer(5, 0.5, 1.0, variant, 300 + seed, &planted);
        const auto rep = check_selection_stability(v, 0.5, 1.0, variant);
        CHECK(rep.violations >= 1);
        REQUIRE_FALSE(rep.witnesses.empty());
        const auto& w = rep.witnesses.front();
        // the witness is admissible at (x, y) and not at (x2, y), with x2 in the same I
        CHECK(DyadicInterval::of_cell(w.x, w.level_i, 5) == DyadicInterval::of_cell(w.x2, w.level_i, 5));
        CHECK(v(w.x, w.y) != v(w.x2, w.y));
      }

    // V below the floor sqrt(V) > L
    const auto low = LinearizerField::from_values(4, std::vector<double>(256, 0.125), RegularityKind::dyadic_of_lipschitz);
    std::vector<double> step(256, 0.125);
    for (int y = 0; y < 16; ++y) step[8 * 16 + y] = 0.0625;
    const auto broken = LinearizerField::from_values(4, step, RegularityKind::dyadic_of_lipschitz);
    CHECK_FALSE(verify_dyadic_lipschitz(broken, 0.5, DyadicVariant::squares).pass);
    CHECK(check_selection_stability(broken, 0.5, 1.0, DyadicVariant::squares).violations >= 1);
    CHECK(check_selection_stability(low, 0.5, 1.0, DyadicVariant::squares).violations == 0);
  }

  TEST_CASE("telescoping in scale") {
    const auto f = random_field(5, 9);
    CHECK(telescoping_check(LinearizerField::constant(5, 0.25), f, 5).ok());
    const auto v = LinearizerField::constant(5, 0.25);
    for (int y : {0, 7, 31}) {
      const auto coll = collection_J(DyadicInterval::at_level(3, 2), y, v);
      REQUIRE_FALSE(coll.empty());
      // the admissible scales form one contiguous run
      for (std::size_t k = 1; k < coll.size(); ++k) CHECK(std::abs(coll[k].level() - coll[k - 1].level()) == 1);
    }
    for (int seed = 0; seed < 4; ++seed) {
      const auto w = generate_dyadic_linearizer(6, 0.5, DyadicVariant::squares, 40 + seed);
      const auto rep = telescoping_check(w, random_field(6, seed), 6);
      CHECK(rep.convex);
      CHECK(rep.x_independent);
      CHECK(rep.max_identity_error <= 1e-10);
    }
  }

  TEST_CASE("martingale averages, maximal and square functions") {
    const auto c = SampledField::from_function(4, [](double, double) { return cplx(2.5); });
    CHECK(max_abs_diff(dyadic_maximal_m2(c), c) < 1e-14);
    for (int l = 0; l <= 4; ++l) CHECK(max_abs_diff(martingale_average(c, l, Axis::first), c) < 1e-14);
    CHECK(lp_norm(dyadic_square_function(c, Axis::second), 2.0) < 1e-14);

    const auto f = random_field(5, 17);
    for (auto axis : {Axis::first, Axis::second}) {
      const auto mean = martingale_average(f, 0, axis);
      SampledField sum(5);
      for (int l = 0; l < 5; ++l) sum += martingale_average(f, l + 1, axis) - martingale_average(f, l, axis);
      CHECK(max_abs_diff(sum, f - mean) < 1e-12);
      CHECK(lp_norm(dyadic_square_function(f, axis), 2.0) == doctest::Approx(lp_norm(f - mean, 2.0)).epsilon(1e-10));
    }
    CHECK(max_abs_diff(martingale_average(f, 5, Axis::second), f) < 1e-15);

    // the maximal function dominates |f| and every average along the second axis
    const auto m2 = dyadic_maximal_m2(f);
    for (int l = 0; l <= 5; ++l) {
      SampledField absf(5);
      for (std::size_t k = 0; k < f.count(); ++k) absf.samples()[k] = std::abs(f.samples()[k]);
      const auto avg = martingale_average(absf, l, Axis::second);
      for (std::size_t k = 0; k < f.count(); ++k) CHECK(m2.samples()[k].real() >= avg.samples()[k].real() - 1e-14);
    }
  }
}
