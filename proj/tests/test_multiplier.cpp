#include <doctest.h>

#include <cmath>

#include "hxc/multiplier.hpp"

using namespace hxc;

TEST_SUITE("multiplier") {
  TEST_CASE("smoothstep endpoints and antiderivative") {
    CHECK(smoothstep5(-1.0) == 0.0);
    CHECK(smoothstep5(0.0) == 0.0);
    CHECK(smoothstep5(1.0) == 1.0);
    CHECK(smoothstep5(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    for (int k = 0; k <= 1000; ++k) {
      const double x = k / 1000.0;
      CHECK(smoothstep5(x) >= 0.0);
      CHECK(smoothstep5(x) <= 1.0);
      CHECK(smoothstep5(x) + smoothstep5(1.0 - x) == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(smoothstep5_integral(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(smoothstep5_integral(3.0) == doctest::Approx(2.5).epsilon(1e-15));
    // Simpson check of the antiderivative
    const int n = 2000;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
      s += w * smoothstep5(0.7 * k / n);
    }
    CHECK(s * 0.7 / (3.0 * n) == doctest::Approx(smoothstep5_integral(0.7)).epsilon(1e-12));
  }

  TEST_CASE("bump values forced by the sandwich") {
    const auto m1 = make_bump_profile(1.0);
    CHECK(m1(0.5) == 1.0);
    CHECK(m1(2.5) == 0.0);
    const auto m3 = make_bump_profile(0.125);
    CHECK(m3(0.125) == 1.0);
    CHECK(m3(-0.1) == 1.0);
    CHECK(m3(0.25) == 0.0);
    CHECK(m3(-0.3) == 0.0);
    CHECK_THROWS_AS(make_bump_profile(0.3), std::invalid_argument);
    CHECK_THROWS_AS(make_bump_profile(2.0), std::invalid_argument);
  }

  TEST_CASE("sandwich on a dense scan") {
    for (int i = 0; i <= 6; ++i) {
      const double eps = std::ldexp(1.0, -i);
      const auto m = make_bump_profile(eps);
      const int n = 100000;
      int bad = 0;
      for (int k = -n; k <= n; ++k) {
        const double t = 3.0 * eps * k / n;
        const double lo = std::abs(t) < eps ? 1.0 : 0.0;
        const double hi = std::abs(t) < 2 * eps ? 1.0 : 0.0;
        const double v = m(t);
        if (v < lo || v > hi) ++bad;
      }
      CHECK(bad == 0);
    }
  }

  TEST_CASE("smoothness constant") {
    const auto zero = MultiplierProfile::custom("zero", [](double) { return 0.0; }, 1.0);
    CHECK(smoothness_constant(zero) == 0.0);
    for (int i = 0; i <= 6; ++i) {
      const auto t = smoothness_terms(make_bump_profile(std::ldexp(1.0, -i)));
      CHECK(t.terms[0] == 1.0);
      CHECK(t.total > 1.0);
    }
    // dilation invariance of t^i m^(i): every bump has the same A
    const double a1 = smoothness_constant(make_bump_profile(1.0));
    const double a6 = smoothness_constant(make_bump_profile(1.0 / 64));
    CHECK(a6 == doctest::Approx(a1).epsilon(1e-6));
    // independent estimate: the first-order term of the quintic-order smoothstep
    // fall on [1, 2] is max t |m'(t)|, evaluated by a fine analytic scan
    double first = 0.0;
    for (int k = 0; k <= 200000; ++k) {
      const double x = k / 200000.0, t = 1.0 + x;
      const double h = 1e-6;
      const double d = (smoothstep5(x + h) - smoothstep5(x - h)) / (2 * h);
      first = std::max(first, t * d);
    }
    CHECK(smoothness_terms(make_bump_profile(1.0)).terms[1] == doctest::Approx(first).epsilon(1e-4));
  }

  TEST_CASE("layer decomposition sums back to m") {
    const auto m = make_bump_profile(1.0);
    const auto layers = layer_decomposition(m, 4);
    REQUIRE(layers.layers.size() == 5);
    double worst = 0.0;
    for (int k = 0; k <= 20000; ++k) {
      const double t = 2.5 * k / 20000;
      double s = 0.0;
      for (const auto& l : layers.layers) s += l(t);
      worst = std::max(worst, std::abs(s - m(t)));
    }
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("first layer equals m where m is flat at one half") {
    for (const auto& m : {make_bump_profile(1.0), MultiplierProfile::plateau(0.75, 2.0)}) {
      const auto layers = layer_decomposition(m, 3);
      for (int k = 0; k <= 1000; ++k) {
        const double t = 0.5 * k / 1000;
        CHECK(layers.layers[0](t) == doctest::Approx(m(t)).epsilon(1e-15));
      }
    }
  }

  TEST_CASE("deep layers are capped by m at the previous knot") {
    // Layer i lives where the knots 2^-i and 2^-(i-1) move the argument, so its
    // size is bounded by m there. The first layer is the whole capped profile.
    const auto m = MultiplierProfile::plateau(0.0, 2.0);
    const auto layers = layer_decomposition(m, 6);
    for (int i = 2; i <= 6; ++i) {
      double sup = 0.0;
      for (int k = 0; k <= 40000; ++k) sup = std::max(sup, std::abs(layers.layers[i - 1](2.0 * k / 40000)));
      CHECK(sup <= m(std::ldexp(1.0, -i + 1)) + 1e-12);
    }
  }

  TEST_CASE("layer decomposition rejects unsuitable profiles") {
    CHECK_THROWS_AS(layer_decomposition(make_bump_profile(1.0), 0), std::invalid_argument);
    const auto rising = MultiplierProfile::custom("rising", [](double t) { return t < 1 ? 0.5 + 0.5 * t : 0.0; }, 1.5);
    CHECK_THROWS_AS(layer_decomposition(rising, 3), std::invalid_argument);
  }

  TEST_CASE("hyperbolic symbol values") {
    const auto m = make_bump_profile(1.0);
    const auto s = hyperbolic_symbol(1.0, 1.0, m, 4);
    CHECK(s.at(1, 1) == m(1.0));
    CHECK(s.at(2, 3) == 0.0);
    CHECK(s.at(-2, 3) == 0.0);
    CHECK(s.at(0, 5) == 1.0);

    // beta = 0: depends on xi only
    const auto s0 = hyperbolic_symbol(0.7, 0.0, m, 4);
    for (int xi = -8; xi < 8; ++xi)
      for (int eta = -8; eta < 8; ++eta) CHECK(s0.at(xi, eta) == m(0.7 * std::abs(xi)));

    // lambda large enough: zero off the axes
    const auto big = hyperbolic_symbol(5.0, 1.0, m, 4);
    for (int xi = -8; xi < 8; ++xi)
      for (int eta = -8; eta < 8; ++eta)
        if (xi != 0 && eta != 0) CHECK(big.at(xi, eta) == 0.0);

    // orientation swaps the exponent
    const auto a1 = hyperbolic_argument(2.0, 4, Orientation::first_scaled);
    const auto a2 = hyperbolic_argument(2.0, 4, Orientation::second_scaled);
    CHECK(a1.at(3, 2) == 12.0);
    CHECK(a2.at(3, 2) == 18.0);

    // beta < 0 excludes the zero row of the scaled variable
    const auto neg = hyperbolic_argument(-1.0, 4);
    CHECK(neg.at(3, 0) == -1.0);
    CHECK(neg.at(3, 2) == 1.5);
    CHECK(hyperbolic_symbol(1.0, -1.0, m, 4).at(3, 0) == 0.0);
  }

  TEST_CASE("Pi_beta masks") {
    const auto one = pi_beta_mask(1.0, 4);
    for (int xi = -8; xi < 8; ++xi)
      for (int eta = -8; eta < 8; ++eta) CHECK(one.at(xi, eta) == (std::abs(eta) <= 1 ? 1.0 : 0.0));
    const auto neg = pi_beta_mask(-1.0, 4);
    for (int xi = -8; xi < 8; ++xi)
      for (int eta = -8; eta < 8; ++eta) CHECK(neg.at(xi, eta) == (eta != 0 ? 1.0 : 0.0));
    const auto zero = pi_beta_mask(0.0, 4);
    for (double v : zero.values()) CHECK(v == 1.0);
  }
}
