#include "hxc/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "hxc/rng.hpp"

namespace hxc {

std::string to_string(RegularityKind k) {
  switch (k) {
  case RegularityKind::constant: return "constant";
  case RegularityKind::lip_x: return "lip_x";
  case RegularityKind::lip_2d: return "lip_2d";
  case RegularityKind::dyadic_of_lipschitz: return "dyadic_of_lipschitz";
  }
  return "unknown";
}

RegularityKind regularity_from_string(const std::string& s) {
  if (s == "constant") return RegularityKind::constant;
  if (s == "lip_x") return RegularityKind::lip_x;
  if (s == "lip_2d") return RegularityKind::lip_2d;
  if (s == "dyadic_of_lipschitz" || s == "dyadic") return RegularityKind::dyadic_of_lipschitz;
  throw std::invalid_argument("unknown linearizer kind '" + s + "'");
}

namespace {

struct AxisConstants {
  double x = 0.0;
  double y = 0.0;
};

// N * max adjacent difference along each axis, wrap-around included.
AxisConstants measure_axis_constants(const std::vector<double>& v, int n) {
  AxisConstants c;
  for (int i = 0; i < n; ++i) {
    const int ip = (i + 1) % n;
    for (int j = 0; j < n; ++j) {
      const int jp = (j + 1) % n;
      const double here = v[static_cast<std::size_t>(i) * n + j];
      c.x = std::max(c.x, std::abs(v[static_cast<std::size_t>(ip) * n + j] - here));
      c.y = std::max(c.y, std::abs(v[static_cast<std::size_t>(i) * n + jp] - here));
    }
  }
  c.x *= n;
  c.y *= n;
  return c;
}

void fill_measured(LinearizerField& f) {
  const auto& src = f.internal.empty() ? f.values : f.internal;
  const auto c = measure_axis_constants(src, f.size());
  f.measured_lipschitz_x = c.x;
  // staircase path plus Cauchy-Schwarz: a Euclidean constant on the grid
  f.measured_lipschitz_2d = std::hypot(c.x, c.y);
}

std::vector<cplx> twiddles(int n) {
  std::vector<cplx> w(n);
  for (int k = 0; k < n; ++k) w[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
  return w;
}

// Random trigonometric series of band K on the grid.
std::vector<double> random_series(int n, int band, std::uint64_t seed) {
  Rng rng(seed);
  const auto w = twiddles(n);
  std::vector<double> g(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = -band; k <= band; ++k) {
    for (int l = -band; l <= band; ++l) {
      if (k == 0 && l == 0) continue;
      const double damp = 1.0 / (1.0 + k * k + l * l);
      const double a = rng.uniform(-1.0, 1.0) * damp;
      const double b = rng.uniform(-1.0, 1.0) * damp;
      for (int i = 0; i < n; ++i) {
        const long long ki = static_cast<long long>(k) * i;
        for (int j = 0; j < n; ++j) {
          long long idx = (ki + static_cast<long long>(l) * j) % n;
          if (idx < 0) idx += n;
          const cplx e = w[static_cast<std::size_t>(idx)];
          g[static_cast<std::size_t>(i) * n + j] += a * e.real() + b * e.imag();
        }
      }
    }
  }
  return g;
}

bool is_power_of_two(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return false;
  int e = 0;
  return std::frexp(v, &e) == 0.5;
}

double torus_gap(int a, int b, int n, bool periodic) {
  const int d = std::abs(a - b);
  return static_cast<double>(periodic ? std::min(d, n - d) : d) / n;
}

} // namespace

// ---------------------------------------------------------------- field

double LinearizerField::min_value() const { return *std::min_element(values.begin(), values.end()); }
double LinearizerField::max_value() const { return *std::max_element(values.begin(), values.end()); }

LinearizerField LinearizerField::transposed() const {
  const int n = size();
  auto flip = [n](const std::vector<double>& src) {
    std::vector<double> out(src.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j) * n + i] = src[static_cast<std::size_t>(i) * n + j];
    return out;
  };
  LinearizerField t = *this;
  t.values = flip(values);
  if (!internal.empty()) t.internal = flip(internal);
  fill_measured(t);
  return t;
}

LinearizerField LinearizerField::from_values(int n_log2, std::vector<double> values, RegularityKind declared) {
  const int n = grid_size(n_log2);
  if (values.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("LinearizerField: expected N^2 values");
  for (double v : values)
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("LinearizerField: values must be finite and >= 0");
  LinearizerField f;
  f.n_log2 = n_log2;
  f.values = std::move(values);
  f.spec.kind = declared;
  fill_measured(f);
  return f;
}

LinearizerField LinearizerField::constant(int n_log2, double value) {
  const int n = grid_size(n_log2);
  auto f = from_values(n_log2, std::vector<double>(static_cast<std::size_t>(n) * n, value));
  f.spec.value = value;
  return f;
}

// ---------------------------------------------------------------- generation

LinearizerField generate_linearizer(const LinearizerSpec& spec, std::uint64_t seed, int n_log2) {
  const int n = grid_size(n_log2);
  const std::size_t count = static_cast<std::size_t>(n) * n;
  if (spec.kind == RegularityKind::constant) {
    if (!std::isfinite(spec.value) || spec.value < 0.0)
      throw std::invalid_argument("constant linearizer: value must be finite and >= 0");
    auto f = LinearizerField::constant(n_log2, spec.value);
    f.spec = spec;
    f.seed = seed;
    return f;
  }
  if (!(spec.lipschitz > 0.0) || !std::isfinite(spec.lipschitz))
    throw std::invalid_argument("linearizer: Lipschitz constant must be positive");
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude))
    throw std::invalid_argument("linearizer: amplitude must be finite and >= 0");
  if (spec.modes < 1) throw std::invalid_argument("linearizer: modes must be >= 1");

  const int band = std::min(spec.modes, std::max(1, n / 4));
  const auto g = random_series(n, band, seed);
  const auto c = measure_axis_constants(g, n);
  const auto [gmin_it, gmax_it] = std::minmax_element(g.begin(), g.end());
  const double gmin = *gmin_it, span = *gmax_it - *gmin_it;

  const double measured = spec.kind == RegularityKind::lip_x ? c.x : std::hypot(c.x, c.y);
  const double target = 0.95 * spec.lipschitz;
  double scale = measured > 0.0 ? target / measured : 0.0;
  if (spec.amplitude > 0.0) {
    const double wanted = span > 0.0 ? spec.amplitude / span : 0.0;
    if (wanted * measured > target * (1.0 + 1e-12))
      throw std::invalid_argument("linearizer: amplitude " + std::to_string(spec.amplitude) +
                                  " is incompatible with Lipschitz constant " + std::to_string(spec.lipschitz) +
                                  " at the 5% margin");
    scale = wanted;
  }

  double offset = spec.base;
  if (spec.kind == RegularityKind::lip_2d) offset = spec.floor < 0.0 ? spec.lipschitz * spec.lipschitz : spec.floor;
  if (!std::isfinite(offset) || offset < 0.0) throw std::invalid_argument("linearizer: floor/base must be >= 0");
  if (spec.kind == RegularityKind::lip_2d && offset < spec.lipschitz * spec.lipschitz * (1.0 - 1e-15))
    throw std::invalid_argument("lip_2d linearizer: floor must be at least L^2");
  if (spec.kind == RegularityKind::dyadic_of_lipschitz && !(offset > 0.0))
    throw std::invalid_argument("dyadic linearizer: base must be positive");

  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) v[k] = offset + scale * (g[k] - gmin);

  LinearizerField f;
  f.n_log2 = n_log2;
  f.spec = spec;
  if (spec.kind == RegularityKind::lip_2d) f.spec.floor = offset;
  f.seed = seed;
  if (spec.kind == RegularityKind::dyadic_of_lipschitz) {
    f.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) f.values[k] = std::ldexp(1.0, dyadic_level(v[k]));
    f.internal = std::move(v);
  } else {
    f.values = std::move(v);
  }
  fill_measured(f);
  return f;
}

std::string linearizer_sidecar_json(const LinearizerField& v) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(v.spec.kind);
  j["params"] = {{"value", v.spec.value},   {"lipschitz", v.spec.lipschitz}, {"base", v.spec.base},
                 {"floor", v.spec.floor},   {"amplitude", v.spec.amplitude}, {"modes", v.spec.modes},
                 {"n_log2", v.n_log2}};
  j["seed"] = v.seed;
  j["measured_constants"] = {{"lipschitz_x", v.measured_lipschitz_x},
                             {"lipschitz_2d", v.measured_lipschitz_2d},
                             {"min", v.min_value()},
                             {"max", v.max_value()}};
  return j.dump();
}

SampledField linearizer_as_field(const LinearizerField& v) {
  std::vector<cplx> s(v.values.begin(), v.values.end());
  return SampledField(v.n_log2, std::move(s));
}

// ---------------------------------------------------------------- verification

LipschitzReport verify_lipschitz(const LinearizerField& v, LipschitzMode mode, double lipschitz, bool periodic,
                                 std::uint64_t seed) {
  if (!(lipschitz > 0.0)) throw std::invalid_argument("verify_lipschitz: L must be positive");
  const int n = v.size();
  LipschitzReport rep;
  auto consider = [&](double ratio, int i, int j, int i2, int j2) {
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.witness = {i, j, i2, j2};
    }
  };

  const std::vector<double>* field = &v.values;
  if (mode == LipschitzMode::dyadic) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!is_power_of_two(v(i, j))) {
          rep.pass = false;
          rep.witness = {i, j, i, j};
          return rep;
        }
    if (v.internal.empty()) return rep;
    field = &v.internal;
    for (std::size_t k = 0; k < v.values.size(); ++k) {
      if (v.values[k] != std::ldexp(1.0, dyadic_level(v.internal[k]))) {
        rep.pass = false;
        const int i = static_cast<int>(k / n), j = static_cast<int>(k % n);
        rep.witness = {i, j, i, j};
        return rep;
      }
    }
  }
  auto at = [&](int i, int j) { return (*field)[static_cast<std::size_t>(i) * n + j]; };
  const double step = 1.0 / n;
  const bool two_d = mode != LipschitzMode::lip_x;
  // lip_2d uses max(L^2, L d); the dyadic mode checks the inner v against L d
  auto bound = [&](double d) {
    return mode == LipschitzMode::lip_2d ? std::max(lipschitz * lipschitz, lipschitz * d) : lipschitz * d;
  };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i + 1 < n || periodic) {
        const int ip = (i + 1) % n;
        consider(std::abs(at(ip, j) - at(i, j)) / bound(step), i, j, ip, j);
      }
      if (two_d && (j + 1 < n || periodic)) {
        const int jp = (j + 1) % n;
        consider(std::abs(at(i, jp) - at(i, j)) / bound(step), i, j, i, jp);
      }
    }
  }
  if (two_d) {
    Rng rng(seed);
    for (int s = 0; s < 10000; ++s) {
      const int i = static_cast<int>(rng.below(n)), j = static_cast<int>(rng.below(n));
      const int i2 = static_cast<int>(rng.below(n)), j2 = static_cast<int>(rng.below(n));
      if (i == i2 && j == j2) continue;
      const double d = std::hypot(torus_gap(i, i2, n, periodic), torus_gap(j, j2, n, periodic));
      consider(std::abs(at(i2, j2) - at(i, j)) / bound(d), i, j, i2, j2);
    }
  }
  if (mode == LipschitzMode::lip_2d) {
    const double floor = lipschitz * lipschitz;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (v(i, j) < floor * (1.0 - 1e-12)) {
          rep.pass = false;
          rep.witness = {i, j, i, j};
          return rep;
        }
  }
  rep.pass = rep.worst_ratio <= 1.0 + 1e-12;
  return rep;
}

// ---------------------------------------------------------------- dyadic rounding

int dyadic_level(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("dyadic_level: argument must be positive and finite");
  int e = 0;
  std::frexp(lambda, &e);  // lambda = mant * 2^e with mant in [1/2, 1)
  return e - 1;
}

double dyadic_round_up(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("dyadic_round_up: lambda must be positive and finite");
  // smallest j with 2^j > lambda is floor(log2 lambda) + 1
  return std::ldexp(1.0, dyadic_level(lambda) + 3);
}

// ---------------------------------------------------------------- buckets

std::vector<bool> BucketDecomposition::mask(std::size_t b) const {
  const std::size_t n = std::size_t{1} << n_log2;
  std::vector<bool> m(n * n, false);
  for (auto p : buckets.at(b).points) m[p] = true;
  return m;
}

bool BucketDecomposition::is_partition() const {
  const std::size_t n = std::size_t{1} << n_log2;
  std::vector<int> hits(n * n, 0);
  for (const auto& b : buckets)
    for (auto p : b.points) {
      if (p >= hits.size()) return false;
      ++hits[p];
    }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

namespace {

void check_values(const LinearizerField& v) {
  for (double x : v.values)
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("linearizer values must be finite and >= 0");
}

} // namespace

BucketDecomposition level_sets(const LinearizerField& v) {
  check_values(v);
  BucketDecomposition out;
  out.n_log2 = v.n_log2;
  Bucket zero;
  zero.zero = true;
  std::map<int, Bucket> by_level;
  for (std::size_t k = 0; k < v.values.size(); ++k) {
    const double x = v.values[k];
    if (x == 0.0) {
      zero.points.push_back(static_cast<std::uint32_t>(k));
      continue;
    }
    const int j = dyadic_level(x);
    auto& b = by_level[j];
    b.level = j;
    b.key = std::ldexp(1.0, j);
    b.points.push_back(static_cast<std::uint32_t>(k));
  }
  if (!zero.points.empty()) out.buckets.push_back(std::move(zero));
  for (auto& [j, b] : by_level) out.buckets.push_back(std::move(b));
  return out;
}

BucketDecomposition exact_buckets(const LinearizerField& v) {
  check_values(v);
  BucketDecomposition out;
  out.n_log2 = v.n_log2;
  std::map<double, Bucket> by_value;
  for (std::size_t k = 0; k < v.values.size(); ++k) {
    const double x = v.values[k];
    auto& b = by_value[x];
    b.key = x;
    b.zero = x == 0.0;
    b.level = x > 0.0 ? dyadic_level(x) : 0;
    b.points.push_back(static_cast<std::uint32_t>(k));
  }
  for (auto& [x, b] : by_value) out.buckets.push_back(std::move(b));
  return out;
}

LinearizerField dyadic_quantized(const LinearizerField& v) {
  check_values(v);
  LinearizerField q = v;
  for (auto& x : q.values)
    if (x > 0.0) x = std::ldexp(1.0, dyadic_level(x));
  q.internal.clear();
  fill_measured(q);
  return q;
}

// ---------------------------------------------------------------- operators

namespace {

void check_grids(const SampledField& f, const LinearizerField& v, const char* what) {
  if (f.n_log2() != v.n_log2 || v.values.size() != f.count())
    throw std::invalid_argument(std::string(what) + ": grid size mismatch");
}

// Frequencies where the symbol can be nonzero, sorted by hyperbolic argument.
struct SymbolSupport {
  std::vector<std::uint32_t> index;  // flat spectral index kx * N + ky
  std::vector<double> arg;           // hyperbolic argument, ascending
};

// Number of leading support entries with lambda * a <= radius (m vanishes beyond).
std::size_t active_count(const SymbolSupport& s, double lambda, double radius) {
  if (lambda == 0.0) return s.arg.size();
  return static_cast<std::size_t>(
      std::partition_point(s.arg.begin(), s.arg.end(), [&](double a) { return lambda * a <= radius; }) -
      s.arg.begin());
}

double fft_cost(int n_log2) {
  const double n2 = std::ldexp(1.0, 2 * n_log2);
  return n2 * (5.0 * 2 * n_log2 + 2.0);
}

// Direct separable DFT, independent of the FFT library.
SpectralField direct_forward(const SampledField& f, Exec exec) {
  const int n = f.size();
  const auto w = twiddles(n);
  std::vector<cplx> rows(f.count());
  // transform along j for every i
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (int i = 0; i < n; ++i) {
    for (int ky = 0; ky < n; ++ky) {
      cplx acc = 0.0;
      for (int j = 0; j < n; ++j) acc += f(i, j) * std::conj(w[static_cast<std::size_t>(j) * ky % n]);
      rows[static_cast<std::size_t>(i) * n + ky] = acc;
    }
  }
  SpectralField out(f.n_log2());
  const double scale = 1.0 / (static_cast<double>(n) * n);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (int kx = 0; kx < n; ++kx) {
    for (int ky = 0; ky < n; ++ky) {
      cplx acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += rows[static_cast<std::size_t>(i) * n + ky] * std::conj(w[static_cast<std::size_t>(i) * kx % n]);
      out(kx, ky) = acc * scale;
    }
  }
  return out;
}

} // namespace

SampledField apply_linearized_bruteforce(const SampledField& f, const LinearizerField& v, const MultiplierProfile& m,
                                         double beta, Orientation orient, bool truncate, Exec exec) {
  check_grids(f, v, "apply_linearized_bruteforce");
  check_values(v);
  const int n = f.size();
  const auto spec = direct_forward(f, exec);
  const auto arg = hyperbolic_argument(beta, f.n_log2(), orient);
  const auto mask = pi_beta_mask(beta, f.n_log2());
  const auto w = twiddles(n);
  const auto av = arg.values();
  const auto mv = mask.values();
  const auto fv = spec.coeffs();
  SampledField out(f.n_log2());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double lambda = v(i, j);
      cplx acc = 0.0;
      for (int kx = 0; kx < n; ++kx) {
        const std::size_t row = static_cast<std::size_t>(kx) * n;
        const long long phase_x = static_cast<long long>(i) * kx;
        for (int ky = 0; ky < n; ++ky) {
          const std::size_t k = row + ky;
          if (av[k] < 0.0) continue;
          const double weight = (truncate ? mv[k] : 1.0) * m(lambda * av[k]);
          if (weight == 0.0) continue;
          acc += weight * fv[k] * w[static_cast<std::size_t>((phase_x + static_cast<long long>(j) * ky) % n)];
        }
      }
      out(i, j) = acc;
    }
  }
  return out;
}

namespace {

SymbolSupport support_of(const SymbolGrid& argument) {
  const auto av = argument.values();
  std::vector<std::uint32_t> order;
  for (std::size_t k = 0; k < av.size(); ++k)
    if (av[k] >= 0.0) order.push_back(static_cast<std::uint32_t>(k));
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return av[x] < av[y]; });
  SymbolSupport s;
  s.index = std::move(order);
  s.arg.reserve(s.index.size());
  for (auto k : s.index) s.arg.push_back(av[k]);
  return s;
}

struct BucketPlan {
  const Bucket* bucket;
  std::size_t active;
  bool use_fft;
};

std::vector<BucketPlan> plan_buckets(const BucketDecomposition& dec, const SymbolSupport& supp, double radius,
                                     int n_log2) {
  std::vector<BucketPlan> plans;
  const double cutoff = fft_cost(n_log2);
  for (const auto& b : dec.buckets) {
    const std::size_t active = active_count(supp, b.key, radius);
    const double direct = static_cast<double>(b.points.size()) * static_cast<double>(active);
    plans.push_back({&b, active, direct > cutoff});
  }
  return plans;
}

void check_family(const SymbolFamily& fam, int n_log2, const char* what) {
  if (fam.argument.n_log2() != n_log2) throw std::invalid_argument(std::string(what) + ": symbol grid size mismatch");
  if (!fam.value) throw std::invalid_argument(std::string(what) + ": empty symbol family");
  if (!(fam.radius >= 0.0)) throw std::invalid_argument(std::string(what) + ": radius must be >= 0");
}

} // namespace

SymbolFamily hyperbolic_family(const MultiplierProfile& m, double beta, int n_log2, Orientation orient,
                               bool truncate) {
  auto argument = hyperbolic_argument(beta, n_log2, orient);
  if (truncate) {
    const auto mask = pi_beta_mask(beta, n_log2);
    auto av = argument.values();
    const auto mv = mask.values();
    for (std::size_t k = 0; k < av.size(); ++k)
      if (mv[k] == 0.0) av[k] = -1.0;
  }
  std::vector<double> args(argument.values().begin(), argument.values().end());
  auto value = [m, args = std::move(args)](double lambda, std::size_t k) { return m(lambda * args[k]); };
  return SymbolFamily{std::move(argument), m.support_radius(), std::move(value)};
}

SampledField apply_symbol_family(const SampledField& f, const LinearizerField& v, const SymbolFamily& family,
                                 Exec exec) {
  check_grids(f, v, "apply_symbol_family");
  const int n_log2 = f.n_log2();
  check_family(family, n_log2, "apply_symbol_family");
  const auto dec = exact_buckets(v);
  const int n = f.size();
  const auto spec = forward_transform(f);
  const auto fv = spec.coeffs();
  const auto supp = support_of(family.argument);
  const auto plans = plan_buckets(dec, supp, family.radius, n_log2);
  const auto w = twiddles(n);
  SampledField out(n_log2);
  auto ov = out.samples();

#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (std::size_t b = 0; b < plans.size(); ++b) {
    const auto& plan = plans[b];
    const double lambda = plan.bucket->key;
    if (plan.active == 0) continue;  // points keep the value 0
    if (plan.use_fft) {
      std::vector<cplx> buf(fv.size(), cplx{});
      for (std::size_t s = 0; s < plan.active; ++s) {
        const auto k = supp.index[s];
        buf[k] = family.value(lambda, k) * fv[k];
      }
      inverse_transform_inplace(n_log2, buf);
      for (auto p : plan.bucket->points) ov[p] = buf[p];
    } else {
      std::vector<cplx> coef(plan.active);
      std::vector<int> kx(plan.active), ky(plan.active);
      for (std::size_t s = 0; s < plan.active; ++s) {
        const auto k = supp.index[s];
        coef[s] = family.value(lambda, k) * fv[k];
        kx[s] = static_cast<int>(k / n);
        ky[s] = static_cast<int>(k % n);
      }
      for (auto p : plan.bucket->points) {
        const long long i = p / n, j = p % n;
        cplx acc = 0.0;
        for (std::size_t s = 0; s < plan.active; ++s)
          acc += coef[s] * w[static_cast<std::size_t>((i * kx[s] + j * ky[s]) % n)];
        ov[p] = acc;
      }
    }
  }
  return out;
}

SampledField apply_symbol_family_adjoint(const SampledField& g, const LinearizerField& v,
                                         const SymbolFamily& family, Exec exec) {
  check_grids(g, v, "apply_symbol_family_adjoint");
  const int n_log2 = g.n_log2();
  check_family(family, n_log2, "apply_symbol_family_adjoint");
  const auto dec = exact_buckets(v);
  const int n = g.size();
  const auto supp = support_of(family.argument);
  const auto plans = plan_buckets(dec, supp, family.radius, n_log2);
  const auto w = twiddles(n);
  const auto gv = g.samples();
  const std::size_t n2 = gv.size();
  const double scale = 1.0 / static_cast<double>(n2);

  // Buckets are reduced in a fixed number of contiguous chunks whose partial
  // spectra are summed in order, so the result does not depend on threads.
  const std::size_t memory_cap = std::max<std::size_t>(1, (std::size_t{1} << 26) / (n2 * sizeof(cplx)));
  const std::size_t chunks = std::max<std::size_t>(1, std::min({plans.size(), std::size_t{64}, memory_cap}));
  std::vector<std::vector<cplx>> partial(chunks);

#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (std::size_t c = 0; c < chunks; ++c) {
    auto& acc = partial[c];
    acc.assign(n2, cplx{});
    const std::size_t lo = plans.size() * c / chunks, hi = plans.size() * (c + 1) / chunks;
    std::vector<cplx> buf;
    for (std::size_t b = lo; b < hi; ++b) {
      const auto& plan = plans[b];
      if (plan.active == 0) continue;
      const double lambda = plan.bucket->key;
      if (plan.use_fft) {
        buf.assign(n2, cplx{});
        for (auto p : plan.bucket->points) buf[p] = gv[p];
        forward_transform_inplace(n_log2, buf);
        for (std::size_t s = 0; s < plan.active; ++s) {
          const auto k = supp.index[s];
          acc[k] += family.value(lambda, k) * buf[k];
        }
      } else {
        for (std::size_t s = 0; s < plan.active; ++s) {
          const auto k = supp.index[s];
          const long long kx = k / n, ky = k % n;
          cplx sum = 0.0;
          for (auto p : plan.bucket->points) {
            const long long i = p / n, j = p % n;
            sum += gv[p] * std::conj(w[static_cast<std::size_t>((i * kx + j * ky) % n)]);
          }
          acc[k] += family.value(lambda, k) * (sum * scale);
        }
      }
    }
  }

  std::vector<cplx> total(n2, cplx{});
  for (const auto& part : partial)
    for (std::size_t k = 0; k < n2; ++k) total[k] += part[k];
  inverse_transform_inplace(n_log2, total);
  return SampledField(n_log2, std::move(total));
}

SampledField apply_linearized_bucketed(const SampledField& f, const LinearizerField& v, const MultiplierProfile& m,
                                       double beta, Quantize quantize, Orientation orient, bool truncate,
                                       Exec exec) {
  check_grids(f, v, "apply_linearized_bucketed");
  const auto fam = hyperbolic_family(m, beta, f.n_log2(), orient, truncate);
  return apply_symbol_family(f, quantize == Quantize::dyadic ? dyadic_quantized(v) : v, fam, exec);
}

SampledField apply_linearized_adjoint(const SampledField& g, const LinearizerField& v, const MultiplierProfile& m,
                                      double beta, Orientation orient, bool truncate, Exec exec) {
  check_grids(g, v, "apply_linearized_adjoint");
  return apply_symbol_family_adjoint(g, v, hyperbolic_family(m, beta, g.n_log2(), orient, truncate), exec);
}

SampledField maximal_over_scales(const SampledField& f, const MultiplierProfile& m, double beta, double t_min,
                                 double t_max, int refine) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || !std::isfinite(t_max))
    throw std::invalid_argument("maximal_over_scales: need 0 < t_min <= t_max < inf");
  if (refine != 1 && refine != 4) throw std::invalid_argument("maximal_over_scales: refine must be 1 or 4");
  const auto spec = forward_transform(f);
  const auto arg = hyperbolic_argument(beta, f.n_log2(), Orientation::first_scaled);
  SampledField out(f.n_log2());
  auto ov = out.samples();
  for (int k = 0;; ++k) {
    const double t = t_min * std::exp2(static_cast<double>(k) / refine);
    if (t > t_max * (1.0 + 1e-12)) break;
    SpectralField s = spec;
    multiply_spectrum(s, hyperbolic_symbol_from(t, m, arg));
    const auto tf = inverse_transform(s);
    const auto tv = tf.samples();
    for (std::size_t p = 0; p < ov.size(); ++p) ov[p] = std::max(ov[p].real(), std::abs(tv[p]));
  }
  return out;
}

} // namespace hxc
