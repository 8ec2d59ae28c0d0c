#include "hxc/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hxc/rng.hpp"

namespace hxc {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int k) {
#ifdef _OPENMP
  if (k > 0) omp_set_num_threads(k);
#else
  (void)k;
#endif
}

int grid_size(int n_log2) {
  if (n_log2 < 3 || n_log2 > 14)
    throw std::invalid_argument("grid n_log2 must be in [3, 14], got " + std::to_string(n_log2));
  return 1 << n_log2;
}

namespace {

void check_same_grid(int a, int b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": grid size mismatch");
}

// FFTW planning is not thread-safe; execution on fresh arrays is.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

const PlanPair& plans_for(int n_log2) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n_log2);
  if (it != cache.end()) return it->second;
  const int n = 1 << n_log2;
  fftw_complex* scratch = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_2d(n, n, scratch, scratch, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft_2d(n, n, scratch, scratch, FFTW_BACKWARD, flags);
  fftw_free(scratch);
  if (!p.forward || !p.backward) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(n_log2, p).first->second;
}

fftw_complex* as_fftw(std::span<cplx> data) { return reinterpret_cast<fftw_complex*>(data.data()); }

} // namespace

// ---------------------------------------------------------------- fields

SampledField::SampledField(int n_log2)
    : n_log2_(n_log2), n_(grid_size(n_log2)), data_(static_cast<std::size_t>(n_) * n_) {}

SampledField::SampledField(int n_log2, std::vector<cplx> samples)
    : n_log2_(n_log2), n_(grid_size(n_log2)), data_(std::move(samples)) {
  if (data_.size() != static_cast<std::size_t>(n_) * n_)
    throw std::invalid_argument("SampledField: expected N^2 samples");
}

SampledField& SampledField::operator+=(const SampledField& other) {
  check_same_grid(n_, other.n_, "SampledField +=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

SampledField& SampledField::operator-=(const SampledField& other) {
  check_same_grid(n_, other.n_, "SampledField -=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

SampledField& SampledField::operator*=(cplx c) {
  for (auto& v : data_) v *= c;
  return *this;
}

SampledField operator+(SampledField a, const SampledField& b) { return a += b; }
SampledField operator-(SampledField a, const SampledField& b) { return a -= b; }
SampledField operator*(cplx c, SampledField a) { return a *= c; }

SpectralField::SpectralField(int n_log2)
    : n_log2_(n_log2), n_(grid_size(n_log2)), data_(static_cast<std::size_t>(n_) * n_) {}

SpectralField::SpectralField(int n_log2, std::vector<cplx> coeffs)
    : n_log2_(n_log2), n_(grid_size(n_log2)), data_(std::move(coeffs)) {
  if (data_.size() != static_cast<std::size_t>(n_) * n_)
    throw std::invalid_argument("SpectralField: expected N^2 coefficients");
}

SymbolGrid::SymbolGrid(int n_log2, double fill)
    : n_log2_(n_log2), n_(grid_size(n_log2)), data_(static_cast<std::size_t>(n_) * n_, fill) {}

SymbolGrid::SymbolGrid(int n_log2, std::vector<double> values)
    : n_log2_(n_log2), n_(grid_size(n_log2)), data_(std::move(values)) {
  if (data_.size() != static_cast<std::size_t>(n_) * n_)
    throw std::invalid_argument("SymbolGrid: expected N^2 values");
}

double SymbolGrid::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

SymbolGrid& SymbolGrid::operator*=(const SymbolGrid& other) {
  check_same_grid(n_, other.n_, "SymbolGrid *=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] *= other.data_[k];
  return *this;
}

// ---------------------------------------------------------------- transforms

void forward_transform_inplace(int n_log2, std::span<cplx> data) {
  const auto& p = plans_for(n_log2);
  fftw_execute_dft(p.forward, as_fftw(data), as_fftw(data));
  const double scale = std::ldexp(1.0, -2 * n_log2);
  for (auto& v : data) v *= scale;
}

void inverse_transform_inplace(int n_log2, std::span<cplx> data) {
  const auto& p = plans_for(n_log2);
  fftw_execute_dft(p.backward, as_fftw(data), as_fftw(data));
}

SpectralField forward_transform(const SampledField& f) {
  std::vector<cplx> buf(f.samples().begin(), f.samples().end());
  forward_transform_inplace(f.n_log2(), buf);
  return SpectralField(f.n_log2(), std::move(buf));
}

SampledField inverse_transform(const SpectralField& coeffs) {
  std::vector<cplx> buf(coeffs.coeffs().begin(), coeffs.coeffs().end());
  inverse_transform_inplace(coeffs.n_log2(), buf);
  return SampledField(coeffs.n_log2(), std::move(buf));
}

// ---------------------------------------------------------------- norms

double lp_mean_norm(std::span<const cplx> samples, double p) {
  if (!std::isfinite(p) || p < 1.0) throw std::invalid_argument("lp norm: p must be finite and >= 1");
  if (samples.empty()) return 0.0;
  // scale by the max entry so large p cannot overflow
  double peak = 0.0;
  for (const auto& v : samples) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  double acc = 0.0;
  if (p == 2.0) {
    for (const auto& v : samples) acc += std::norm(v / peak);
  } else {
    for (const auto& v : samples) acc += std::pow(std::abs(v) / peak, p);
  }
  return peak * std::pow(acc / static_cast<double>(samples.size()), 1.0 / p);
}

double lp_norm(const SampledField& f, double p) {
  if (!std::isfinite(p) || p <= 1.0) throw std::invalid_argument("lp_norm: p must be finite and > 1");
  return lp_mean_norm(f.samples(), p);
}

cplx inner(const SampledField& a, const SampledField& b) {
  check_same_grid(a.size(), b.size(), "inner");
  cplx acc = 0.0;
  const auto sa = a.samples();
  const auto sb = b.samples();
  for (std::size_t k = 0; k < sa.size(); ++k) acc += sa[k] * std::conj(sb[k]);
  return acc / static_cast<double>(sa.size());
}

double relative_l2_error(const SampledField& a, const SampledField& b) {
  check_same_grid(a.size(), b.size(), "relative_l2_error");
  double num = 0.0, den = 0.0;
  const auto sa = a.samples();
  const auto sb = b.samples();
  for (std::size_t k = 0; k < sa.size(); ++k) {
    num += std::norm(sa[k] - sb[k]);
    den += std::norm(sb[k]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num / static_cast<double>(sa.size()));
}

double max_abs_diff(const SampledField& a, const SampledField& b) {
  check_same_grid(a.size(), b.size(), "max_abs_diff");
  double m = 0.0;
  const auto sa = a.samples();
  const auto sb = b.samples();
  for (std::size_t k = 0; k < sa.size(); ++k) m = std::max(m, std::abs(sa[k] - sb[k]));
  return m;
}

// ---------------------------------------------------------------- multipliers

void multiply_spectrum(SpectralField& coeffs, const SymbolGrid& symbol) {
  check_same_grid(coeffs.size(), symbol.size(), "multiply_spectrum");
  auto c = coeffs.coeffs();
  const auto s = symbol.values();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= s[k];
}

SampledField apply_fixed_multiplier(const SampledField& f, const SymbolGrid& symbol) {
  check_same_grid(f.size(), symbol.size(), "apply_fixed_multiplier");
  auto spec = forward_transform(f);
  multiply_spectrum(spec, symbol);
  return inverse_transform(spec);
}

// ---------------------------------------------------------------- generators

SampledField random_field(int n_log2, std::uint64_t seed) {
  SampledField f(n_log2);
  Rng rng(seed);
  for (auto& v : f.samples()) {
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    v = {re, im};
  }
  return f;
}

SampledField random_bandlimited_field(int n_log2, int band, std::uint64_t seed) {
  SpectralField spec(n_log2);
  const int n = spec.size();
  Rng rng(seed);
  for (int kx = 0; kx < n; ++kx) {
    for (int ky = 0; ky < n; ++ky) {
      const double re = rng.uniform(-1.0, 1.0);
      const double im = rng.uniform(-1.0, 1.0);
      const int xi = frequency_of_index(kx, n);
      const int eta = frequency_of_index(ky, n);
      if (std::abs(xi) <= band && std::abs(eta) <= band) spec(kx, ky) = {re, im};
    }
  }
  return inverse_transform(spec);
}

} // namespace hxc
