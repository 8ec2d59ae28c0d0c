#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hxc/exec.hpp"

namespace hxc {

using cplx = std::complex<double>;

/// Side length N = 2^n_log2 of a grid; throws std::invalid_argument unless 3 <= n_log2 <= 14.
int grid_size(int n_log2);

/// Signed integer frequency held at storage index k of an N-point axis, in [-N/2, N/2).
inline int frequency_of_index(int k, int n) { return k < n / 2 ? k : k - n; }
inline int index_of_frequency(int freq, int n) { return freq >= 0 ? freq : freq + n; }

/// Complex samples of a function on the periodic unit torus [0,1)^2.
///
/// Sample (i, j) holds the value at (i/N, j/N); storage is row-major with the
/// first variable x as the slow index.
class SampledField {
public:
  explicit SampledField(int n_log2);
  SampledField(int n_log2, std::vector<cplx> samples);

  template <class F>
  static SampledField from_function(int n_log2, F&& fn) {
    SampledField out(n_log2);
    const int n = out.size();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out(i, j) = fn(static_cast<double>(i) / n, static_cast<double>(j) / n);
    return out;
  }

  int n_log2() const { return n_log2_; }
  int size() const { return n_; }
  std::size_t count() const { return data_.size(); }

  cplx& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  const cplx& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

  std::span<cplx> samples() { return data_; }
  std::span<const cplx> samples() const { return data_; }

  SampledField& operator+=(const SampledField& other);
  SampledField& operator-=(const SampledField& other);
  SampledField& operator*=(cplx c);

  friend bool operator==(const SampledField&, const SampledField&) = default;

private:
  int n_log2_;
  int n_;
  std::vector<cplx> data_;
};

SampledField operator+(SampledField a, const SampledField& b);
SampledField operator-(SampledField a, const SampledField& b);
SampledField operator*(cplx c, SampledField a);

/// Fourier coefficients over integer frequencies (xi, eta) in [-N/2, N/2)^2.
/// Storage follows the transform order; use at() for signed frequencies.
class SpectralField {
public:
  explicit SpectralField(int n_log2);
  SpectralField(int n_log2, std::vector<cplx> coeffs);

  int n_log2() const { return n_log2_; }
  int size() const { return n_; }

  cplx& operator()(int kx, int ky) { return data_[static_cast<std::size_t>(kx) * n_ + ky]; }
  const cplx& operator()(int kx, int ky) const { return data_[static_cast<std::size_t>(kx) * n_ + ky]; }

  cplx& at(int xi, int eta) { return (*this)(index_of_frequency(xi, n_), index_of_frequency(eta, n_)); }
  const cplx& at(int xi, int eta) const {
    return (*this)(index_of_frequency(xi, n_), index_of_frequency(eta, n_));
  }

  std::span<cplx> coeffs() { return data_; }
  std::span<const cplx> coeffs() const { return data_; }

private:
  int n_log2_;
  int n_;
  std::vector<cplx> data_;
};

/// Real multiplier values over the frequency grid, same layout as SpectralField.
class SymbolGrid {
public:
  explicit SymbolGrid(int n_log2, double fill = 0.0);
  SymbolGrid(int n_log2, std::vector<double> values);

  template <class F>
  static SymbolGrid from_function(int n_log2, F&& fn) {
    SymbolGrid out(n_log2);
    const int n = out.size();
    for (int kx = 0; kx < n; ++kx)
      for (int ky = 0; ky < n; ++ky)
        out(kx, ky) = fn(frequency_of_index(kx, n), frequency_of_index(ky, n));
    return out;
  }

  int n_log2() const { return n_log2_; }
  int size() const { return n_; }

  double& operator()(int kx, int ky) { return data_[static_cast<std::size_t>(kx) * n_ + ky]; }
  double operator()(int kx, int ky) const { return data_[static_cast<std::size_t>(kx) * n_ + ky]; }
  double at(int xi, int eta) const { return (*this)(index_of_frequency(xi, n_), index_of_frequency(eta, n_)); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double max_abs() const;
  SymbolGrid& operator*=(const SymbolGrid& other);

private:
  int n_log2_;
  int n_;
  std::vector<double> data_;
};

/// Normalized DFT: F(xi,eta) = N^-2 sum f(i,j) e^{-2 pi i (i xi + j eta)/N}.
SpectralField forward_transform(const SampledField& f);

/// Exact inverse of forward_transform (no normalization on this side).
SampledField inverse_transform(const SpectralField& coeffs);

/// In-place variants on raw N*N buffers; used by the per-bucket kernels.
void forward_transform_inplace(int n_log2, std::span<cplx> data);
void inverse_transform_inplace(int n_log2, std::span<cplx> data);

/// Normalized l^p mean (N^-2 sum |f|^p)^{1/p}; p must be finite and > 1.
double lp_norm(const SampledField& f, double p);

/// Same as lp_norm but also accepts p = 1 (used by diagnostics, not operators).
double lp_mean_norm(std::span<const cplx> samples, double p);

/// Normalized inner product N^-2 sum a conj(b).
cplx inner(const SampledField& a, const SampledField& b);

/// ||a - b||_2 / ||b||_2 (or ||a||_2 when b vanishes).
double relative_l2_error(const SampledField& a, const SampledField& b);

/// Largest |a - b| entry.
double max_abs_diff(const SampledField& a, const SampledField& b);

/// T_m f with T_m f^ = symbol * f^.
SampledField apply_fixed_multiplier(const SampledField& f, const SymbolGrid& symbol);

/// Multiplies each spectral coefficient by the symbol, in place.
void multiply_spectrum(SpectralField& coeffs, const SymbolGrid& symbol);

/// Random field with independent uniform real and imaginary parts in [-1,1).
SampledField random_field(int n_log2, std::uint64_t seed);

/// Random field with energy only at frequencies max(|xi|,|eta|) <= band.
SampledField random_bandlimited_field(int n_log2, int band, std::uint64_t seed);

} // namespace hxc
