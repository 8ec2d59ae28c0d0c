#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "hxc/grid.hpp"

namespace hxc {

/// Raised for unreadable/unwritable artifacts and malformed field files.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// HXF1 layout: "HXF1", n_log2 as u32 LE, then N^2 (re, im) pairs of f64 LE,
// row-major in (i, j).

void write_hxf(std::ostream& out, const SampledField& f);
SampledField read_hxf(std::istream& in);

/// Spectral coefficients in transform storage order.
void write_hxf(std::ostream& out, const SpectralField& f);
SpectralField read_hxf_spectral(std::istream& in);

/// Symbol grids are stored as real parts with zero imaginary parts.
void write_hxf(std::ostream& out, const SymbolGrid& s);

void save_hxf(const std::filesystem::path& path, const SampledField& f);
SampledField load_hxf(const std::filesystem::path& path);

/// CSV rows "i,j,re,im" with a header line; doubles printed round-trip exact.
void write_field_csv(std::ostream& out, const SampledField& f);
SampledField read_field_csv(std::istream& in);

} // namespace hxc
