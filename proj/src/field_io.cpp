#include "hxc/field_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace hxc {

namespace {

constexpr std::array<char, 4> kMagic{'H', 'X', 'F', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int k = 0; k < 4; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xFFu);
  out.write(b.data(), 4);
}

void put_f64(std::ostream& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  std::array<char, 8> b{};
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xFFu);
  out.write(b.data(), 8);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw IoError("HXF1: truncated header");
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
  return v;
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw IoError("HXF1: truncated payload");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return std::bit_cast<double>(v);
}

void write_payload(std::ostream& out, int n_log2, std::span<const cplx> data) {
  out.write(kMagic.data(), 4);
  put_u32(out, static_cast<std::uint32_t>(n_log2));
  for (const auto& v : data) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  if (!out) throw IoError("HXF1: write failed");
}

std::pair<int, std::vector<cplx>> read_payload(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) throw IoError("HXF1: bad magic");
  const auto n_log2 = static_cast<int>(get_u32(in));
  if (n_log2 < 3 || n_log2 > 14) throw IoError("HXF1: unsupported n_log2");
  const std::size_t count = std::size_t{1} << (2 * n_log2);
  std::vector<cplx> data(count);
  for (auto& v : data) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    v = {re, im};
  }
  return {n_log2, std::move(data)};
}

} // namespace

void write_hxf(std::ostream& out, const SampledField& f) { write_payload(out, f.n_log2(), f.samples()); }

SampledField read_hxf(std::istream& in) {
  auto [n_log2, data] = read_payload(in);
  return SampledField(n_log2, std::move(data));
}

void write_hxf(std::ostream& out, const SpectralField& f) { write_payload(out, f.n_log2(), f.coeffs()); }

SpectralField read_hxf_spectral(std::istream& in) {
  auto [n_log2, data] = read_payload(in);
  return SpectralField(n_log2, std::move(data));
}

void write_hxf(std::ostream& out, const SymbolGrid& s) {
  std::vector<cplx> data(s.values().begin(), s.values().end());
  write_payload(out, s.n_log2(), data);
}

void save_hxf(const std::filesystem::path& path, const SampledField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_hxf(out, f);
}

SampledField load_hxf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_hxf(in);
}

namespace {

std::string shortest(double d) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError("CSV: bad number '" + std::string(s) + "'");
  return v;
}

} // namespace

void write_field_csv(std::ostream& out, const SampledField& f) {
  out << "i,j,re,im\n";
  const int n = f.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out << i << ',' << j << ',' << shortest(f(i, j).real()) << ',' << shortest(f(i, j).imag()) << '\n';
  if (!out) throw IoError("CSV: write failed");
}

SampledField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "i,j,re,im") throw IoError("CSV: missing header");
  std::vector<std::array<double, 4>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 4> r{};
    std::size_t start = 0;
    for (int c = 0; c < 4; ++c) {
      const auto end = c < 3 ? line.find(',', start) : line.size();
      if (end == std::string::npos) throw IoError("CSV: expected 4 columns");
      r[c] = parse_double(std::string_view(line).substr(start, end - start));
      start = end + 1;
    }
    rows.push_back(r);
  }
  const auto count = rows.size();
  int n_log2 = 0;
  while ((std::size_t{1} << (2 * n_log2)) < count) ++n_log2;
  if ((std::size_t{1} << (2 * n_log2)) != count) throw IoError("CSV: row count is not N^2");
  SampledField f(n_log2);
  const int n = f.size();
  std::vector<bool> seen(count, false);
  for (const auto& r : rows) {
    const auto i = static_cast<int>(r[0]);
    const auto j = static_cast<int>(r[1]);
    if (i < 0 || j < 0 || i >= n || j >= n || i != r[0] || j != r[1]) throw IoError("CSV: bad index");
    const auto k = static_cast<std::size_t>(i) * n + j;
    if (seen[k]) throw IoError("CSV: duplicate index");
    seen[k] = true;
    f(i, j) = {r[2], r[3]};
  }
  return f;
}

} // namespace hxc
