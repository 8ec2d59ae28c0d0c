#include "hxc/report.hpp"

#include <cmath>
#include <cstdio>

#include "hxc/field_io.hpp"

namespace hxc {

JsonLinesLog::JsonLinesLog(const std::filesystem::path& path, std::string config_hash, std::uint64_t seed)
    : out_(path, std::ios::binary | std::ios::trunc), hash_(std::move(config_hash)), seed_(seed) {
  if (!out_) throw IoError("cannot write " + path.string());
}

nlohmann::ordered_json JsonLinesLog::number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void JsonLinesLog::write(nlohmann::ordered_json j) {
  out_ << j.dump() << '\n';
  if (!out_) throw IoError("write failed on the event log");
}

void JsonLinesLog::check(const CheckRecord& r) {
  nlohmann::ordered_json j;
  j["check"] = r.check;
  j["grid"] = 1 << r.n_log2;
  j["beta"] = number(r.beta);
  j["epsilon"] = r.epsilon ? number(*r.epsilon) : nlohmann::ordered_json(nullptr);
  j["result"] = number(r.result);
  j["tolerance"] = number(r.tolerance);
  j["pass"] = r.pass;
  if (!r.witness.is_null()) j["witness"] = r.witness;
  j["config_hash"] = hash_;
  j["seed"] = seed_;
  write(std::move(j));
}

void JsonLinesLog::event(const std::string& name, nlohmann::ordered_json payload) {
  nlohmann::ordered_json j;
  j["event"] = name;
  j["data"] = std::move(payload);
  j["config_hash"] = hash_;
  j["seed"] = seed_;
  write(std::move(j));
}

std::string summary_line(const CheckRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %-32s result=%.6g tol=%.3g", r.pass ? "PASS" : "FAIL", r.check.c_str(), r.result,
                r.tolerance);
  return buf;
}

} // namespace hxc
