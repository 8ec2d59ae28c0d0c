#include "hxc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "hxc/field_io.hpp"

namespace hxc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& text, const char* what) {
  throw ConfigError("config key '" + key + "': cannot read '" + text + "' as " + what);
}

template <class T>
T parse_number(const std::string& key, const std::string& raw, const char* what) {
  const std::string text = trim(raw);
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) bad_value(key, raw, what);
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(value)) bad_value(key, raw, what);
  return value;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string t = trim(raw);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_value(key, raw, "a boolean");
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Key {
  std::string name;  // section.key
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class M>
Key int_key(std::string name, M member) {
  return {name, [member, name](ExperimentConfig& c, const std::string& s) { c.*member = parse_number<int>(name, s, "an integer"); },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

template <class M>
Key double_key(std::string name, M member) {
  return {name, [member, name](ExperimentConfig& c, const std::string& s) { c.*member = parse_number<double>(name, s, "a number"); },
          [member](const ExperimentConfig& c) { return fmt_double(c.*member); }};
}

template <class M>
Key string_key(std::string name, M member) {
  return {name, [member](ExperimentConfig& c, const std::string& s) { c.*member = trim(s); },
          [member](const ExperimentConfig& c) { return c.*member; }};
}

template <class M>
Key bool_key(std::string name, M member) {
  return {name, [member, name](ExperimentConfig& c, const std::string& s) { c.*member = parse_bool(name, s); },
          [member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

template <class T, class Parse, class Show>
Key enum_key(std::string name, T ExperimentConfig::*member, Parse parse, Show show) {
  return {name,
          [member, parse, name](ExperimentConfig& c, const std::string& s) {
            try {
              c.*member = parse(trim(s));
            } catch (const std::invalid_argument& e) {
              throw ConfigError("config key '" + name + "': " + e.what());
            }
          },
          [member, show](const ExperimentConfig& c) { return show(c.*member); }};
}

Orientation orientation_from(const std::string& s) {
  if (s == "first_scaled") return Orientation::first_scaled;
  if (s == "second_scaled") return Orientation::second_scaled;
  throw std::invalid_argument("unknown orientation '" + s + "'");
}

std::string orientation_name(Orientation o) {
  return o == Orientation::first_scaled ? "first_scaled" : "second_scaled";
}

Quantize quantize_from(const std::string& s) {
  if (s == "exact") return Quantize::exact;
  if (s == "dyadic") return Quantize::dyadic;
  throw std::invalid_argument("unknown quantize mode '" + s + "'");
}

const std::vector<Key>& key_table() {
  using C = ExperimentConfig;
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    t.push_back({"run.seed",
                 [](C& c, const std::string& s) { c.seed = parse_number<std::uint64_t>("run.seed", s, "an unsigned integer"); },
                 [](const C& c) { return std::to_string(c.seed); }});
    t.push_back(bool_key("run.reproducible", &C::reproducible));
    t.push_back(int_key("run.threads", &C::threads));
    t.push_back(int_key("grid.n_log2", &C::n_log2));
    t.push_back(string_key("profile.kind", &C::profile_kind));
    t.push_back(double_key("profile.epsilon", &C::epsilon));
    t.push_back(double_key("profile.inner", &C::inner));
    t.push_back(double_key("profile.outer", &C::outer));
    t.push_back({"linearizer.kind",
                 [](C& c, const std::string& s) {
                   try {
                     c.linearizer.kind = regularity_from_string(trim(s));
                   } catch (const std::invalid_argument& e) {
                     throw ConfigError(std::string("config key 'linearizer.kind': ") + e.what());
                   }
                 },
                 [](const C& c) { return to_string(c.linearizer.kind); }});
    auto lin_double = [](std::string name, double LinearizerSpec::*m) {
      return Key{name,
                 [m, name](C& c, const std::string& s) { c.linearizer.*m = parse_number<double>(name, s, "a number"); },
                 [m](const C& c) { return fmt_double(c.linearizer.*m); }};
    };
    t.push_back(lin_double("linearizer.value", &LinearizerSpec::value));
    t.push_back(lin_double("linearizer.lipschitz", &LinearizerSpec::lipschitz));
    t.push_back(lin_double("linearizer.base", &LinearizerSpec::base));
    t.push_back(lin_double("linearizer.floor", &LinearizerSpec::floor));
    t.push_back(lin_double("linearizer.amplitude", &LinearizerSpec::amplitude));
    t.push_back({"linearizer.modes",
                 [](C& c, const std::string& s) { c.linearizer.modes = parse_number<int>("linearizer.modes", s, "an integer"); },
                 [](const C& c) { return std::to_string(c.linearizer.modes); }});
    t.push_back(double_key("operator.beta", &C::beta));
    t.push_back(enum_key("operator.orientation", &C::orientation, orientation_from, orientation_name));
    t.push_back(bool_key("operator.truncate", &C::truncate));
    t.push_back(enum_key("operator.quantize", &C::quantize, quantize_from,
                         [](Quantize q) { return std::string(q == Quantize::exact ? "exact" : "dyadic"); }));
    t.push_back(string_key("field.kind", &C::field_kind));
    t.push_back(int_key("field.band", &C::band));
    t.push_back(enum_key("dyadic.variant", &C::dyadic_variant, dyadic_variant_from_string,
                         [](DyadicVariant v) { return to_string(v); }));
    t.push_back(double_key("dyadic.lipschitz", &C::dyadic_lipschitz));
    t.push_back(int_key("dyadic.depth", &C::dyadic_depth));
    t.push_back(enum_key("decompose.ladder", &C::ladder, ladder_from_string, [](LadderKind k) { return to_string(k); }));
    t.push_back(int_key("decompose.triples", &C::triples));
    t.push_back(string_key("normest.method", &C::method));
    t.push_back(double_key("normest.p", &C::p));
    t.push_back(int_key("normest.restarts", &C::restarts));
    t.push_back(double_key("normest.tol", &C::tol));
    t.push_back(int_key("normest.max_iter", &C::max_iter));
    t.push_back(int_key("normest.budget", &C::budget));
    t.push_back(int_key("normest.knots", &C::knots));
    t.push_back(double_key("normest.level_lo", &C::level_lo));
    t.push_back(double_key("normest.level_hi", &C::level_hi));
    t.push_back(double_key("normest.search_lipschitz", &C::search_lipschitz));
    t.push_back(string_key("normest.constraint", &C::constraint));
    t.push_back({"sweep.epsilons",
                 [](C& c, const std::string& s) {
                   c.epsilons.clear();
                   std::stringstream ss(s);
                   std::string item;
                   while (std::getline(ss, item, ','))
                     c.epsilons.push_back(parse_number<double>("sweep.epsilons", item, "a number list"));
                   if (c.epsilons.empty()) bad_value("sweep.epsilons", s, "a non-empty number list");
                 },
                 [](const C& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.epsilons.size(); ++i) out += (i ? "," : "") + fmt_double(c.epsilons[i]);
                   return out;
                 }});
    t.push_back(int_key("verify.cases", &C::cases));
    return t;
  }();
  return table;
}

} // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : key_table()) out.push_back(k.name);
  return out;
}

MultiplierProfile ExperimentConfig::profile() const {
  if (profile_kind == "bump") return MultiplierProfile::bump(epsilon);
  if (profile_kind == "plateau") return MultiplierProfile::plateau(inner, outer);
  throw ConfigError("config key 'profile.kind': unknown profile '" + profile_kind + "'");
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const auto& k : key_table()) out += k.name + " = " + k.get(*this) + "\n";
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig cfg;
  const auto& table = key_table();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config key '" + section + "' is outside any section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == full; });
      if (it == table.end()) throw ConfigError("unknown config key '" + full + "'");
      it->set(cfg, value.data());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  return parse_config(in);
}

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& key, const std::string& why) { throw ConfigError("config key '" + key + "': " + why); };
  if (c.n_log2 < 3 || c.n_log2 > 14) fail("grid.n_log2", "must be in [3, 14]");
  if (c.threads < 0) fail("run.threads", "must be >= 0");
  try {
    (void)c.profile();
  } catch (const std::invalid_argument& e) {
    fail("profile", e.what());
  }
  if (!std::isfinite(c.beta)) fail("operator.beta", "must be finite");
  if (c.field_kind != "random" && c.field_kind != "bandlimited") fail("field.kind", "must be random or bandlimited");
  if (c.band < 1) fail("field.band", "must be >= 1");
  if (c.dyadic_depth < 1 || c.dyadic_depth > c.n_log2 + 1) fail("dyadic.depth", "must be in [1, n_log2 + 1]");
  if (!(c.dyadic_lipschitz > 0.0)) fail("dyadic.lipschitz", "must be positive");
  if (c.triples < 1) fail("decompose.triples", "must be positive");
  if (c.method != "power" && c.method != "ascent" && c.method != "search")
    fail("normest.method", "must be power, ascent or search");
  if (!(c.p > 1.0)) fail("normest.p", "must be > 1");
  if (c.restarts < 1) fail("normest.restarts", "must be positive");
  if (!(c.tol > 0.0)) fail("normest.tol", "must be positive");
  if (c.max_iter < 1) fail("normest.max_iter", "must be positive");
  if (c.budget < 1) fail("normest.budget", "must be positive");
  if (c.knots < 1 || c.knots > (1 << c.n_log2)) fail("normest.knots", "must be in [1, N]");
  if (!(c.level_hi >= c.level_lo)) fail("normest.level_hi", "must be >= level_lo");
  if (c.constraint != "lipschitz" && c.constraint != "none" && c.constraint != "both")
    fail("normest.constraint", "must be lipschitz, none or both");
  for (double e : c.epsilons) {
    int ex = 0;
    if (!(e > 0.0 && e <= 1.0) || std::frexp(e, &ex) != 0.5) fail("sweep.epsilons", "entries must be 2^-i, i >= 0");
  }
  if (c.cases < 1) fail("verify.cases", "must be positive");
  const auto& s = c.linearizer;
  if (s.kind != RegularityKind::constant && !(s.lipschitz > 0.0)) fail("linearizer.lipschitz", "must be positive");
  if (s.kind == RegularityKind::constant && !(s.value >= 0.0)) fail("linearizer.value", "must be >= 0");
  if (s.modes < 1) fail("linearizer.modes", "must be >= 1");
  if (!(s.amplitude >= 0.0)) fail("linearizer.amplitude", "must be >= 0");
  try {
    (void)generate_linearizer(s, c.seed, c.n_log2);
  } catch (const std::invalid_argument& e) {
    fail("linearizer", e.what());
  }
}

} // namespace hxc
