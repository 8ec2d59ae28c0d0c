#include <doctest.h>

#include <sstream>

#include "hxc/config.hpp"
#include "hxc/field_io.hpp"

using namespace hxc;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string error_of(const std::string& text, bool validate = false) {
  try {
    const auto cfg = parse(text);
    if (validate) validate_config(cfg);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_SUITE("config") {
  TEST_CASE("typed values are read") {
    const auto c = parse(
        "[run]\nseed = 42\nreproducible = yes\n"
        "[grid]\nn_log2 = 6\n"
        "[profile]\nkind = bump\nepsilon = 0.125\n"
        "[linearizer]\nkind = lip_2d\nlipschitz = 2.5\n"
        "[operator]\nbeta = -0.5\norientation = second_scaled\nquantize = dyadic\ntruncate = false\n"
        "[sweep]\nepsilons = 0.5, 0.25\n");
    CHECK(c.seed == 42);
    CHECK(c.reproducible);
    CHECK(c.n_log2 == 6);
    CHECK(c.epsilon == 0.125);
    CHECK(c.linearizer.kind == RegularityKind::lip_2d);
    CHECK(c.linearizer.lipschitz == 2.5);
    CHECK(c.beta == -0.5);
    CHECK(c.orientation == Orientation::second_scaled);
    CHECK(c.quantize == Quantize::dyadic);
    CHECK_FALSE(c.truncate);
    CHECK(c.epsilons == std::vector<double>{0.5, 0.25});
    CHECK_NOTHROW(validate_config(c));
  }

  TEST_CASE("defaults are valid") {
    ExperimentConfig c;
    CHECK_NOTHROW(validate_config(c));
    CHECK(parse("").canonical() == c.canonical());
  }

  TEST_CASE("unknown keys are named") {
    CHECK(error_of("[grid]\nbogus = 1\n").find("grid.bogus") != std::string::npos);
    CHECK(error_of("[nosuch]\nn_log2 = 4\n").find("nosuch.n_log2") != std::string::npos);
    CHECK(error_of("stray = 1\n").find("stray") != std::string::npos);
  }

  TEST_CASE("malformed values are rejected") {
    CHECK(error_of("[grid]\nn_log2 = five\n").find("grid.n_log2") != std::string::npos);
    CHECK(error_of("[grid]\nn_log2 = 4.5\n").find("grid.n_log2") != std::string::npos);
    CHECK(error_of("[operator]\nbeta = nan\n").find("operator.beta") != std::string::npos);
    CHECK(error_of("[operator]\ntruncate = maybe\n").find("operator.truncate") != std::string::npos);
    CHECK(error_of("[operator]\norientation = sideways\n").find("operator.orientation") != std::string::npos);
    CHECK(error_of("[linearizer]\nkind = wobbly\n").find("linearizer.kind") != std::string::npos);
    CHECK(error_of("[sweep]\nepsilons = 0.5,,0.25\n").find("sweep.epsilons") != std::string::npos);
    CHECK(error_of("[run]\nseed = -3\n").find("run.seed") != std::string::npos);
  }

  TEST_CASE("cross-key validation") {
    CHECK(error_of("[grid]\nn_log2 = 2\n", true).find("grid.n_log2") != std::string::npos);
    CHECK(error_of("[grid]\nn_log2 = 15\n", true).find("grid.n_log2") != std::string::npos);
    CHECK(error_of("[profile]\nepsilon = 0.3\n", true).find("profile") != std::string::npos);
    CHECK(error_of("[normest]\np = 1\n", true).find("normest.p") != std::string::npos);
    CHECK(error_of("[normest]\nmethod = guess\n", true).find("normest.method") != std::string::npos);
    CHECK(error_of("[sweep]\nepsilons = 0.5, 0.3\n", true).find("sweep.epsilons") != std::string::npos);
    CHECK(error_of("[dyadic]\ndepth = 9\n", true).find("dyadic.depth") != std::string::npos);
    CHECK(error_of("[linearizer]\nkind = lip_x\nlipschitz = 0\n", true).find("linearizer.lipschitz") != std::string::npos);
    CHECK(error_of("[field]\nkind = noise\n", true).find("field.kind") != std::string::npos);
  }

  TEST_CASE("canonical form and hash") {
    const auto a = parse("[grid]\nn_log2 = 5\n[operator]\nbeta = 0.1\n");
    const auto b = parse("[operator]\nbeta=0.1\n\n[grid]\n  n_log2 =5\n");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    CHECK(a.canonical().find("operator.beta = 0.10000000000000001") != std::string::npos);

    const auto c = parse("[grid]\nn_log2 = 5\n[operator]\nbeta = 0.2\n");
    CHECK(c.hash() != a.hash());

    const auto keys = config_keys();
    std::istringstream lines(a.canonical());
    std::string line;
    std::size_t k = 0;
    while (std::getline(lines, line)) {
      REQUIRE(k < keys.size());
      CHECK(line.rfind(keys[k] + " = ", 0) == 0);
      ++k;
    }
    CHECK(k == keys.size());
  }

  TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  }

  TEST_CASE("config files") {
    const auto c = load_config(std::string(HXC_TEST_DATA) + "/apply.ini");
    CHECK(c.seed == 11);
    CHECK(c.epsilon == 0.5);
    CHECK_THROWS_AS(load_config(std::string(HXC_TEST_DATA) + "/missing.ini"), IoError);
    CHECK_THROWS_AS(load_config(std::string(HXC_TEST_DATA) + "/unknown_key.ini"), ConfigError);
  }
}
