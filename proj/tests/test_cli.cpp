#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "hxc/cli.hpp"
#include "hxc/field_io.hpp"

using namespace hxc;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "hxlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string config(const char* name) { return std::string(HXC_TEST_DATA) + "/" + name; }

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("hxlab_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).status == exit_ok);
    CHECK(run({}).status == exit_config);
    CHECK(run({"frobnicate"}).status == exit_config);
    CHECK(run({"verify", "--threads", "-2"}).status == exit_config);
  }

  TEST_CASE("config errors exit with 2 and name the key") {
    const auto r = run({"verify", "--config", config("unknown_key.ini"), "--out", scratch("bad").string()});
    CHECK(r.status == exit_config);
    CHECK(r.err.find("grid.bogus") != std::string::npos);
  }

  TEST_CASE("i/o errors exit with 3") {
    CHECK(run({"verify", "--config", config("does_not_exist.ini")}).status == exit_io);
    const auto r = run({"verify", "--config", config("constant.ini"), "--out", "/proc/hxlab_cannot_write"});
    CHECK(r.status == exit_io);
  }

  TEST_CASE("verify on a constant linearizer") {
    const auto dir = scratch("constant");
    const auto r = run({"verify", "--config", config("constant.ini"), "--out", dir.string(), "--reproducible"});
    CHECK(r.status == exit_ok);
    CHECK(r.out.find(", 0 failed") != std::string::npos);
    for (const char* f : {"checks.csv", "events.jsonl", "config.ini"}) CHECK(fs::exists(dir / f));
    CHECK(slurp(dir / "config.ini").find("run.reproducible = true") != std::string::npos);
  }

  TEST_CASE("apply agrees with the direct oracle") {
    const auto dir = scratch("apply");
    const auto r = run({"apply", "--config", config("apply.ini"), "--out", dir.string()});
    REQUIRE(r.status == exit_ok);
    const auto fast = load_hxf(dir / "Tf.hxf");
    const auto oracle = load_hxf(dir / "Tf_oracle.hxf");
    CHECK(max_abs_diff(fast, oracle) <= 1e-10 * std::max(1.0, lp_norm(oracle, 2.0)));
    CHECK(fs::exists(dir / "V.json"));
  }

  TEST_CASE("seed flag overrides the config") {
    const auto a = scratch("seed_a"), b = scratch("seed_b");
    REQUIRE(run({"apply", "--config", config("apply.ini"), "--out", a.string(), "--seed", "5"}).status == exit_ok);
    REQUIRE(run({"apply", "--config", config("apply.ini"), "--out", b.string(), "--seed", "6"}).status == exit_ok);
    CHECK(slurp(a / "f.hxf") != slurp(b / "f.hxf"));
    CHECK(slurp(a / "config.ini").find("run.seed = 5") != std::string::npos);
  }

  TEST_CASE("reproducible runs are byte-identical") {
    const auto a = scratch("rep_a"), b = scratch("rep_b");
    for (const auto& d : {a, b})
      REQUIRE(run({"apply", "--config", config("apply.ini"), "--out", d.string(), "--reproducible"}).status == exit_ok);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
      ++files;
    }
    CHECK(files >= 6);
  }
}
