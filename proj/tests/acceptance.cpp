// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <CLI11.hpp>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hxc/cli.hpp"
#include "hxc/decomposition.hpp"
#include "hxc/dyadic.hpp"
#include "hxc/exec.hpp"
#include "hxc/normest.hpp"
#include "hxc/rng.hpp"

using namespace hxc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

LinearizerField lipschitz_v(int n_log2, double lipschitz, std::uint64_t seed) {
  LinearizerSpec spec;
  spec.kind = RegularityKind::lip_x;
  spec.lipschitz = lipschitz;
  spec.base = 0.25;
  return generate_linearizer(spec, seed, n_log2);
}

LinearizerField lipschitz_2d(int n_log2, double lipschitz, std::uint64_t seed) {
  LinearizerSpec spec;
  spec.kind = RegularityKind::lip_2d;
  spec.lipschitz = lipschitz;
  return generate_linearizer(spec, seed, n_log2);
}

// 1. fast bucketed apply against the definition-level sum
Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  int cases = 0;
  for (int n_log2 : {4, 5})
    for (double beta : {-1.0, 0.0, 1.0})
      for (std::uint64_t s = 0; s < 20; ++s) {
        const std::uint64_t seed = derive_seed(1000 + n_log2, static_cast<std::uint64_t>(beta + 2) * 100 + s);
        const auto f = random_field(n_log2, seed);
        const auto v = s % 2 ? lipschitz_2d(n_log2, 1.5, seed + 1) : lipschitz_v(n_log2, 4.0, seed + 1);
        const auto m = make_bump_profile(std::ldexp(1.0, -static_cast<int>(s % 4)));
        const auto fast = apply_linearized_bucketed(f, v, m, beta);
        const auto slow = apply_linearized_bruteforce(f, v, m, beta);
        worst = std::max(worst, relative_l2_error(fast, slow));
        ++cases;
      }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-10 && secs <= 120.0,
          std::to_string(cases) + " cases, worst rel err " + fmt("%.3g", worst) + ", " + fmt("%.1f", secs) + " s"};
}

// 2. selection stability on generated and on constructed V
Outcome selection_stability() {
  const int n_log2 = 6;
  const double lipschitz = 0.5;
  std::uint64_t bad_generated = 0, checked = 0;
  int missed = 0;
  for (auto variant : {DyadicVariant::squares, DyadicVariant::rows}) {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto v = generate_dyadic_linearizer(n_log2, lipschitz, variant, 500 + s);
      const auto r = check_selection_stability(v, lipschitz, 1.0, variant);
      bad_generated += r.violations;
      checked += r.checked;
    }
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto v = generate_violating_dyadic_linearizer(n_log2, lipschitz, 1.0, variant, 900 + s);
      if (check_selection_stability(v, lipschitz, 1.0, variant).violations < 1) ++missed;
    }
  }
  return {bad_generated == 0 && missed == 0 && checked > 0,
          std::to_string(bad_generated) + " violations over " + std::to_string(checked) +
              " admissible tuples, " + std::to_string(missed) + "/20 constructed V undetected"};
}

// 3. reproducing formula on band-limited mean-zero fields
Outcome calderon() {
  double worst = 0.0;
  for (int n_log2 : {6, 7})
    for (double beta : {1.0, -1.0})
      for (auto kind : {LadderKind::dyadic, LadderKind::quarter}) {
        const auto fam = make_lp_family(beta, n_log2, kind);
        for (std::uint64_t s = 0; s < 3; ++s) {
          const auto f = resolved_part(random_bandlimited_field(n_log2, 1 << (n_log2 - 2), 30 + s));
          worst = std::max(worst, calderon_residual(f, fam));
        }
      }
  return {worst <= 1e-10, "worst residual " + fmt("%.3g", worst)};
}

// 4. T = S + E on the resolved span, and no small-variation term for lacunary V
Outcome decomposition_identity() {
  const int n_log2 = 6, n = 64;
  const auto fam = make_lp_family(1.0, n_log2);
  double worst = 0.0;
  for (double eps : {0.5, 0.125}) {
    const auto m = make_bump_profile(eps);
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto f = resolved_part(random_bandlimited_field(n_log2, 24, 40 + s));
      for (const auto& v : {LinearizerField::constant(n_log2, 0.3 + s), lipschitz_v(n_log2, 4.0, 50 + s).transposed()}) {
        const auto t = decompose(f, v, fam, m);
        worst = std::max(worst, lp_norm(t.direct - (t.principal + t.error), 2.0) / lp_norm(f, 2.0));
      }
    }
  }
  std::size_t nonzero = 0;
  Rng rng(77);
  for (std::uint64_t s = 0; s < 3; ++s) {
    std::vector<double> vals(n * n);
    for (auto& x : vals) x = std::ldexp(1.0, static_cast<int>(rng.between(-4, 4)));
    const auto v = LinearizerField::from_values(n_log2, vals);
    for (double eps : {0.5, 0.125}) {
      const auto t = decompose(resolved_part(random_field(n_log2, 60 + s)), v, fam, make_bump_profile(eps));
      for (const auto& z : t.small_variation.samples()) nonzero += z != cplx(0.0);
    }
  }
  return {worst <= 1e-8 && nonzero == 0,
          "worst identity error " + fmt("%.3g", worst) + ", " + std::to_string(nonzero) + " nonzero small-variation samples"};
}

// 5. error-symbol support band and bounded overlap
Outcome support_and_overlap() {
  std::uint64_t off_band = 0;
  for (int n_log2 : {6, 7})
    for (double beta : {1.0, -1.0})
      for (double eps : {1.0, 0.25}) {
        const auto fam = make_lp_family(beta, n_log2);
        const auto m = make_bump_profile(eps);
        for (int j = -20; j <= 10; ++j) off_band += error_support_violations(fam, m, j);
      }
  int overlap = 0;
  for (int n_log2 : {6, 7}) overlap = std::max(overlap, overlap_count(make_lp_family(1.0, n_log2), make_bump_profile(1.0), -30, 30));
  return {off_band == 0 && overlap <= 10,
          std::to_string(off_band) + " off-band nonzeros, overlap " + std::to_string(overlap)};
}

// 6. ratio inequality under both hypothesis sets
Outcome lipschitz_ratio() {
  const auto fam = make_lp_family(1.0, 6);
  std::uint64_t violations = 0, relevant = 0;
  double worst = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto band = lipschitz_ratio_check(lipschitz_v(6, 4.0, 70 + seed).transposed(), fam, 4.0, RatioVariant::band,
                                             10000, seed);
    const auto cone = lipschitz_ratio_check(lipschitz_2d(6, 2.0, 80 + seed), fam, 2.0, RatioVariant::cone, 10000, seed);
    for (const auto& r : {band, cone}) {
      violations += r.violations;
      relevant += r.relevant;
      worst = std::max(worst, r.worst_ratio);
    }
  }
  return {violations == 0 && relevant > 0,
          std::to_string(violations) + " violations, " + std::to_string(relevant) + " relevant triples, worst ratio " +
              fmt("%.4f", worst)};
}

double dense_norm(const LinearOperator& op) {
  const auto a = dense_matrix(op);
  const auto dim = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(a.size()))));
  Eigen::Map<const Eigen::MatrixXcd> mat(a.data(), dim, dim);
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(mat).singularValues()(0);
}

// 7. estimates never exceed the dense operator norm; fixed multipliers are exact
Outcome norm_soundness() {
  double excess = -1.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto v = s % 2 ? lipschitz_2d(3, 1.5, s) : lipschitz_v(3, 4.0, s);
    const double beta = s % 3 == 0 ? -1.0 : 1.0;
    const auto op = linearized_operator(v, make_bump_profile(std::ldexp(1.0, -static_cast<int>(s % 3))), beta);
    const double exact = dense_norm(op);
    const double power = l2_norm_power_iteration(op, 1e-12, 2000, s).value;
    AscentOptions opt;
    opt.restarts = 4;
    opt.max_iter = 200;
    const double ascent = lp_norm_ascent(op, 2.0, s, opt).value;
    excess = std::max({excess, power - exact, ascent - exact});
  }
  double fixed_err = 0.0;
  for (double lambda : {0.05, 0.3, 1.0})
    for (double beta : {1.0, -1.0}) {
      auto sym = hyperbolic_symbol(lambda, beta, make_bump_profile(0.25), 3);
      sym *= pi_beta_mask(beta, 3);
      const auto est = l2_norm_power_iteration(fixed_multiplier_operator(sym), 1e-14, 2000, 3);
      fixed_err = std::max(fixed_err, std::abs(est.value - sym.max_abs()));
    }
  return {excess <= 1e-8 && fixed_err <= 1e-10,
          "max estimate - dense norm " + fmt("%.3g", excess) + ", fixed multiplier error " + fmt("%.3g", fixed_err)};
}

// 8. growth in epsilon consistent with A (log2(1/eps) + 1)
Outcome sweep_shape() {
  const auto start = std::chrono::steady_clock::now();
  // V reaches down to 2^-10 so the bump's transition band lands on grid frequencies
  // for every epsilon; with V bounded away from 0 the sweep sees only m(0) = 1.
  LinearizerSpec spec;
  spec.kind = RegularityKind::lip_x;
  spec.lipschitz = 4.0;
  spec.base = 0x1p-10;
  SweepOptions opt;
  opt.tol = 1e-10;
  opt.max_iter = 3000;
  const auto r = epsilon_sweep(2.0, 1.0, spec, {0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625}, 6, 8, opt);
  double lo = INFINITY, hi = 0.0;
  for (const auto& row : r.rows) {
    const double q = row.estimate / (std::log2(1.0 / row.epsilon) + 1.0);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  const double ratio = hi / lo;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {ratio <= 4.0 && secs <= 900.0, "ratio " + fmt("%.3f", ratio) + ", " + fmt("%.1f", secs) + " s"};
}

// 9. beta = 0: pointwise domination by the first-variable maximal function
Outcome beta_zero_domination() {
  const int n_log2 = 6;
  const auto m = make_bump_profile(0.25);
  std::vector<LinearizerField> vs;
  std::set<double> lambdas;
  for (std::uint64_t s = 0; s < 20; ++s) {
    vs.push_back(s % 2 ? lipschitz_2d(n_log2, 1.5, 90 + s) : lipschitz_v(n_log2, 8.0, 90 + s));
    lambdas.insert(vs.back().values.begin(), vs.back().values.end());
  }
  const std::vector<double> all(lambdas.begin(), lambdas.end());
  const double c = first_variable_kernel_constant(m, all, n_log2);
  std::uint64_t violations = 0;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_field(n_log2, 190 + s);
    SampledField absf(n_log2);
    for (std::size_t k = 0; k < f.count(); ++k) absf.samples()[k] = std::abs(f.samples()[k]);
    const auto bound = hl_maximal_m1(absf);
    const auto tf = apply_linearized_bucketed(f, vs[s], m, 0.0);
    for (std::size_t k = 0; k < f.count(); ++k) {
      const double ratio = std::abs(tf.samples()[k]) / (c * bound.samples()[k].real());
      worst = std::max(worst, ratio);
      violations += ratio > 1.0 + 1e-12;
    }
  }
  return {violations == 0, "C = " + fmt("%.4f", c) + ", " + std::to_string(violations) + " violations, worst |Tf|/(C M1|f|) " +
                               fmt("%.4f", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Job {
  const char* command;
  const char* ini;
};

const std::vector<Job> reproducibility_jobs{
    {"apply", "[run]\nseed = 21\n[grid]\nn_log2 = 5\n[profile]\nepsilon = 0.25\n[linearizer]\nkind = lip_2d\nlipschitz = 1.5\n"},
    {"dyadic", "[run]\nseed = 22\n[grid]\nn_log2 = 6\n[dyadic]\nvariant = rows\ndepth = 6\n[verify]\ncases = 4\n"},
    {"decompose", "[run]\nseed = 23\n[grid]\nn_log2 = 6\n[profile]\nepsilon = 0.5\n[linearizer]\nkind = lip_x\nlipschitz = 4\n"
                  "[field]\nkind = bandlimited\nband = 16\n[decompose]\ntriples = 10000\n"},
    {"normest", "[run]\nseed = 24\n[grid]\nn_log2 = 4\n[linearizer]\nkind = lip_x\nlipschitz = 4\n"
                "[normest]\nmethod = ascent\np = 3\nrestarts = 4\nmax_iter = 80\n"},
    {"sweep", "[run]\nseed = 25\n[grid]\nn_log2 = 5\n[linearizer]\nkind = lip_x\nlipschitz = 4\nbase = 0.0009765625\n"
              "[normest]\nmax_iter = 200\n"},
    {"verify", "[run]\nseed = 26\n[grid]\nn_log2 = 5\n[operator]\nbeta = -1\n[verify]\ncases = 3\n"},
};

// 10. every command twice in reproducible mode, artifacts compared byte for byte
Outcome reproducibility(const fs::path& root) {
  const int saved_threads = max_threads();
  set_threads(1);
  int differing = 0, files = 0, failed_runs = 0;
  for (const auto& job : reproducibility_jobs) {
    std::istringstream in(job.ini);
    auto cfg = parse_config(in);
    cfg.command = job.command;
    cfg.reproducible = true;
    validate_config(cfg);
    const fs::path a = root / "repro_a" / job.command, b = root / "repro_b" / job.command;
    fs::remove_all(a);
    fs::remove_all(b);
    std::ostringstream sink;
    failed_runs += run_experiment(cfg, a, sink) != exit_ok;
    failed_runs += run_experiment(cfg, b, sink) != exit_ok;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file()) continue;
      ++files;
      const auto other = b / fs::relative(e.path(), a);
      differing += !fs::exists(other) || slurp(e.path()) != slurp(other);
    }
  }
  set_threads(saved_threads);
  return {differing == 0 && files > 0 && failed_runs == 0,
          std::to_string(files) + " artifacts over " + std::to_string(reproducibility_jobs.size()) + " commands, " +
              std::to_string(differing) + " differ, " + std::to_string(failed_runs) + " runs with failed checks"};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hxlab acceptance run"};
  std::string out = "acceptance_out";
  std::vector<int> only;
  app.add_option("--out", out, "directory for reproducibility artifacts and acceptance.csv");
  app.add_option("--only", only, "run just these criteria");
  CLI11_PARSE(app, argc, argv);

  const fs::path root(out);
  fs::create_directories(root);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"selection stability", selection_stability},
      {"Calderon identity", calderon},
      {"decomposition identity", decomposition_identity},
      {"support and overlap", support_and_overlap},
      {"Lipschitz ratio", lipschitz_ratio},
      {"norm soundness", norm_soundness},
      {"epsilon-sweep shape", sweep_shape},
      {"beta = 0 domination", beta_zero_domination},
      {"reproducibility", [&] { return reproducibility(root); }},
  };

  std::ofstream csv(root / "acceptance.csv");
  csv << "criterion,name,pass,detail\n";
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << id << " (" << criteria[k].first << "): " << (o.pass ? "PASS" : "FAIL") << "  "
              << o.detail << std::endl;
    csv << id << ",\"" << criteria[k].first << "\"," << (o.pass ? "true" : "false") << ",\"" << o.detail << "\"\n";
  }
  std::cout << (failures ? "acceptance: FAIL" : "acceptance: PASS") << " (" << failures << " failed)" << std::endl;
  return failures ? 1 : 0;
}
