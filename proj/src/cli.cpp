#include "hxc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hxc/decomposition.hpp"
#include "hxc/dyadic.hpp"
#include "hxc/exec.hpp"
#include "hxc/field_io.hpp"
#include "hxc/linearized.hpp"
#include "hxc/multiplier.hpp"
#include "hxc/normest.hpp"
#include "hxc/report.hpp"
#include "hxc/rng.hpp"

namespace hxc {
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed on " + path.string());
}

// Seeds of the independent streams used by the runner.
enum Stream : std::uint64_t { stream_field = 1, stream_linearizer = 2, stream_estimate = 3, stream_ratio = 4 };

class Run {
public:
  Run(const ExperimentConfig& cfg, const fs::path& out, std::ostream& console)
      : cfg_(cfg), out_(out), console_(console), hash_(cfg.hash()), log_(out / "events.jsonl", hash_, cfg.seed),
        exec_(cfg.reproducible ? Exec::serial : Exec::parallel) {
    log_.event("start", {{"command", cfg.command}, {"grid", 1 << cfg.n_log2}, {"threads", max_threads()}});
    write_text(out / "config.ini", cfg.canonical());
  }

  int finish() {
    std::string csv = "check,N,beta,epsilon,result,tolerance,pass,config_hash,seed\n";
    int failed = 0;
    for (const auto& r : checks_) {
      csv += r.check + ',' + std::to_string(1 << r.n_log2) + ',' + num(r.beta) + ',' +
             (r.epsilon ? num(*r.epsilon) : std::string()) + ',' + num(r.result) + ',' + num(r.tolerance) + ',' +
             (r.pass ? "true" : "false") + ',' + hash_ + ',' + std::to_string(cfg_.seed) + '\n';
      failed += r.pass ? 0 : 1;
    }
    write_text(out_ / "checks.csv", csv);
    log_.event("finish", {{"checks", checks_.size()}, {"failed", failed}});
    console_ << "hxlab " << cfg_.command << ": " << checks_.size() << " checks, " << failed << " failed\n";
    return failed == 0 ? exit_ok : exit_assertion;
  }

  // result <= tolerance passes
  void upper(const std::string& name, double result, double tolerance, nlohmann::ordered_json witness = nullptr) {
    add(name, result, tolerance, result <= tolerance, std::move(witness));
  }
  // result >= tolerance passes
  void lower(const std::string& name, double result, double tolerance, nlohmann::ordered_json witness = nullptr) {
    add(name, result, tolerance, result >= tolerance, std::move(witness));
  }
  void event(const std::string& name, nlohmann::ordered_json payload) { log_.event(name, std::move(payload)); }

  const ExperimentConfig& cfg() const { return cfg_; }
  Exec exec() const { return exec_; }
  const std::string& hash() const { return hash_; }
  fs::path path(const std::string& name) const { return out_ / name; }
  void text(const std::string& name, const std::string& body) const { write_text(out_ / name, body); }
  void field(const std::string& name, const SampledField& f) const { save_hxf(out_ / name, f); }

  SampledField input_field(std::uint64_t index = 0) const {
    const auto seed = derive_seed(cfg_.seed, stream_field + 16 * index);
    return cfg_.field_kind == "bandlimited" ? random_bandlimited_field(cfg_.n_log2, cfg_.band, seed)
                                            : random_field(cfg_.n_log2, seed);
  }
  LinearizerField linearizer(std::uint64_t index = 0) const {
    return generate_linearizer(cfg_.linearizer, derive_seed(cfg_.seed, stream_linearizer + 16 * index), cfg_.n_log2);
  }
  void save_linearizer(const std::string& stem, const LinearizerField& v) const {
    field(stem + ".hxf", linearizer_as_field(v));
    text(stem + ".json", linearizer_sidecar_json(v) + "\n");
  }

private:
  void add(const std::string& name, double result, double tolerance, bool pass, nlohmann::ordered_json witness) {
    CheckRecord r;
    r.check = name;
    r.n_log2 = cfg_.n_log2;
    r.beta = cfg_.beta;
    if (cfg_.profile_kind == "bump") r.epsilon = cfg_.epsilon;
    r.result = result;
    r.tolerance = tolerance;
    r.pass = pass && !std::isnan(result);
    r.witness = std::move(witness);
    log_.check(r);
    console_ << summary_line(r) << '\n';
    checks_.push_back(std::move(r));
  }

  const ExperimentConfig& cfg_;
  fs::path out_;
  std::ostream& console_;
  std::string hash_;
  JsonLinesLog log_;
  Exec exec_;
  std::vector<CheckRecord> checks_;
};

double normalized_error(const SampledField& a, const SampledField& b, const SampledField& scale) {
  const double s = lp_norm(scale, 2.0);
  const double d = lp_norm(a - b, 2.0);
  return s > 0.0 ? d / s : d;
}

bool power_of_two(double x) {
  int e = 0;
  return x > 0.0 && std::frexp(x, &e) == 0.5;
}

bool dyadic_valued(const LinearizerField& v) { return std::all_of(v.values.begin(), v.values.end(), power_of_two); }

SymbolGrid constant_symbol(const ExperimentConfig& c, double value) {
  auto s = hyperbolic_symbol(value, c.beta, c.profile(), c.n_log2, c.orientation);
  if (c.truncate) s *= pi_beta_mask(c.beta, c.n_log2);
  return s;
}

// --- apply ---------------------------------------------------------------

void run_apply(Run& run) {
  const auto& c = run.cfg();
  const auto m = c.profile();
  const auto f = run.input_field();
  const auto v = run.linearizer();
  run.field("f.hxf", f);
  run.save_linearizer("V", v);

  const auto tf = apply_linearized_bucketed(f, v, m, c.beta, c.quantize, c.orientation, c.truncate, run.exec());
  run.field("Tf.hxf", tf);

  if (c.quantize == Quantize::dyadic) {
    const auto exact = apply_linearized_bucketed(f, v, m, c.beta, Quantize::exact, c.orientation, c.truncate, run.exec());
    run.event("quantization_error", {{"relative_l2", JsonLinesLog::number(relative_l2_error(tf, exact))}});
  }

  if (c.n_log2 <= 5) {
    const auto& target = c.quantize == Quantize::dyadic ? dyadic_quantized(v) : v;
    const auto oracle = apply_linearized_bruteforce(f, target, m, c.beta, c.orientation, c.truncate, run.exec());
    run.field("Tf_oracle.hxf", oracle);
    run.upper("apply.oracle_equivalence", relative_l2_error(tf, oracle), 1e-10);
  } else {
    run.event("oracle_skipped", {{"reason", "brute force oracle limited to N <= 32"}});
  }

  if (c.quantize == Quantize::exact) {
    const auto g = random_field(c.n_log2, derive_seed(c.seed, stream_field + 1000));
    const auto tg = apply_linearized_adjoint(g, v, m, c.beta, c.orientation, c.truncate, run.exec());
    const cplx lhs = inner(tf, g), rhs = inner(f, tg);
    const double scale = std::max(1.0, lp_norm(tf, 2.0) * lp_norm(g, 2.0));
    run.upper("apply.adjoint_identity", std::abs(lhs - rhs) / scale, 1e-10);
  }
}

// --- dyadic --------------------------------------------------------------

void run_dyadic(Run& run) {
  const auto& c = run.cfg();
  const double L = c.dyadic_lipschitz;
  const auto variant = c.dyadic_variant;
  if (variant == DyadicVariant::squares && L > 0.5)
    throw ConfigError("config key 'dyadic.lipschitz': the squares generator needs L <= 1/2");

  std::uint64_t violations = 0, checked = 0, hypothesis_failures = 0;
  nlohmann::ordered_json first_witness = nullptr;
  LinearizerField v0;
  for (int k = 0; k < c.cases; ++k) {
    const auto v = generate_dyadic_linearizer(c.n_log2, L, variant, derive_seed(c.seed, 100 + k));
    if (k == 0) v0 = v;
    const auto lip = verify_dyadic_lipschitz(v, L, variant);
    if (!lip.pass) ++hypothesis_failures;
    const auto sel = check_selection_stability(v, L, c.beta, variant);
    checked += sel.checked;
    violations += sel.violations;
    if (first_witness.is_null() && !sel.witnesses.empty()) {
      const auto& w = sel.witnesses.front();
      first_witness = {{"case", k}, {"x", w.x}, {"x2", w.x2}, {"y", w.y}, {"level_i", w.level_i}, {"level_j", w.level_j}};
    }
  }
  run.event("selection_scan", {{"cases", c.cases}, {"tuples", checked}});
  run.upper("dyadic.hypotheses", static_cast<double>(hypothesis_failures), 0.0);
  run.upper("dyadic.selection_stability", static_cast<double>(violations), 0.0, first_witness);

  std::uint64_t least = std::numeric_limits<std::uint64_t>::max();
  for (int k = 0; k < c.cases; ++k) {
    SelectionWitness planted;
    const auto v = generate_violating_dyadic_linearizer(c.n_log2, L, c.beta, variant, derive_seed(c.seed, 200 + k), &planted);
    least = std::min(least, check_selection_stability(v, L, c.beta, variant).violations);
  }
  run.lower("dyadic.violations_detected", static_cast<double>(least), 1.0);

  const auto f = run.input_field();
  run.save_linearizer("V", v0);
  const auto fast = dyadic_model_operator(f, v0, c.beta, L, variant, c.dyadic_depth);
  const auto ref = dyadic_model_operator(f, v0, c.beta, L, variant, c.dyadic_depth, true);
  run.field("model.hxf", fast.field);
  if (!fast.note.empty()) run.event("model_note", {{"note", fast.note}});
  run.upper("dyadic.model_fast_vs_reference", relative_l2_error(fast.field, ref.field), 1e-12);

  const auto haar = haar_transform(f, c.n_log2);
  run.upper("dyadic.haar_round_trip", relative_l2_error(haar_inverse(haar), f), 1e-12);

  if (variant == DyadicVariant::squares) {
    const auto tel = telescoping_check(v0, f, c.dyadic_depth);
    run.upper("dyadic.telescoping", tel.ok() ? tel.max_identity_error : 1.0, 1e-10,
              {{"convex", tel.convex}, {"x_independent", tel.x_independent}});
  }
}

// --- decompose -----------------------------------------------------------

void run_decompose(Run& run) {
  const auto& c = run.cfg();
  if (c.n_log2 < 4) throw ConfigError("config key 'grid.n_log2': decompose needs n_log2 >= 4");
  const auto m = c.profile();
  const auto fam = make_lp_family(c.beta, c.n_log2, c.ladder);
  const auto f = resolved_part(run.input_field());
  // The split expects V regular in the second variable.
  const auto raw = run.linearizer();
  const auto v = c.linearizer.kind == RegularityKind::lip_x ? raw.transposed() : raw;
  run.field("f.hxf", f);
  run.save_linearizer("V", v);

  const auto t = decompose(f, v, fam, m, run.exec());
  run.field("Tf.hxf", t.direct);
  run.field("Sf.hxf", t.principal);
  run.field("Ef.hxf", t.error);
  run.field("large_variation.hxf", t.large_variation);
  run.field("small_variation.hxf", t.small_variation);
  for (const auto& note : t.notes) run.event("decompose_note", {{"note", note}});
  run.event("levels", t.levels);

  run.upper("decompose.identity", normalized_error(t.direct, t.principal + t.error, f), 1e-8);
  run.upper("decompose.calderon", calderon_residual(f, fam), 1e-10);

  std::uint64_t support = 0;
  for (int j : t.levels) support += error_support_violations(fam, m, j);
  run.upper("decompose.support", static_cast<double>(support), 0.0);

  if (!t.levels.empty()) {
    const int span = 2 * c.n_log2 + 8;
    const int overlap = overlap_count(fam, m, -span, span);
    if (c.beta == 1.0 && m.kind() == ProfileKind::bump && m.epsilon() == 1.0)
      run.upper("decompose.overlap", overlap, 10.0);
    else
      run.event("overlap", {{"count", overlap}});

    std::uint64_t regime = 0;
    for (int j : t.levels) {
      const auto r = regime_check(fam, m, std::ldexp(1.0, j));
      regime += r.unit_violations + r.vanishing_violations;
    }
    run.upper("decompose.regime", static_cast<double>(regime), 0.0);
  }

  if (dyadic_valued(v) && power_of_two(m.plateau_radius())) {
    double worst = 0.0;
    for (const auto& z : t.small_variation.samples()) worst = std::max(worst, std::abs(z));
    run.upper("decompose.small_variation_zero", worst, 0.0);
  }

  const auto bound = small_variation_error(f, v, fam, m);
  run.field("small_variation_bound.hxf", bound);
  double excess = 0.0;
  for (std::size_t k = 0; k < bound.count(); ++k)
    excess = std::max(excess, std::abs(t.small_variation.samples()[k]) - std::abs(bound.samples()[k]));
  run.event("small_variation_bound", {{"max_excess", JsonLinesLog::number(excess)}});

  const auto kind = c.linearizer.kind;
  const double L = c.linearizer.lipschitz;
  const auto seed = derive_seed(c.seed, stream_ratio);
  std::optional<RatioReport> ratio;
  if (kind == RegularityKind::lip_x) ratio = lipschitz_ratio_check(v, fam, L, RatioVariant::band, c.triples, seed);
  if (kind == RegularityKind::lip_2d && c.beta == 1.0)
    ratio = lipschitz_ratio_check(v, fam, L, RatioVariant::cone, c.triples, seed);
  if (ratio) {
    run.upper("decompose.lipschitz_ratio", static_cast<double>(ratio->violations), 0.0,
              {{"triples", ratio->triples},
               {"relevant", ratio->relevant},
               {"worst_ratio", JsonLinesLog::number(ratio->worst_ratio)},
               {"x", ratio->witness[0]},
               {"y", ratio->witness[1]},
               {"z", ratio->witness[2]}});
  }
}

// --- normest -------------------------------------------------------------

void search_rows(std::string& csv, std::string& history, const SearchReport& r, const ExperimentConfig& c,
                 const std::string& hash) {
  const std::string name = r.constraint == SearchConstraint::lipschitz ? "lipschitz" : "none";
  csv += name + ',' + num(c.p) + ',' + num(c.beta) + ',' + std::to_string(1 << c.n_log2) + ',' +
         std::to_string(c.seed) + ',' + num(r.best_value) + ',' + num(r.measured_lipschitz) + ',' +
         std::to_string(r.evaluations) + ',' + std::to_string(r.rejected) + ',' + hash + '\n';
  for (std::size_t k = 0; k < r.history.size(); ++k)
    history += name + ',' + std::to_string(k + 1) + ',' + num(r.history[k]) + '\n';
}

void run_search(Run& run) {
  const auto& c = run.cfg();
  SearchSpec spec;
  spec.n_log2 = c.n_log2;
  spec.beta = c.beta;
  spec.p = c.p;
  spec.knots = c.knots;
  spec.level_lo = c.level_lo;
  spec.level_hi = c.level_hi;
  spec.lipschitz = c.search_lipschitz;
  spec.budget = c.budget;
  spec.seed = c.seed;
  const auto m = c.profile();

  std::string csv = "constraint,p,beta,N,seed,best_value,measured_lipschitz,evaluations,rejected,config_hash\n";
  std::string history = "constraint,evaluation,best_value\n";
  std::optional<SearchReport> constrained, free;
  if (c.constraint != "none") {
    constrained = adversarial_linearizer_search(spec, m, SearchConstraint::lipschitz);
    search_rows(csv, history, *constrained, c, run.hash());
    run.save_linearizer("V_lipschitz", constrained->best_v);
  }
  if (c.constraint != "lipschitz") {
    std::optional<std::vector<double>> start;
    if (constrained) start = constrained->best_levels;
    free = adversarial_linearizer_search(spec, m, SearchConstraint::none, start);
    search_rows(csv, history, *free, c, run.hash());
    run.save_linearizer("V_none", free->best_v);
  }
  run.text("search.csv", csv);
  run.text("search_history.csv", history);
  if (constrained && free)
    run.upper("search.inclusion", constrained->best_value - free->best_value, 0.0,
              {{"lipschitz", constrained->best_value}, {"none", free->best_value}});
  for (const auto* r : {&constrained, &free})
    if (*r) {
      const auto& rep = **r;
      run.upper(std::string("search.witness_") + (rep.constraint == SearchConstraint::lipschitz ? "lipschitz" : "none"),
                rep.best_value > 0.0 ? 0.0 : 1.0, 0.0, {{"best_value", JsonLinesLog::number(rep.best_value)}});
    }
}

void run_normest(Run& run) {
  const auto& c = run.cfg();
  if (c.method == "search") {
    run_search(run);
    return;
  }
  if (c.method == "power" && c.p != 2.0)
    throw ConfigError("config key 'normest.p': power iteration estimates the L2 norm, use method = ascent");
  const auto m = c.profile();
  const auto v = run.linearizer();
  run.save_linearizer("V", v);
  const auto op = linearized_operator(v, m, c.beta, c.orientation, c.truncate, run.exec());
  const auto seed = derive_seed(c.seed, stream_estimate);
  NormEstimate est;
  if (c.method == "power") {
    est = l2_norm_power_iteration(op, c.tol, c.max_iter, seed);
  } else {
    AscentOptions opt;
    opt.restarts = c.restarts;
    opt.max_iter = c.max_iter;
    opt.tol = c.tol;
    opt.exec = run.exec();
    est = lp_norm_ascent(op, c.p, seed, opt);
  }
  run.field("witness.hxf", est.witness);

  SweepResult table;
  table.rows.push_back({c.p, c.beta, m.epsilon(), 1 << c.n_log2, c.seed, smoothness_constant(m), est.value,
                        est.iterations, est.converged});
  run.text("normest.csv", sweep_csv(table, run.hash()));

  const double rederived = norm_ratio(op, est.witness, c.p);
  run.upper("normest.witness_consistency", std::abs(rederived - est.value), 1e-10 * std::max(1.0, est.value));
  if (c.linearizer.kind == RegularityKind::constant) {
    const double exact = constant_symbol(c, c.linearizer.value).max_abs();
    run.upper("normest.fixed_multiplier_bound", est.value - exact, 1e-8, {{"exact", exact}});
  }
  run.event("estimate", {{"method", c.method},
                         {"value", JsonLinesLog::number(est.value)},
                         {"iterations", est.iterations},
                         {"converged", est.converged}});
}

// --- sweep ---------------------------------------------------------------

void run_sweep(Run& run) {
  const auto& c = run.cfg();
  SweepOptions opt;
  opt.restarts = c.restarts;
  opt.tol = c.tol;
  opt.max_iter = c.max_iter;
  opt.exec = run.exec();
  const auto r = epsilon_sweep(c.p, c.beta, c.linearizer, c.epsilons, c.n_log2, derive_seed(c.seed, stream_estimate), opt);
  run.text("sweep.csv", sweep_csv(r, run.hash()));
  run.upper("sweep.fitted_c_finite", std::isfinite(r.fitted_c) ? 0.0 : 1.0, 0.0,
            {{"fitted_c", JsonLinesLog::number(r.fitted_c)}});
  if (r.rows.size() >= 2) run.upper("sweep.shape_ratio", r.shape_ratio, 4.0);
}

// --- verify --------------------------------------------------------------

void run_verify(Run& run) {
  const auto& c = run.cfg();
  const auto m = c.profile();
  const auto v = run.linearizer();
  const auto f = run.input_field();
  run.save_linearizer("V", v);

  switch (c.linearizer.kind) {
  case RegularityKind::constant:
    run.upper("verify.constant", v.max_value() - v.min_value(), 0.0);
    break;
  case RegularityKind::lip_x: {
    const auto rep = verify_lipschitz(v, LipschitzMode::lip_x, c.linearizer.lipschitz);
    run.upper("verify.lipschitz_x", rep.worst_ratio, 1.0);
    break;
  }
  case RegularityKind::lip_2d: {
    const auto rep = verify_lipschitz(v, LipschitzMode::lip_2d, c.linearizer.lipschitz, true, c.seed);
    run.upper("verify.lipschitz_2d", rep.worst_ratio, 1.0);
    break;
  }
  case RegularityKind::dyadic_of_lipschitz: {
    const auto rep = verify_lipschitz(v, LipschitzMode::dyadic, c.linearizer.lipschitz);
    run.upper("verify.dyadic_of_lipschitz", rep.pass ? 0.0 : 1.0, 0.0);
    break;
  }
  }

  const bool partitions = exact_buckets(v).is_partition() && level_sets(v).is_partition();
  run.upper("verify.bucket_partition", partitions ? 0.0 : 1.0, 0.0);

  const auto tf = apply_linearized_bucketed(f, v, m, c.beta, Quantize::exact, c.orientation, c.truncate, Exec::serial);
  const auto tf_par = apply_linearized_bucketed(f, v, m, c.beta, Quantize::exact, c.orientation, c.truncate, Exec::parallel);
  run.upper("verify.serial_parallel", tf == tf_par ? 0.0 : max_abs_diff(tf, tf_par) + 1e-300, 0.0);
  run.field("Tf.hxf", tf);

  if (c.linearizer.kind == RegularityKind::constant) {
    const auto fixed = apply_fixed_multiplier(f, constant_symbol(c, c.linearizer.value));
    run.upper("verify.constant_collapse", relative_l2_error(tf, fixed), 1e-12);
  }

  if (c.n_log2 <= 5) {
    double worst = 0.0;
    for (int k = 0; k < c.cases; ++k) {
      const auto fk = run.input_field(static_cast<std::uint64_t>(k) + 1);
      const auto vk = run.linearizer(static_cast<std::uint64_t>(k) + 1);
      const auto fast = apply_linearized_bucketed(fk, vk, m, c.beta, Quantize::exact, c.orientation, c.truncate, run.exec());
      const auto slow = apply_linearized_bruteforce(fk, vk, m, c.beta, c.orientation, c.truncate, run.exec());
      worst = std::max(worst, relative_l2_error(fast, slow));
    }
    run.upper("verify.oracle_equivalence", worst, 1e-10);
  }

  run.upper("verify.haar_round_trip", relative_l2_error(haar_inverse(haar_transform(f, c.n_log2)), f), 1e-12);
  if (c.n_log2 >= 4) {
    const auto fam = make_lp_family(c.beta, c.n_log2, c.ladder);
    run.upper("verify.calderon", calderon_residual(resolved_part(f), fam), 1e-10);
  }
}

} // namespace

int run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& console) {
  validate_config(cfg);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());

  Run run(cfg, out_dir, console);
  const auto& cmd = cfg.command;
  if (cmd == "apply")
    run_apply(run);
  else if (cmd == "dyadic")
    run_dyadic(run);
  else if (cmd == "decompose")
    run_decompose(run);
  else if (cmd == "normest")
    run_normest(run);
  else if (cmd == "sweep")
    run_sweep(run);
  else if (cmd == "verify")
    run_verify(run);
  else
    throw ConfigError("unknown command '" + cmd + "'");
  return run.finish();
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hxlab: experiments with hyperbolic-cross multipliers along Lipschitz linearizations", "hxlab"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir = "hxlab_out";
  std::optional<std::uint64_t> seed;
  bool reproducible = false;
  std::optional<int> threads;
  app.option_defaults()->always_capture_default();
  app.add_option("--config", config_path, "experiment config (INI sections per module)");
  app.add_option("--out", out_dir, "output directory for artifacts");
  app.add_option("--seed", seed, "master seed, overrides run.seed");
  app.add_flag("--reproducible", reproducible, "single-threaded, byte-identical artifacts");
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  for (const char* name : {"apply", "dyadic", "decompose", "normest", "sweep", "verify"})
    app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    cfg.command = app.get_subcommands().front()->get_name();
    if (seed) cfg.seed = *seed;
    if (reproducible) cfg.reproducible = true;
    if (threads) cfg.threads = *threads;
    validate_config(cfg);
    set_threads(cfg.reproducible ? 1 : cfg.threads);
    return run_experiment(cfg, out_dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return exit_io;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_assertion;
  }
}

} // namespace hxc
