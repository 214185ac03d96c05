#include "eqdirect/eqdirect.h"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <memory>
#include <string>

namespace {

int fail(eqd_status s) {
  std::cerr << "error: " << eqd_last_error() << "\n";
  return static_cast<int>(s);
}

struct ProblemDeleter {
  void operator()(eqd_problem* p) const { eqd_problem_free(p); }
};
struct ResultDeleter {
  void operator()(eqd_result* r) const { eqd_result_free(r); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Derivative-free global solver for equilibrium problems via gap functions"};
  app.set_version_flag("--version", std::string(eqd_version()));
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random instance suite");
  std::string gen_class;
  int gen_n = 5;
  int gen_count = 100;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--class", gen_class, "problem class")
      ->required()
      ->check(CLI::IsMember({"affine-vi", "trig-vi"}));
  gen->add_option("--n", gen_n, "dimension")->required()->check(CLI::PositiveNumber);
  gen->add_option("--count", gen_count, "number of instances")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "base seed")->required();
  gen->add_option("--out", gen_out, "output directory")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "solve one problem");
  eqd_solve_options so;
  eqd_solve_options_init(&so);
  std::string problem_file;
  std::string algo = "ldirect";
  std::string lbar = "analytic";
  std::string trace_file;
  std::string history_file;
  solve->add_option("--problem", problem_file, "problem JSON file")->required()->check(CLI::ExistingFile);
  solve->add_option("--algo", algo, "direct|ldirect")->capture_default_str()->check(CLI::IsMember({"direct", "ldirect"}));
  solve->add_option("--alpha", so.alpha, "regularization parameter")->capture_default_str();
  solve->add_option("--global-budget", so.global_budget, "DIRECT evaluations")->capture_default_str();
  solve->add_option("--local-budget", so.local_budget, "local search evaluations")->capture_default_str();
  solve->add_option("--eps", so.eps, "selection epsilon")->capture_default_str();
  solve->add_option("--eta", so.eta, "selection eta")->capture_default_str();
  solve->add_option("--lbar", lbar, "analytic|constant:<v>|slope:<f>")->capture_default_str();
  solve->add_option("--trace", trace_file, "per-iteration trace CSV");
  solve->add_option("--history", history_file, "best-value history CSV");
  solve->add_option("--starts", so.starts, "local searches from the best centers")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "run variants over a suite");
  eqd_bench_options bo;
  eqd_bench_options_init(&bo);
  std::string suite_dir;
  std::string algos = bo.algorithms;
  std::string gates = bo.gates;
  std::string bench_lbar = "analytic";
  std::string bench_out;
  bench->add_option("--suite", suite_dir, "suite directory")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--algos", algos, "comma separated variants")->capture_default_str();
  bench->add_option("--alpha", bo.alpha)->capture_default_str();
  bench->add_option("--global-budget", bo.global_budget)->capture_default_str();
  bench->add_option("--local-budget", bo.local_budget)->capture_default_str();
  bench->add_option("--eps", bo.eps)->capture_default_str();
  bench->add_option("--eta", bo.eta)->capture_default_str();
  bench->add_option("--lbar", bench_lbar)->capture_default_str();
  bench->add_option("--tau", bo.tau)->capture_default_str();
  bench->add_option("--gates", gates, "comma separated gap thresholds")->capture_default_str();
  bench->add_option("--threads", bo.threads, "worker threads, 0 = all cores")->capture_default_str();
  bench->add_option("--out", bench_out, "output directory")->required();

  // profile
  auto* profile = app.add_subcommand("profile", "performance or data profile from records");
  std::string records;
  std::string kind = "perf";
  double tau = 1e-3;
  std::string profile_out;
  profile->add_option("--records", records, "records.csv from bench")->required()->check(CLI::ExistingFile);
  profile->add_option("--kind", kind)->capture_default_str()->check(CLI::IsMember({"perf", "data"}));
  profile->add_option("--tau", tau)->capture_default_str();
  profile->add_option("--out", profile_out)->required();

  CLI11_PARSE(app, argc, argv);

  if (*gen) {
    const auto cls = gen_class == "affine-vi" ? EQD_AFFINE_VI : EQD_TRIG_VI;
    if (auto s = eqd_generate_suite(cls, gen_n, gen_count, gen_seed, gen_out.c_str()); s != EQD_OK) return fail(s);
    std::cout << "wrote " << gen_count << " problems to " << gen_out << "\n";
    return 0;
  }

  if (*solve) {
    eqd_problem* raw = nullptr;
    if (auto s = eqd_problem_load(problem_file.c_str(), &raw); s != EQD_OK) return fail(s);
    std::unique_ptr<eqd_problem, ProblemDeleter> p(raw);
    so.algorithm = algo == "direct" ? EQD_ALGO_DIRECT : EQD_ALGO_LDIRECT;
    so.lbar = lbar.c_str();
    eqd_result* rraw = nullptr;
    if (auto s = eqd_solve(p.get(), &so, &rraw); s != EQD_OK) return fail(s);
    std::unique_ptr<eqd_result, ResultDeleter> r(rraw);
    if (!trace_file.empty()) {
      if (auto s = eqd_result_write_trace(r.get(), trace_file.c_str()); s != EQD_OK) return fail(s);
    }
    if (!history_file.empty()) {
      if (auto s = eqd_result_write_history(r.get(), history_file.c_str()); s != EQD_OK) return fail(s);
    }
    std::cout << eqd_result_summary_header(r.get()) << "\n" << eqd_result_summary_row(r.get()) << "\n";
    return 0;
  }

  if (*bench) {
    bo.algorithms = algos.c_str();
    bo.gates = gates.c_str();
    bo.lbar = bench_lbar.c_str();
    if (auto s = eqd_bench_run(suite_dir.c_str(), &bo, bench_out.c_str()); s != EQD_OK) return fail(s);
    std::cout << "results written to " << bench_out << "\n";
    return 0;
  }

  if (*profile) {
    const auto k = kind == "perf" ? EQD_PROFILE_PERF : EQD_PROFILE_DATA;
    if (auto s = eqd_profile(records.c_str(), k, tau, profile_out.c_str()); s != EQD_OK) return fail(s);
    if (const std::string w = eqd_last_warning(); !w.empty()) std::cerr << "warning: " << w << "\n";
    return 0;
  }
  return 0;
}
