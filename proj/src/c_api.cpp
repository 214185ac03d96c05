#include "eqdirect/eqdirect.h"

#include "eqdirect/bench.hpp"
#include "eqdirect/gap.hpp"
#include "eqdirect/instance_gen.hpp"
#include "eqdirect/lipschitz.hpp"
#include "eqdirect/solver.hpp"

#include <charconv>
#include <exception>
#include <string>

struct eqd_problem {
  eqd::ProblemInstance p;
};

struct eqd_result {
  eqd::SolveResult r;
  std::string header;
  std::string row;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_warning;

template <class F>
eqd_status guarded(F&& f) {
  try {
    f();
    return EQD_OK;
  } catch (const eqd::UsageError& e) {
    g_last_error = e.what();
    return EQD_ERR_USAGE;
  } catch (const eqd::ParseError& e) {
    g_last_error = e.what();
    return EQD_ERR_PARSE;
  } catch (const eqd::InvariantError& e) {
    g_last_error = e.what();
    return EQD_ERR_INVARIANT;
  } catch (const eqd::NumericError& e) {
    g_last_error = e.what();
    return EQD_ERR_NUMERIC;
  } catch (const eqd::IoError& e) {
    g_last_error = e.what();
    return EQD_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EQD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return EQD_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw eqd::UsageError(what);
}

eqd::Vector to_vector(const double* x, Eigen::Index n) {
  return Eigen::Map<const eqd::Vector>(x, n);
}

eqd::Variant to_variant(eqd_algorithm a) {
  if (a == EQD_ALGO_DIRECT) return eqd::Variant::Direct;
  if (a == EQD_ALGO_LDIRECT) return eqd::Variant::LbarDirect;
  throw eqd::UsageError("unknown algorithm code");
}

std::vector<std::string> split(const char* s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char* c = s; *c; ++c) {
    if (*c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (*c != ' ') {
      cur += *c;
    }
  }
  out.push_back(cur);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw eqd::UsageError("not a number: '" + s + "'");
  return v;
}

}  // namespace

extern "C" {

const char* eqd_version(void) { return "1.0.0"; }
const char* eqd_last_error(void) { return g_last_error.c_str(); }
const char* eqd_last_warning(void) { return g_last_warning.c_str(); }

eqd_status eqd_problem_load(const char* path, eqd_problem** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new eqd_problem{eqd::load_problem(path)};
  });
}

eqd_status eqd_problem_save(const eqd_problem* p, const char* path) {
  return guarded([&] {
    require(p && path, "null argument");
    eqd::save_problem(p->p, path);
  });
}

eqd_status eqd_problem_generate(eqd_problem_class cls, int n, uint64_t seed, uint64_t index, eqd_problem** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    switch (cls) {
      case EQD_AFFINE_VI: *out = new eqd_problem{eqd::gen_affine_vi(n, seed, index)}; break;
      case EQD_TRIG_VI: *out = new eqd_problem{eqd::gen_trig_vi(n, seed, index)}; break;
      default: throw eqd::UsageError("no random generator for this problem class");
    }
  });
}

void eqd_problem_free(eqd_problem* p) { delete p; }
int eqd_problem_dim(const eqd_problem* p) { return p ? static_cast<int>(p->p.n()) : 0; }
const char* eqd_problem_id(const eqd_problem* p) { return p ? p->p.id.c_str() : ""; }

eqd_problem_class eqd_problem_get_class(const eqd_problem* p) {
  switch (p->p.problem_class()) {
    case eqd::ProblemClass::AffineVI: return EQD_AFFINE_VI;
    case eqd::ProblemClass::TrigVI: return EQD_TRIG_VI;
    case eqd::ProblemClass::AffineEP: return EQD_AFFINE_EP;
  }
  return EQD_AFFINE_VI;
}

eqd_status eqd_gap_value(const eqd_problem* p, const double* x, double alpha, double* value, double* maximizer) {
  return guarded([&] {
    require(p && x && value, "null argument");
    const auto e = eqd::gap_value(p->p, to_vector(x, p->p.n()), alpha);
    *value = e.value;
    if (maximizer) Eigen::Map<eqd::Vector>(maximizer, p->p.n()) = e.maximizer;
  });
}

eqd_status eqd_gap_gradient(const eqd_problem* p, const double* x, double alpha, double* grad) {
  return guarded([&] {
    require(p && x && grad, "null argument");
    Eigen::Map<eqd::Vector>(grad, p->p.n()) = eqd::gap_gradient(p->p, to_vector(x, p->p.n()), alpha);
  });
}

eqd_status eqd_lipschitz_bound(const eqd_problem* p, const double* box_lower, const double* box_upper,
                               double alpha, double* chosen) {
  return guarded([&] {
    require(p && box_lower && box_upper && chosen, "null argument");
    const eqd::BoxSet B{to_vector(box_lower, p->p.n()), to_vector(box_upper, p->p.n())};
    *chosen = eqd::gap_lipschitz_bound(p->p, B, alpha).chosen;
  });
}

void eqd_solve_options_init(eqd_solve_options* opts) {
  if (!opts) return;
  const eqd::SolveOptions d;
  opts->algorithm = EQD_ALGO_LDIRECT;
  opts->alpha = d.alpha;
  opts->global_budget = d.global_budget;
  opts->local_budget = d.local_budget;
  opts->eps = d.epsilon;
  opts->eta = d.eta;
  opts->lbar = nullptr;
  opts->starts = d.starts;
}

eqd_status eqd_solve(const eqd_problem* p, const eqd_solve_options* opts, eqd_result** out) {
  return guarded([&] {
    require(p && opts && out, "null argument");
    eqd::SolveOptions so;
    so.variant = to_variant(opts->algorithm);
    so.alpha = opts->alpha;
    so.global_budget = opts->global_budget;
    so.local_budget = opts->local_budget;
    so.epsilon = opts->eps;
    so.eta = opts->eta;
    so.lbar_mode = opts->lbar ? eqd::LbarMode::parse(opts->lbar) : eqd::LbarMode::analytic();
    so.starts = opts->starts;
    auto res = std::make_unique<eqd_result>();
    res->r = eqd::solve(p->p, so);
    res->header = eqd::summary_csv_header();
    res->row = eqd::summary_csv_row(res->r);
    *out = res.release();
  });
}

void eqd_result_free(eqd_result* r) { delete r; }
double eqd_result_best_phi(const eqd_result* r) { return r->r.best_phi; }
int64_t eqd_result_evals_used(const eqd_result* r) { return r->r.evals_used; }

int eqd_result_gap_bound(const eqd_result* r, double* bound) {
  if (!r->r.gap_bound) return 0;
  if (bound) *bound = *r->r.gap_bound;
  return 1;
}

void eqd_result_best_x(const eqd_result* r, double* x) {
  Eigen::Map<eqd::Vector>(x, r->r.best_x.size()) = r->r.best_x;
}

size_t eqd_result_history_size(const eqd_result* r) { return r->r.history.size(); }

void eqd_result_history_at(const eqd_result* r, size_t i, int64_t* eval_count, double* best_phi) {
  const auto& pt = r->r.history.at(i);
  if (eval_count) *eval_count = pt.first;
  if (best_phi) *best_phi = pt.second;
}

void eqd_result_evals_to_gaps(const eqd_result* r, const double* gates, size_t n_gates, int64_t* out) {
  const auto res = eqd::evals_to_gaps(r->r, std::span<const double>(gates, n_gates));
  for (size_t i = 0; i < n_gates; ++i) out[i] = res[i] ? *res[i] : -1;
}

eqd_status eqd_result_write_trace(const eqd_result* r, const char* path) {
  return guarded([&] {
    require(r && path, "null argument");
    eqd::write_trace_csv(r->r.trace, path);
  });
}

eqd_status eqd_result_write_history(const eqd_result* r, const char* path) {
  return guarded([&] {
    require(r && path, "null argument");
    eqd::write_history_csv(r->r, path);
  });
}

const char* eqd_result_summary_header(const eqd_result* r) { return r->header.c_str(); }
const char* eqd_result_summary_row(const eqd_result* r) { return r->row.c_str(); }

eqd_status eqd_generate_suite(eqd_problem_class cls, int n, int count, uint64_t seed, const char* out_dir) {
  return guarded([&] {
    require(out_dir != nullptr, "null argument");
    eqd::GenSpec spec;
    switch (cls) {
      case EQD_AFFINE_VI: spec.problem_class = eqd::ProblemClass::AffineVI; break;
      case EQD_TRIG_VI: spec.problem_class = eqd::ProblemClass::TrigVI; break;
      default: throw eqd::UsageError("no random generator for this problem class");
    }
    spec.n = n;
    spec.count = count;
    spec.seed = seed;
    eqd::write_suite(spec, out_dir);
  });
}

void eqd_bench_options_init(eqd_bench_options* opts) {
  if (!opts) return;
  opts->algorithms = "direct,ldirect";
  opts->alpha = 1.0;
  opts->global_budget = 500;
  opts->local_budget = 100;
  opts->eps = 1e-4;
  opts->eta = 1e-4;
  opts->lbar = nullptr;
  opts->tau = 1e-3;
  opts->gates = "1e-1,1e-3,1e-5";
  opts->threads = 0;
}

eqd_status eqd_bench_run(const char* suite_dir, const eqd_bench_options* opts, const char* out_dir) {
  return guarded([&] {
    require(suite_dir && opts && out_dir, "null argument");
    eqd::BenchOptions bo;
    bo.variants.clear();
    for (const auto& a : split(opts->algorithms ? opts->algorithms : "direct,ldirect")) {
      bo.variants.push_back(eqd::variant_from_string(a));
    }
    bo.gates.clear();
    for (const auto& g : split(opts->gates ? opts->gates : "1e-1,1e-3,1e-5")) {
      const double v = to_double(g);
      require(v > 0.0, "gates must be positive");
      bo.gates.push_back(v);
    }
    require(opts->tau > 0.0, "tau must be positive");
    bo.tau = opts->tau;
    bo.threads = opts->threads;
    bo.solve.alpha = opts->alpha;
    bo.solve.global_budget = opts->global_budget;
    bo.solve.local_budget = opts->local_budget;
    bo.solve.epsilon = opts->eps;
    bo.solve.eta = opts->eta;
    bo.solve.lbar_mode = opts->lbar ? eqd::LbarMode::parse(opts->lbar) : eqd::LbarMode::analytic();
    eqd::run_bench(suite_dir, bo, out_dir);
  });
}

eqd_status eqd_profile(const char* records_csv, eqd_profile_kind kind, double tau, const char* out_csv) {
  return guarded([&] {
    require(records_csv && out_csv, "null argument");
    require(tau > 0.0, "tau must be positive");
    g_last_warning.clear();
    const auto records = eqd::read_records_csv(records_csv);
    eqd::Profile prof;
    if (kind == EQD_PROFILE_PERF) {
      prof = eqd::performance_profile(records, tau);
      eqd::write_profile_csv(prof, "theta", out_csv);
    } else if (kind == EQD_PROFILE_DATA) {
      prof = eqd::data_profile(records, tau);
      eqd::write_profile_csv(prof, "kappa", out_csv);
    } else {
      throw eqd::UsageError("unknown profile kind");
    }
    g_last_warning = prof.warning;
  });
}

}  // extern "C"
