#include "eqdirect/direct.hpp"

#include "eqdirect/format.hpp"
#include "eqdirect/gap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

namespace eqd {

double CountingEvaluator::operator()(const Vector& x) {
  const double v = f_(x);
  ++count_;
  if (history_.points.empty() || v < best_value_) {
    best_value_ = v;
    best_point_ = x;
    history_.points.emplace_back(count_, v);
  }
  return v;
}

double Partition::max_diameter() const {
  double d = 0.0;
  for (const auto& r : rectangles) d = std::max(d, r.diameter);
  return d;
}

std::string_view to_string(Variant v) { return v == Variant::Direct ? "direct" : "ldirect"; }

Variant variant_from_string(std::string_view s) {
  if (s == "direct") return Variant::Direct;
  if (s == "ldirect") return Variant::LbarDirect;
  throw UsageError("unknown algorithm '" + std::string(s) + "' (expected direct or ldirect)");
}

LbarMode LbarMode::parse(std::string_view s) {
  auto number = [&](std::string_view tail) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), v);
    if (ec != std::errc() || ptr != tail.data() + tail.size() || !(v > 0.0)) {
      throw UsageError("invalid lbar mode '" + std::string(s) + "': expected a positive number after ':'");
    }
    return v;
  };
  if (s == "analytic") return analytic();
  if (s.starts_with("constant:")) return constant(number(s.substr(9)));
  if (s.starts_with("slope:")) return slope(number(s.substr(6)));
  throw UsageError("invalid lbar mode '" + std::string(s) + "' (expected analytic, constant:<v> or slope:<f>)");
}

void validate(const DirectConfig& cfg) {
  if (!(cfg.epsilon > 0.0)) throw UsageError("epsilon must be > 0");
  if (!(cfg.eta > 0.0)) throw UsageError("eta must be > 0");
  if (cfg.budget < 1) throw UsageError("budget must be >= 1");
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) throw UsageError("alpha must be finite and >= 0");
  if (cfg.lbar_mode.kind != LbarMode::Kind::Analytic && !(cfg.lbar_mode.value > 0.0)) {
    throw UsageError("lbar constant / slope factor must be > 0");
  }
}

// ---------------------------------------------------------------------------
// Lbar providers

namespace {

class AnalyticLbar final : public LbarProvider {
public:
  AnalyticLbar(const ProblemInstance& p, double alpha) : p_(p), est_(p, alpha) {}

  void update(Partition& part, std::span<const std::size_t> changed) override {
    for (std::size_t i : changed) {
      Rectangle& r = part.rectangles[i];
      const BoxSet B{r.lower.cwiseMax(p_.C.lower), r.upper.cwiseMin(p_.C.upper)};
      r.lbar = est_.bound(B).chosen;
    }
  }

private:
  const ProblemInstance& p_;
  LipschitzEstimator est_;
};

class ConstantLbar final : public LbarProvider {
public:
  explicit ConstantLbar(double v) : v_(v) {}
  void update(Partition& part, std::span<const std::size_t> changed) override {
    for (std::size_t i : changed) part.rectangles[i].lbar = v_;
  }

private:
  double v_;
};

// safety * max observed |phi_i - phi_j| / |x_i - x_j| over evaluated centers,
// shared by every rectangle.
class SlopeLbar final : public LbarProvider {
public:
  explicit SlopeLbar(double factor) : factor_(factor) {}

  void update(Partition& part, std::span<const std::size_t>) override {
    for (; seen_ < part.rectangles.size(); ++seen_) {
      const Rectangle& nr = part.rectangles[seen_];
      for (std::size_t j = 0; j < seen_; ++j) {
        const Rectangle& o = part.rectangles[j];
        const double dist = (nr.center - o.center).norm();
        if (dist > 0.0) max_slope_ = std::max(max_slope_, std::abs(nr.center_value - o.center_value) / dist);
      }
    }
    for (auto& r : part.rectangles) r.lbar = factor_ * max_slope_;
  }

private:
  double factor_;
  double max_slope_ = 0.0;
  std::size_t seen_ = 0;
};

double canonical_diameter(const Vector& widths) {
  std::vector<double> sq(static_cast<std::size_t>(widths.size()));
  for (Eigen::Index i = 0; i < widths.size(); ++i) sq[static_cast<std::size_t>(i)] = widths[i] * widths[i];
  // Summation order fixed by value, so rectangles whose side multisets agree
  // get bit-identical diameters.
  std::sort(sq.begin(), sq.end());
  double s = 0.0;
  for (double v : sq) s += v;
  return std::sqrt(s);
}

Vector widths_from_depth(const BoxSet& C, const std::vector<int>& depth) {
  Vector w(C.dim());
  for (Eigen::Index i = 0; i < C.dim(); ++i) {
    w[i] = (C.upper[i] - C.lower[i]) / std::pow(3.0, depth[static_cast<std::size_t>(i)]);
  }
  return w;
}

void set_geometry(const BoxSet& C, Rectangle& r) {
  const Vector w = widths_from_depth(C, r.depth);
  r.lower.resize(C.dim());
  r.upper.resize(C.dim());
  // Cell index k along each axis; faces are C.lower + k w, with the last face
  // pinned to C.upper.
  for (Eigen::Index i = 0; i < C.dim(); ++i) {
    const double cells = std::pow(3.0, r.depth[static_cast<std::size_t>(i)]);
    const double k = std::floor((r.center[i] - C.lower[i]) / w[i]);
    r.lower[i] = k == 0.0 ? C.lower[i] : C.lower[i] + k * w[i];
    r.upper[i] = k + 1.0 >= cells ? C.upper[i] : C.lower[i] + (k + 1.0) * w[i];
    r.lower[i] = std::min(r.lower[i], r.center[i]);
    r.upper[i] = std::max(r.upper[i], r.center[i]);
  }
  r.diameter = canonical_diameter(w);
}

void record(Partition& part, const Rectangle& r) {
  if (r.center_value < part.phi_min) {
    part.phi_min = r.center_value;
    part.best_point = r.center;
  }
}

// Trisection along the longest sides must produce centers distinct from the
// parent's in floating point.
bool divisible(const Partition& part, std::size_t h) {
  const Rectangle& r = part.rectangles[h];
  const Vector w = widths_from_depth(part.C, r.depth);
  const double wmax = w.maxCoeff();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] != wmax) continue;
    const double delta = wmax / 3.0;
    const double lo = std::max(r.center[i] - delta, part.C.lower[i]);
    const double hi = std::min(r.center[i] + delta, part.C.upper[i]);
    if (!(lo < r.center[i] && r.center[i] < hi)) return false;
  }
  return wmax > 0.0;
}

}  // namespace

std::unique_ptr<LbarProvider> make_lbar_provider(const ProblemInstance& p, const DirectConfig& cfg) {
  switch (cfg.lbar_mode.kind) {
    case LbarMode::Kind::Analytic: return std::make_unique<AnalyticLbar>(p, cfg.alpha);
    case LbarMode::Kind::Constant: return std::make_unique<ConstantLbar>(cfg.lbar_mode.value);
    case LbarMode::Kind::SlopeEstimate: return std::make_unique<SlopeLbar>(cfg.lbar_mode.value);
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Partition operations

Partition initialize(const BoxSet& C, CountingEvaluator& eval, LbarProvider* lbar) {
  for (Eigen::Index i = 0; i < C.dim(); ++i) {
    if (!(C.lower[i] < C.upper[i])) throw UsageError("DIRECT needs a nondegenerate box");
  }
  Partition part;
  part.C = C;
  Rectangle r;
  r.depth.assign(static_cast<std::size_t>(C.dim()), 0);
  r.center = 0.5 * (C.lower + C.upper);
  set_geometry(C, r);
  r.center_value = eval(r.center);
  part.rectangles.push_back(std::move(r));
  part.eval_count = 1;
  record(part, part.rectangles.front());
  if (lbar) {
    const std::size_t idx[] = {0};
    lbar->update(part, idx);
  }
  return part;
}

Partition initialize(const ProblemInstance& p, const DirectConfig& cfg, CountingEvaluator& eval) {
  auto provider = make_lbar_provider(p, cfg);
  return initialize(p.C, eval, provider.get());
}

namespace {

struct DiameterClass {
  double d = 0.0;
  double fmin = 0.0;
  std::vector<std::size_t> members;  // rectangles attaining fmin
};

std::vector<DiameterClass> class_minima(const Partition& part) {
  std::map<double, DiameterClass> classes;
  for (std::size_t i = 0; i < part.rectangles.size(); ++i) {
    const Rectangle& r = part.rectangles[i];
    auto [it, inserted] = classes.try_emplace(r.diameter);
    DiameterClass& c = it->second;
    if (inserted || r.center_value < c.fmin) {
      c.d = r.diameter;
      c.fmin = r.center_value;
      c.members.assign(1, i);
    } else if (r.center_value == c.fmin) {
      c.members.push_back(i);
    }
  }
  std::vector<DiameterClass> out;
  out.reserve(classes.size());
  for (auto& [d, c] : classes) out.push_back(std::move(c));
  return out;  // ascending diameter
}

// Interval [lo, hi] of K = L/2 for which f_j - K d_j <= f_k - K d_k holds
// against every other class minimum.
std::pair<double, double> slope_interval(const std::vector<DiameterClass>& cls, std::size_t j) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  const DiameterClass& cj = cls[j];
  for (std::size_t k = 0; k < cls.size(); ++k) {
    if (k == j) continue;
    const DiameterClass& ck = cls[k];
    if (ck.d < cj.d) {
      lo = std::max(lo, (cj.fmin - ck.fmin) / (cj.d - ck.d));
    } else {
      hi = std::min(hi, (ck.fmin - cj.fmin) / (ck.d - cj.d));
    }
  }
  return {lo, hi};
}

}  // namespace

std::vector<std::size_t> select_potentially_optimal(const Partition& part, double epsilon) {
  std::vector<std::size_t> out;
  if (part.rectangles.empty()) return out;
  const auto cls = class_minima(part);
  const double phi_min = part.phi_min;
  for (std::size_t j = 0; j < cls.size(); ++j) {
    auto [lo, hi] = slope_interval(cls, j);
    if (cls[j].d > 0.0) {
      lo = std::max(lo, (cls[j].fmin - phi_min + epsilon * std::abs(phi_min)) / cls[j].d);
    } else if (cls[j].fmin > phi_min - epsilon * std::abs(phi_min)) {
      continue;
    }
    // some K > 0 with lo <= K <= hi
    if (hi > 0.0 && lo <= hi) out.insert(out.end(), cls[j].members.begin(), cls[j].members.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> select_lbar_potentially_optimal(const Partition& part, double epsilon, double eta) {
  std::vector<std::size_t> out;
  if (part.rectangles.empty()) return out;
  for (const auto& r : part.rectangles) {
    if (!(r.lbar >= 0.0) || !std::isfinite(r.lbar)) {
      throw UsageError("select_lbar_potentially_optimal: rectangle without a valid lbar");
    }
  }
  const auto cls = class_minima(part);
  const double phi_min = part.phi_min;
  const double required = epsilon * std::max(std::abs(phi_min), eta);
  for (std::size_t j = 0; j < cls.size(); ++j) {
    auto [lo, hi] = slope_interval(cls, j);
    if (cls[j].d > 0.0) lo = std::max(lo, (cls[j].fmin - phi_min + required) / cls[j].d);
    for (std::size_t h : cls[j].members) {
      const double cap = 0.5 * part.rectangles[h].lbar;
      // (i): K in [lo, hi] intersected with (0, lbar/2)
      bool selected = cls[j].d > 0.0 && hi > 0.0 && lo <= hi && lo < cap && cap > 0.0;
      if (!selected) {
        // (ii): fixed K = lbar_h / 2
        const double own = cls[j].fmin - cap * cls[j].d;
        selected = std::all_of(cls.begin(), cls.end(),
                               [&](const DiameterClass& c) { return own <= c.fmin - cap * c.d; });
      }
      if (selected) out.push_back(h);
    }
  }
  if (out.empty()) out.push_back(lower_bound_gap(part).index);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> trisect(Partition& part, std::size_t h, CountingEvaluator& eval, LbarProvider* lbar) {
  if (h >= part.rectangles.size()) throw UsageError("trisect: index out of range");
  const BoxSet& C = part.C;
  const Vector widths = widths_from_depth(C, part.rectangles[h].depth);
  const double wmax = widths.maxCoeff();
  if (!divisible(part, h)) throw NumericError("trisect: rectangle is at floating-point resolution");
  const Vector center = part.rectangles[h].center;

  struct Sample {
    Eigen::Index dim;
    double minus, plus;
    double at_minus, at_plus;  // sampled coordinate along dim
  };
  std::vector<Sample> samples;
  for (Eigen::Index i = 0; i < widths.size(); ++i) {
    if (widths[i] != wmax) continue;
    const double delta = widths[i] / 3.0;
    Vector xm = center, xp = center;
    xm[i] = std::max(xm[i] - delta, C.lower[i]);
    xp[i] = std::min(xp[i] + delta, C.upper[i]);
    Sample s{i, eval(xm), eval(xp), xm[i], xp[i]};
    part.eval_count += 2;
    samples.push_back(s);
  }
  std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    return std::min(a.minus, a.plus) < std::min(b.minus, b.plus);
  });

  std::vector<std::size_t> changed{h};
  std::vector<int> depth = part.rectangles[h].depth;
  for (const Sample& s : samples) {
    const auto dim = static_cast<std::size_t>(s.dim);
    depth[dim] += 1;
    for (int sign : {-1, +1}) {
      Rectangle child;
      child.center = center;
      child.center[s.dim] = sign < 0 ? s.at_minus : s.at_plus;
      child.depth = depth;
      child.center_value = sign < 0 ? s.minus : s.plus;
      set_geometry(C, child);
      record(part, child);
      changed.push_back(part.rectangles.size());
      part.rectangles.push_back(std::move(child));
    }
  }
  Rectangle& parent = part.rectangles[h];
  parent.depth = depth;
  set_geometry(C, parent);
  if (lbar) lbar->update(part, changed);
  return {changed.begin() + 1, changed.end()};
}

GapCertificate lower_bound_gap(const Partition& part) {
  if (part.rectangles.empty()) throw UsageError("lower_bound_gap: empty partition");
  GapCertificate best;
  double best_lb = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < part.rectangles.size(); ++i) {
    const Rectangle& r = part.rectangles[i];
    if (std::isnan(r.lbar)) throw UsageError("lower_bound_gap: rectangle without lbar");
    const double lb = r.center_value - 0.5 * r.lbar * r.diameter;
    if (lb < best_lb) {
      best_lb = lb;
      best.index = i;
      best.bound = 0.5 * r.lbar * r.diameter;
    }
  }
  return best;
}

DirectResult run_direct(const BoxSet& C, const CountingEvaluator::Objective& f, const DirectConfig& cfg,
                        LbarProvider* lbar) {
  validate(cfg);
  if (cfg.variant == Variant::LbarDirect && !lbar) throw UsageError("Lbar-DIRECT needs an lbar provider");
  CountingEvaluator eval(f);
  DirectResult res;
  res.partition = initialize(C, eval, lbar);
  Partition& part = res.partition;

  auto push_trace = [&](std::int64_t iteration) {
    TraceRow row;
    row.iteration = iteration;
    row.eval_count = part.eval_count;
    row.phi_best = part.phi_min;
    row.gap_bound = lbar ? lower_bound_gap(part).bound : std::numeric_limits<double>::quiet_NaN();
    row.num_rectangles = part.rectangles.size();
    row.max_diameter = part.max_diameter();
    res.trace.push_back(row);
  };
  push_trace(0);

  for (std::int64_t iteration = 1; part.eval_count < cfg.budget; ++iteration) {
    const auto selected = cfg.variant == Variant::Direct
                              ? select_potentially_optimal(part, cfg.epsilon)
                              : select_lbar_potentially_optimal(part, cfg.epsilon, cfg.eta);
    bool divided = false;
    for (std::size_t h : selected) {
      if (part.eval_count >= cfg.budget) break;
      if (!divisible(part, h)) continue;
      trisect(part, h, eval, lbar);
      divided = true;
    }
    if (!divided) {
      // every selected rectangle is at floating-point resolution; fall back
      // to the largest one that can still be divided
      std::optional<std::size_t> widest;
      for (std::size_t i = 0; i < part.rectangles.size(); ++i) {
        if (divisible(part, i) && (!widest || part.rectangles[i].diameter > part.rectangles[*widest].diameter)) {
          widest = i;
        }
      }
      if (!widest) break;
      trisect(part, *widest, eval, lbar);
    }
    push_trace(iteration);
  }

  res.history = eval.history();
  res.best_value = part.phi_min;
  res.best_point = part.best_point;
  res.evals_used = part.eval_count;
  if (lbar) res.gap_bound = lower_bound_gap(part).bound;
  return res;
}

DirectResult run_direct(const ProblemInstance& p, const DirectConfig& cfg) {
  validate(cfg);
  auto provider = make_lbar_provider(p, cfg);
  const double alpha = cfg.alpha;
  return run_direct(
      p.C, [&p, alpha](const Vector& x) { return gap_value(p, x, alpha).value; }, cfg, provider.get());
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace file " + path.string());
  out << "iteration,eval_count,phi_best,gap_bound,num_rectangles\n";
  for (const auto& r : trace) {
    out << r.iteration << ',' << r.eval_count << ',' << format_double(r.phi_best) << ','
        << (std::isnan(r.gap_bound) ? std::string() : format_double(r.gap_bound)) << ',' << r.num_rectangles
        << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace eqd
