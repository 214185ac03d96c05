#include "eqdirect/instance_gen.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <random>

namespace eqd {

namespace {

// std::mt19937_64 and std::seed_seq are fully specified by the standard, so
// streams are identical across platforms. Distributions are not, hence the
// explicit 53-bit conversion.
class Stream {
public:
  Stream(std::uint64_t seed, std::uint64_t index, std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), tag};
    engine_.seed(seq);
  }

  // [0, 1)
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * unit(); }
  // (0, hi]
  double positive(double hi) {
    for (;;) {
      const double v = hi * (1.0 - unit());
      if (v > 0.0) return v;
    }
  }

private:
  std::mt19937_64 engine_;
};

std::string make_id(ProblemClass c, int n, std::uint64_t seed, std::uint64_t index) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s-n%d-s%llu-i%04llu", std::string(to_string(c)).c_str(), n,
                static_cast<unsigned long long>(seed), static_cast<unsigned long long>(index));
  return buf;
}

void fill_common(Stream& rng, int n, Matrix& P, Vector& r) {
  P.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) P(i, j) = rng.uniform(0.0, 3.0);
  }
  r.resize(n);
  for (int i = 0; i < n; ++i) r[i] = rng.uniform(-2.0, 2.0);
}

BoxSet draw_box(Stream& rng, int n) {
  BoxSet C{Vector(n), Vector(n)};
  for (int i = 0; i < n; ++i) C.lower[i] = rng.uniform(-2.0, 0.0);
  for (int i = 0; i < n; ++i) C.upper[i] = rng.uniform(1.0, 3.0);
  return C;
}

}  // namespace

ProblemInstance gen_affine_vi(int n, std::uint64_t seed, std::uint64_t index) {
  if (n < 1) throw UsageError("n must be >= 1");
  Stream rng(seed, index, 1);
  AffineVISpec s;
  fill_common(rng, n, s.P, s.r);
  ProblemInstance p{make_id(ProblemClass::AffineVI, n, seed, index), s, draw_box(rng, n)};
  validate(p);
  return p;
}

ProblemInstance gen_trig_vi(int n, std::uint64_t seed, std::uint64_t index) {
  if (n < 1) throw UsageError("n must be >= 1");
  Stream rng(seed, index, 2);
  TrigVISpec s;
  fill_common(rng, n, s.P, s.r);
  s.w.resize(n);
  s.v.resize(n);
  for (int i = 0; i < n; ++i) s.w[i] = rng.positive(4.0);
  for (int i = 0; i < n; ++i) s.v[i] = rng.positive(2.0);
  ProblemInstance p{make_id(ProblemClass::TrigVI, n, seed, index), s, draw_box(rng, n)};
  validate(p);
  return p;
}

std::vector<ProblemInstance> generate_suite(const GenSpec& spec) {
  if (spec.n < 1 || spec.count < 1) throw UsageError("n and count must be >= 1");
  std::vector<ProblemInstance> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int k = 0; k < spec.count; ++k) {
    const auto idx = static_cast<std::uint64_t>(k);
    switch (spec.problem_class) {
      case ProblemClass::AffineVI: out.push_back(gen_affine_vi(spec.n, spec.seed, idx)); break;
      case ProblemClass::TrigVI: out.push_back(gen_trig_vi(spec.n, spec.seed, idx)); break;
      case ProblemClass::AffineEP: throw UsageError("no random generator for affine EPs");
    }
  }
  return out;
}

std::vector<std::filesystem::path> write_suite(const GenSpec& spec, const std::filesystem::path& dir) {
  const auto suite = generate_suite(spec);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> paths;
  for (const auto& p : suite) {
    paths.push_back(dir / (p.id + ".json"));
    save_problem(p, paths.back());
  }
  nlohmann::ordered_json manifest;
  manifest["class"] = std::string(to_string(spec.problem_class));
  manifest["n"] = spec.n;
  manifest["count"] = spec.count;
  manifest["seed"] = spec.seed;
  manifest["generator"] = "mt19937_64, seed_seq{seed_lo, seed_hi, index_lo, index_hi, class_tag}";
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
  return paths;
}

}  // namespace eqd
