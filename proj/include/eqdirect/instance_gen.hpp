#pragma once

#include "eqdirect/problem.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace eqd {

struct GenSpec {
  ProblemClass problem_class = ProblemClass::AffineVI;
  int n = 5;
  int count = 100;
  std::uint64_t seed = 0;
};

/// P ~ U[0,3], r ~ U[-2,2], l ~ U[-2,0], u ~ U[1,3]. Instance `index` of a
/// suite draws from its own stream seeded by (seed, index), so adding
/// instances never changes earlier ones.
ProblemInstance gen_affine_vi(int n, std::uint64_t seed, std::uint64_t index = 0);

/// As gen_affine_vi plus w ~ U(0,4], v ~ U(0,2].
ProblemInstance gen_trig_vi(int n, std::uint64_t seed, std::uint64_t index = 0);

std::vector<ProblemInstance> generate_suite(const GenSpec& spec);

/// Writes one problem file per instance plus manifest.json into `dir`.
/// Returns the written problem paths.
std::vector<std::filesystem::path> write_suite(const GenSpec& spec, const std::filesystem::path& dir);

}  // namespace eqd
