#pragma once

#include <random>
#include <vector>

#include "m2x/max2xor.hpp"

namespace m2x::testing {

// Random already-simplified problem: at most one constraint per scope,
// small rational weights.
inline Max2XorProblem random_simplified_problem(std::mt19937_64& rng,
                                                int max_vars = 8) {
  std::uniform_int_distribution<int> nv(1, max_vars);
  std::uniform_int_distribution<int> num(1, 12);
  std::uniform_int_distribution<int> den(1, 6);
  std::uniform_int_distribution<int> rhs(0, 1);
  std::uniform_int_distribution<int> keep(0, 3);
  Max2XorProblem p;
  p.num_vars = nv(rng);
  for (int u = 1; u <= p.num_vars; ++u) {
    if (keep(rng) == 0) p.add_unary(u, rhs(rng), rat(num(rng), den(rng)));
    for (int v = u + 1; v <= p.num_vars; ++v)
      if (keep(rng) == 0) p.add_pair(u, v, rhs(rng), rat(num(rng), den(rng)));
  }
  return simplify(p);
}

// Random problem that may contain mergeable and cancelling constraints.
inline Max2XorProblem random_raw_problem(std::mt19937_64& rng,
                                         int max_vars = 6) {
  std::uniform_int_distribution<int> nv(1, max_vars);
  std::uniform_int_distribution<int> count(0, 12);
  std::uniform_int_distribution<int> num(1, 8);
  std::uniform_int_distribution<int> den(1, 4);
  std::uniform_int_distribution<int> rhs(0, 1);
  Max2XorProblem p;
  p.num_vars = nv(rng);
  std::uniform_int_distribution<int> var(1, p.num_vars);
  int m = count(rng);
  for (int i = 0; i < m; ++i) {
    int u = var(rng), v = var(rng);
    if (u == v)
      p.add_unary(u, rhs(rng), rat(num(rng), den(rng)));
    else
      p.add_pair(u, v, rhs(rng), rat(num(rng), den(rng)));
  }
  return p;
}

inline std::vector<Assignment> all_assignments(int num_vars) {
  std::vector<Assignment> out;
  for (uint64_t code = 0; code < (uint64_t{1} << num_vars); ++code)
    out.push_back(Assignment::from_code(code, num_vars));
  return out;
}

}  // namespace m2x::testing
