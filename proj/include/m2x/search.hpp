#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "m2x/gadgets.hpp"
#include "m2x/verify.hpp"

namespace m2x {

// Search instance: OR clause of width k, a fixed number of auxiliary
// variables, weighted 2XOR constraints over all unary and pairwise scopes.
struct SearchProblem {
  int k = 3;
  int num_aux = 1;
  bool strict_required = true;
};

// 2*((k+A) + C(k+A,2)) candidate weighted constraints
int search_pool_size(const SearchProblem& spec);

enum class SearchStatus { found, infeasible, unknown };

struct SearchResult {
  SearchStatus status = SearchStatus::unknown;
  bool optimal = false;  // exact search closed the whole tree
  GadgetApplication gadget;  // meaningful when status == found
  Rational alpha, beta, delta_e;
  GadgetCertificate certificate;
  long nodes = 0;
  long lp_solves = 0;
};

struct SearchOptions {
  bool exact = true;  // branch-and-bound; otherwise seeded alternation only
  uint64_t seed = 1;
  int heuristic_restarts = 24;
  int heuristic_iters = 25;
  long node_budget = 5'000'000;
};

// Maximizes the energy gap over all (alpha,beta)-gadgets with the requested
// signature. Exact mode branches over witness extensions with an exact
// rational LP relaxation; heuristic mode alternates between witness
// recomputation and the LP from seeded starts and never claims optimality.
SearchResult search_gadget(const SearchProblem& spec,
                           const SearchOptions& opt = {});

enum class OptimalityOutcome { certified_true, certified_false, unknown };

// True iff no gadget for `spec` has an energy gap strictly above `claimed`.
// Heuristic-only mode reports unknown, never a false positive.
OptimalityOutcome certify_optimality(const SearchProblem& spec,
                                     const Rational& claimed_delta_e,
                                     const SearchOptions& opt = {});

std::string to_string(SearchStatus status);

}  // namespace m2x
