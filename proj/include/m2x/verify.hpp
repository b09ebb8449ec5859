#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "m2x/gadgets.hpp"
#include "m2x/max2xor.hpp"

namespace m2x {

// Truth value of the source constraint under an x-assignment; bit i of the
// code corresponds to app.clause_vars[i].
using SourcePredicate = std::function<bool(uint64_t x_code)>;

SourcePredicate clause_predicate(const Clause& c);
// (l1 v l2) <-> l3 over the three clause positions
SourcePredicate or_equivalence_predicate(const Clause& src);

struct PerAssignmentRow {
  uint64_t x_code = 0;
  bool source_satisfied = false;
  Rational best_extension;
  bool attains_alpha_minus_one = false;  // meaningful on falsifying rows
};

struct GadgetCertificate {
  Rational alpha;
  Rational beta;  // total constraint weight
  bool strict = false;         // alpha-1 attained on every falsifying row
  bool strict_some = false;    // ... on at least one (weaker reading)
  std::optional<Rational> gap; // alpha - best falsifying extension
  std::optional<Rational> delta_e;
  std::vector<PerAssignmentRow> table;
};

struct CertifyOutcome {
  bool ok = false;
  std::string failure;  // "not a gadget" / bound violation, with the witness
  std::optional<uint64_t> witness_x;
  GadgetCertificate cert;
};

// Enumerates every x-assignment and, for each, every auxiliary extension.
// alpha must be attained exactly by every satisfying x-assignment's best
// extension; falsifying ones must stay <= alpha-1.
CertifyOutcome certify_gadget(const GadgetApplication& app,
                              const SourcePredicate& source,
                              int var_bound = 24);
CertifyOutcome certify_gadget(const GadgetApplication& app, const Clause& c,
                              int var_bound = 24);

// Certificate summary in the figure-caption style "(a,b)-gadget, dE=...".
std::string describe_certificate(const GadgetCertificate& cert);

// --- Opt/Cost bookkeeping ----------------------------------------------------

struct OptCostReport {
  Rational opt_f, cost_f;  // MaxSAT view of F, unit clause weights
  Rational opt_p, cost_p;  // compiled Max2XOR problem
  Rational sum_alpha_minus_one;
  Rational sum_beta_minus_alpha;
  Rational unsat_threshold;
  bool all_strict = false;
  bool opt_relation_holds = false;
  bool cost_relation_holds = false;
  bool unsat_classification_correct = false;

  bool ok() const {
    return opt_relation_holds && cost_relation_holds &&
           unsat_classification_correct;
  }
};

// Enumerates F over the original variables and the compiled problem over all
// variables; checks Opt(P') = sum(alpha-1) + Opt(F) and
// Cost(P') = sum(beta-alpha) + Cost(F) (equalities for strict gadgets,
// inequalities otherwise) plus the unsatisfiability threshold test.
OptCostReport check_opt_cost_relation(const CnfFormula& f,
                                      const Strategy& strategy,
                                      int var_bound = 24);

// --- simulated annealing -------------------------------------------------------

struct AnnealSchedule {
  double t_start = 2.0;
  double t_end = 0.02;
  int sweeps = 3000;
  int restarts = 4;  // internal restarts per call, all driven by one seed
};

struct AnnealResult {
  Rational best_value;  // min falsified weight + offset (Cost estimate)
  Assignment best_assignment;
  std::vector<double> trace;  // best falsified weight after each sweep
};

// Geometric-temperature simulated annealing; deterministic for a fixed seed.
// Proposal energies use doubles, the returned best assignment is re-scored
// exactly in rationals.
AnnealResult anneal_solve(const Max2XorProblem& p, const AnnealSchedule& s,
                          uint64_t seed);

struct IsingAnnealResult {
  Rational best_energy;
  Assignment best_assignment;  // true = spin +1
  std::vector<double> trace;
};

IsingAnnealResult anneal_solve_ising(const struct IsingModel& m,
                                     const AnnealSchedule& s, uint64_t seed);

// --- tree lemma checks ------------------------------------------------------------

struct TreeLemmaReport {
  int k = 0;
  int constraint_count = 0;
  int max_satisfied = 0;
  bool count_ok = false;              // 3(k-1) constraints
  bool max_ok = false;                // no assignment beats 2(k-1)
  bool extension_ok = false;          // every x extends to 2(k-1) with
                                      // root = clause value
  bool falsified_root_true_ok = false;  // root forced true on a falsified
                                        // clause caps at 2(k-2)
  bool ok() const {
    return count_ok && max_ok && extension_ok && falsified_root_true_ok;
  }
};

// Counts constraints (not weights) on the tree gadget with an explicit root
// variable.
TreeLemmaReport check_tree_lemma(int k, const TreeShape& shape);

}  // namespace m2x
