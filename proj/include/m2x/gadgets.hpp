#pragma once

#include <initializer_list>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "m2x/formula.hpp"
#include "m2x/max2xor.hpp"

namespace m2x {

struct GadgetParams {
  std::string name;
  std::string from_family;  // e.g. "3sat", "max2sat", "or-equivalence"
  std::string to_family;    // e.g. "max2xor", "3sat"
  Rational alpha;
  Rational beta;
  std::optional<Rational> delta_e;  // unset where not applicable (CNF output)
  std::optional<int> num_aux;       // unset for composed params
  bool strict = false;
  // Source-figure values recorded when they differ from the certified ones;
  // never silently reconciled.
  std::optional<Rational> paper_claimed_alpha;
  std::optional<Rational> paper_claimed_delta_e;
};

struct GadgetApplication {
  Max2XorProblem fragment;      // scopes within clause_vars ∪ aux_vars
  std::vector<int> clause_vars; // in clause literal order
  std::vector<int> aux_vars;    // freshly allocated, disjoint from clause_vars
  GadgetParams params;
};

// --- negation rewriting ---------------------------------------------------

// Parity constraint over literals, before polarity folding.
struct LitXorConstraint {
  Literal a;
  std::optional<Literal> b;
  int rhs = 0;
  Rational weight;
};

// ¬x ⊕ C = k is equivalent to x ⊕ C = 1-k: each negated literal in the
// scope flips rhs once (a doubly negated pair restores it).
XorConstraint rewrite_negations(const LitXorConstraint& c);
std::vector<XorConstraint> rewrite_negations(
    const std::vector<LitXorConstraint>& cs);

// --- tree shapes ----------------------------------------------------------

// Full binary tree whose leaves are clause literal positions 1..k in
// left-to-right order.
struct TreeShape {
  struct Node {
    int leaf = 0;  // position >= 1 for leaves, 0 for internal nodes
    int left = -1;
    int right = -1;
  };
  std::vector<Node> nodes;
  int root = -1;

  int leaf_count() const;
  void validate() const;  // k leaves covering 1..k in order, binary nodes

  static TreeShape comb(int k);      // (((1 2) 3) 4)...
  static TreeShape balanced(int k);  // ceil/floor split
  static TreeShape random_shape(int k, std::mt19937_64& rng);
  static TreeShape parse(const std::string& text);  // "((1 2)(3 4))"
  std::string str() const;
};

// --- clause gadgets -------------------------------------------------------

// width-1 clause -> {1: l=1}
GadgetApplication gadget_unit(const Clause& c);

// width 1-2; the three half-weight constraints for binary clauses
GadgetApplication gadget_direct(const Clause& c);

std::vector<XorConstraint> direct_2sat_constraints(const Clause& c,
                                                   const Rational& clause_weight);

// Oracle-only exponential expansion: one arity-|S| constraint per nonempty
// subset S of literal positions, weight 1/2^(k-1). These never enter a
// Max2XorProblem.
struct WideXorConstraint {
  std::vector<int> vars;  // distinct, ascending
  int rhs = 0;
  Rational weight;
};
std::vector<WideXorConstraint> gadget_naive_xor(const Clause& c,
                                                int width_bound = 10);
Rational wide_xor_satisfied(const std::vector<WideXorConstraint>& cs,
                            const Assignment& I);

// kSAT -> 3SAT chain, k >= 4: {l1 v l2 v b1, ¬b1 v l3 v b2, ...,
// ¬b_{k-3} v l_{k-1} v l_k}
struct Cnf3Chain {
  std::vector<Clause> clauses;
  std::vector<int> aux_vars;
  GadgetParams params;  // (k-2, k-2), strict, no delta_e
};
Cnf3Chain gadget_ksat_to_3sat(const Clause& c, int first_aux);

// Rewrites every clause of width >= 4 through the 3SAT chain.
CnfFormula formula_to_3sat(const CnfFormula& f);

// Published width-3 gadgets, constraint sets verbatim from their figures.
enum class ReferenceKind { trevisan, nusslein, chancellor, bian_tseitin };
GadgetApplication gadget_reference(ReferenceKind kind, const Clause& c,
                                   int first_aux);

// The OR-equivalence constraint set behind the Tseitin pipeline:
// (l1 v l2 <-> l3) with all three variables inputs, no aux vars.
GadgetApplication gadget_bian_equivalence(Literal l1, Literal l2, Literal l3);

// Intermediate Max2SAT image used to derive the trevisan gadget; exposed for
// the composition cross-checks.
struct WeightedClause {
  Clause clause;
  Rational weight;
};
std::vector<WeightedClause> trevisan_max2sat_image(const Clause& c, int aux_b);

// Tree gadget: 3 constraints of weight 1/2 per internal node, root folded
// into the constant-true node; k-2 aux vars, 3(k-1) constraints.
GadgetApplication gadget_tree(const Clause& c, const TreeShape& shape,
                              int first_aux);

// Same construction but with the root held by a real variable; used by the
// tree-lemma checks. Returns the fragment plus the root variable id.
Max2XorProblem tree_with_root_var(const Clause& c, const TreeShape& shape,
                                  int first_aux, int* root_var,
                                  std::vector<int>* aux_vars);

// Clique gadget for k a power of two (>= 4) or k = 5.
GadgetApplication gadget_clique(const Clause& c, int first_aux);

// Lemma composition arithmetic: alpha = b1*(a2-1)+a1, beta = b1*b2.
// Families must chain; delta_e and num_aux are instance-level and left unset.
GadgetParams compose_params(const GadgetParams& g1, const GadgetParams& g2);

// --- whole-formula compilation ---------------------------------------------

enum class GadgetKind {
  unit,
  direct,
  tree,           // left comb
  tree_balanced,
  tree_shape,     // explicit shape
  trevisan,
  nusslein,
  chancellor,
  bian_tseitin,
  clique,
};

std::string gadget_kind_name(GadgetKind k);

struct StrategyEntry {
  GadgetKind kind = GadgetKind::tree;
  std::optional<TreeShape> shape;  // for tree_shape
};

// Per-width gadget selection, e.g. "1:unit,2:direct,3:tree,4+:tree-balanced".
struct Strategy {
  std::map<int, StrategyEntry> exact;
  std::optional<std::pair<int, StrategyEntry>> tail;  // "W+:name"

  static Strategy parse(const std::string& text);
  const StrategyEntry* lookup(int width) const;
  std::string str() const;
};

// Declared catalog parameters (theorem/figure values; certified values where
// the figure disagrees with exhaustive certification).
GadgetParams catalog_params(GadgetKind kind, int width);
bool gadget_supports_width(GadgetKind kind, int width);
GadgetApplication apply_gadget(const StrategyEntry& entry, const Clause& c,
                               int first_aux);

struct CompileResult {
  Max2XorProblem problem;  // simplified union of all fragments
  std::vector<GadgetApplication> applications;
  Rational sum_alpha_minus_one;
  Rational sum_beta_minus_alpha;
  int total_aux = 0;
  // F is unsatisfiable iff Cost(problem) >= unsat_threshold
  Rational unsat_threshold;
};

// Fresh aux vars per clause, allocated in clause order from num_vars+1.
// Throws if some clause width has no applicable gadget.
CompileResult compile_cnf(const CnfFormula& f, const Strategy& strategy);

}  // namespace m2x
