#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "m2x/max2xor.hpp"

namespace m2x {

// min over x in {0,1}: sum a_i x_i + sum_{i<j} b_ij x_i x_j + offset.
// Zero coefficients are never stored.
struct QuboModel {
  int num_vars = 0;
  std::map<int, Rational> linear;
  std::map<std::pair<int, int>, Rational> quadratic;  // keys i<j
  Rational offset = Rational(0);

  void add_linear(int i, const Rational& a);
  void add_quadratic(int i, int j, const Rational& b);

  friend bool operator==(const QuboModel&, const QuboModel&) = default;
};

// min over z in {-1,+1}: sum h_i z_i + sum_{i<j} J_ij z_i z_j + offset.
// Spin convention is fixed globally: boolean true maps to spin +1.
struct IsingModel {
  int num_vars = 0;
  std::map<int, Rational> h;
  std::map<std::pair<int, int>, Rational> J;  // keys i<j
  Rational offset = Rational(0);

  void add_h(int i, const Rational& v);
  void add_J(int i, int j, const Rational& v);

  friend bool operator==(const IsingModel&, const IsingModel&) = default;
};

struct CouplingGraph {
  std::set<int> vertices;
  std::set<std::pair<int, int>> edges;  // i<j, no self loops

  void add_edge(int u, int v);
  bool adjacent(int u, int v) const;
  const std::set<int>& nodes() const { return vertices; }
};

// --- conversions -----------------------------------------------------------

// Coefficients per the catalog formulas; the offset makes the objective value
// of every assignment equal the falsified weight of the stored constraints.
QuboModel max2xor_to_qubo(const Max2XorProblem& p);

// Inverse translation (through the Ising coefficients, which is the form that
// preserves value differences); round-trips with max2xor_to_qubo on
// simplified problems.
Max2XorProblem qubo_to_max2xor(const QuboModel& q);

// Exact bijection h_i = a_i/2 + (1/4) sum_j b_ij, J_ij = b_ij/4.
IsingModel qubo_to_ising(const QuboModel& q);
QuboModel ising_to_qubo(const IsingModel& m);

// Direct formulas; equals qubo_to_ising(max2xor_to_qubo(p)) coefficient by
// coefficient, offset included (= Weight(p)/2 for the constraint part).
IsingModel max2xor_to_ising(const Max2XorProblem& p);

// 2h / 2J expansion back into weighted parity constraints.
Max2XorProblem ising_to_max2xor(const IsingModel& m);

// --- evaluation ------------------------------------------------------------

Rational qubo_value(const QuboModel& q, const Assignment& x);
// spins: z_i = +1 iff assignment bit is true
Rational ising_energy(const IsingModel& m, const Assignment& x);

// --- energy gap and range normalization -------------------------------------

// min over nonzero coefficients of 1/|h_i|, 1/|J_ij|; equivalently, on the
// simplified Max2XOR form, min over constraints of 2/weight. Both routes are
// computed and must agree. Throws on an all-zero model.
Rational energy_gap(const IsingModel& m);
Rational energy_gap(const Max2XorProblem& p);

struct Range {
  Rational lo, hi;
};

struct NormalizeResult {
  IsingModel model;
  Rational scale;
};

// Largest rational s with s*h_i and s*J_ij inside their ranges; throws on an
// empty model or an unsatisfiable range.
NormalizeResult normalize_to_ranges(const IsingModel& m,
                                    const Range& h_range = {Rational(-1), Rational(1)},
                                    const Range& j_range = {Rational(-1), Rational(1)});

// Landau-Zener success probability 1 - exp(-pi delta^2 / (4 c)).
// Reporting only; the single floating-point formula in the toolkit.
double landau_zener_success(double delta, double c);

// --- chain rewriting onto a coupling graph -----------------------------------

struct ChainReport {
  int qubit_overhead = 0;                 // interior qubits consumed by chains
  std::vector<XorConstraint> failures;    // constraints with no free path
  bool chain_weight_below_constraint = false;
  std::vector<std::vector<int>> chains;   // paths used, source..target
};

struct ChainResult {
  Max2XorProblem problem;  // over qubit ids
  ChainReport report;
};

// Places every pair constraint either on an existing edge or on a shortest
// path of currently free qubits (BFS, ties by smallest next qubit id),
// inserting x_a ⊕ x_b = 0 equalities of weight chain_weight along the path.
// Unembeddable constraints are listed in the report, never dropped silently.
ChainResult chain_rewrite(const Max2XorProblem& p,
                          const std::map<int, int>& placement,
                          const CouplingGraph& g,
                          const Rational& chain_weight = Rational(1));

// --- file formats ------------------------------------------------------------

// QUBO text: `c ...` comments, `p qubo 0 <max_node> <n_linear> <n_quadratic>`
// header, `i i a_i` then `i j b_ij` (i<j) lines; coefficients as exact
// rationals ("2", "-1/2"). The offset rides in a `c offset = p/q` comment.
std::string to_qubo_text(const QuboModel& q);
QuboModel from_qubo_text(const std::string& text);

std::string to_ising_json(const IsingModel& m);
IsingModel from_ising_json(const std::string& text);

// one `u v` edge per line, `c` comments allowed
CouplingGraph parse_coupling_graph(const std::string& text);

}  // namespace m2x
