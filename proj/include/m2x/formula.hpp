#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace m2x {

// Variables are 1-indexed as in DIMACS. Auxiliary variables introduced by
// gadgets are allocated consecutively from num_vars+1 so original ids stay
// stable in every emitted model.
struct Literal {
  int var = 0;  // >= 1
  bool negated = false;

  friend bool operator==(const Literal& a, const Literal& b) = default;
  // Sort by variable, positive polarity first on ties.
  friend bool operator<(const Literal& a, const Literal& b) {
    if (a.var != b.var) return a.var < b.var;
    return a.negated < b.negated;
  }
};

inline Literal lit(int dimacs_lit) {
  return Literal{dimacs_lit < 0 ? -dimacs_lit : dimacs_lit, dimacs_lit < 0};
}

inline int to_dimacs(const Literal& l) { return l.negated ? -l.var : l.var; }

struct Clause {
  std::vector<Literal> literals;

  int width() const { return static_cast<int>(literals.size()); }
  bool satisfied_by(const std::vector<uint8_t>& bits_1based) const;

  friend bool operator==(const Clause& a, const Clause& b) = default;
};

// Builds a clause from DIMACS-style signed ints.
Clause clause_of(std::initializer_list<int> lits);

struct CnfFormula {
  int num_vars = 0;
  std::vector<Clause> clauses;

  friend bool operator==(const CnfFormula& a, const CnfFormula& b) = default;
};

struct ParseStats {
  int declared_clauses = 0;
  int tautologies_dropped = 0;
  int duplicate_literals_removed = 0;
  bool clause_count_mismatch = false;
};

// Sorts literals, removes duplicates; returns false if the clause is a
// tautology (same variable with both polarities).
bool normalize_clause(Clause& c, int* duplicates_removed = nullptr);

// Applies normalize_clause to every clause, dropping tautologies.
// Idempotent.
void normalize_formula(CnfFormula& f, ParseStats* stats = nullptr);

// DIMACS CNF reader. Throws std::runtime_error on malformed header, literal
// index out of range, or an explicitly empty clause (a bare `0`), which is
// reported distinctly because it makes the formula trivially unsatisfiable.
// A clause-count mismatch is only recorded as a warning in `stats`.
CnfFormula parse_dimacs(std::istream& in, ParseStats* stats = nullptr);
CnfFormula parse_dimacs(const std::string& text, ParseStats* stats = nullptr);

// Writer is bit-exact on the normalized form: literals sorted by variable,
// positive before negative on ties, clause order preserved.
void write_dimacs(std::ostream& out, const CnfFormula& f);
std::string to_dimacs(const CnfFormula& f);

}  // namespace m2x
