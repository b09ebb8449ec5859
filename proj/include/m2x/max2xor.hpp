#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "m2x/rational.hpp"

namespace m2x {

// A weighted parity constraint over one or two distinct variables:
//   x = rhs           (unary)
//   x XOR y = rhs     (pair, scope sorted ascending)
struct XorConstraint {
  int u = 0;   // first scope variable, >= 1
  int v = 0;   // second scope variable or 0 for unary
  int rhs = 0; // 0 or 1
  Rational weight;  // > 0

  bool unary() const { return v == 0; }

  XorConstraint() = default;
  XorConstraint(int a, int rhs_, Rational w);          // unary
  XorConstraint(int a, int b, int rhs_, Rational w);   // pair, any order

  // scope-lexicographic (unary before pairs on the same leading var), then rhs
  friend bool operator<(const XorConstraint& a, const XorConstraint& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    return a.rhs < b.rhs;
  }
  friend bool operator==(const XorConstraint& a, const XorConstraint& b) {
    return a.u == b.u && a.v == b.v && a.rhs == b.rhs && a.weight == b.weight;
  }
};

// Assignment over variables 1..num_vars (bit per variable).
struct Assignment {
  std::vector<uint8_t> bits;  // index 0 unused

  explicit Assignment(int num_vars = 0)
      : bits(static_cast<std::size_t>(num_vars) + 1, 0) {}
  int num_vars() const { return static_cast<int>(bits.size()) - 1; }
  bool get(int var) const { return bits[static_cast<std::size_t>(var)] != 0; }
  void set(int var, bool value) {
    bits[static_cast<std::size_t>(var)] = value ? 1 : 0;
  }
  // Variable v holds bit (v-1) of `code`.
  static Assignment from_code(uint64_t code, int num_vars);
  uint64_t to_code() const;

  friend bool operator==(const Assignment& a, const Assignment& b) = default;
};

// The central IR. `offset` carries constraint weight that simplification
// proved satisfied by every assignment, so cancellation never changes any
// assignment's value.
struct Max2XorProblem {
  int num_vars = 0;
  std::vector<XorConstraint> constraints;
  Rational offset = Rational(0);

  Rational weight() const;  // sum of stored constraint weights
  void add(XorConstraint c);
  void add_unary(int var, int rhs, Rational w) {
    add(XorConstraint(var, rhs, std::move(w)));
  }
  void add_pair(int a, int b, int rhs, Rational w) {
    add(XorConstraint(a, b, rhs, std::move(w)));
  }

  friend bool operator==(const Max2XorProblem& a,
                         const Max2XorProblem& b) = default;
};

struct EvalResult {
  Rational satisfied;  // I(P), including offset
  Rational falsified;  // weight of falsified stored constraints
};

// Exact evaluation; throws std::invalid_argument if the assignment does not
// cover all of P's variables.
EvalResult evaluate(const Max2XorProblem& p, const Assignment& I);

// Canonical form: constraints sorted, same (scope, rhs) merged, opposite-rhs
// pairs on a scope cancelled into offset. Value-preserving for every
// assignment, and idempotent.
Max2XorProblem simplify(const Max2XorProblem& p);

struct OptResult {
  Rational opt;   // max satisfied weight, including offset
  Rational cost;  // min falsified weight, plus offset, so that
                  // simplify never changes opt or cost
  std::vector<Assignment> witnesses;  // optimal assignments, ascending codes
};

// Exact optimum by enumeration of all 2^num_vars assignments.
// witnesses capped (lowest assignment codes kept).
OptResult exhaustive_opt(const Max2XorProblem& p, int var_bound = 30,
                         int witness_cap = 64);

// --- serialization ------------------------------------------------------

// JSON with fields num_vars, offset ("p/q"), constraints as
// [scope..., rhs, "p/q"], in canonical order. Bit-exact on canonical input.
std::string to_m2x_json(const Max2XorProblem& p);
Max2XorProblem from_m2x_json(const std::string& text);

// --- fast evaluation engine ---------------------------------------------

// Weights scaled to int64 by the common denominator when they fit; used by
// exhaustive search, certification and annealing. Values are exact integers
// (weight * denom_scale).
struct ScaledProblem {
  struct Entry {
    int u, v;  // v = 0 for unary
    int rhs;
    int64_t w;
  };
  int num_vars = 0;
  std::vector<Entry> entries;
  mpz_class denom_scale;          // all int64 weights are weight*denom_scale
  int64_t total_weight = 0;       // scaled
  // per variable: indices of touching constraints
  std::vector<std::vector<int32_t>> touching;

  static std::optional<ScaledProblem> build(const Max2XorProblem& p);

  // satisfied weight (scaled) under bits (1-based, index 0 unused)
  int64_t satisfied(const std::vector<uint8_t>& bits) const;
  // change in satisfied weight if `var` flips under bits
  int64_t flip_delta(const std::vector<uint8_t>& bits, int var) const;

  Rational unscale(int64_t v) const {
    Rational r(v);
    r /= Rational(denom_scale);
    return r;
  }
};

}  // namespace m2x
