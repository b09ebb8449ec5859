#include "m2x/max2xor.hpp"

#include <random>

#include "doctest.h"
#include "testutil.hpp"

using namespace m2x;
using m2x::testing::all_assignments;
using m2x::testing::random_raw_problem;

namespace {

Max2XorProblem paper_or_problem() {
  // {1/2: x=1, 1/2: y=1, 1/2: x+y=1}
  Max2XorProblem p;
  p.add_unary(1, 1, rat(1, 2));
  p.add_unary(2, 1, rat(1, 2));
  p.add_pair(1, 2, 1, rat(1, 2));
  return p;
}

}  // namespace

TEST_CASE("constraint invariants") {
  CHECK_THROWS_AS(XorConstraint(0, 1, Rational(1)), std::invalid_argument);
  CHECK_THROWS_AS(XorConstraint(1, 1, 0, Rational(1)), std::invalid_argument);
  CHECK_THROWS_AS(XorConstraint(1, 0, Rational(0)), std::invalid_argument);
  XorConstraint c(3, 2, 1, Rational(1));
  CHECK(c.u == 2);  // scope sorted ascending
  CHECK(c.v == 3);
}

TEST_CASE("evaluate: the introduction example") {
  Max2XorProblem p = paper_or_problem();
  Assignment I(2);
  I.set(1, true);
  EvalResult r = evaluate(p, I);
  CHECK(r.satisfied == Rational(1));
  CHECK(r.falsified == rat(1, 2));
}

TEST_CASE("evaluate: empty problem yields (offset, 0)") {
  Max2XorProblem p;
  p.offset = rat(3, 4);
  EvalResult r = evaluate(p, Assignment(0));
  CHECK(r.satisfied == rat(3, 4));
  CHECK(r.falsified == Rational(0));
}

TEST_CASE("evaluate: two-constraint equivalence example") {
  Max2XorProblem p;
  p.add_unary(1, 0, Rational(1));
  p.add_pair(1, 2, 0, Rational(1));
  Assignment I(2);  // x1 = x2 = 0
  CHECK(evaluate(p, I).satisfied == Rational(2));
}

TEST_CASE("evaluate rejects short assignments") {
  Max2XorProblem p;
  p.add_pair(1, 3, 1, Rational(1));
  CHECK_THROWS_AS(evaluate(p, Assignment(2)), std::invalid_argument);
}

TEST_CASE("simplify merges identical scope+rhs") {
  Max2XorProblem p;
  p.add_pair(1, 2, 1, rat(1, 4));
  p.add_pair(1, 2, 1, rat(1, 4));
  Max2XorProblem s = simplify(p);
  REQUIRE(s.constraints.size() == 1);
  CHECK(s.constraints[0].weight == rat(1, 2));
  CHECK(s.offset == Rational(0));
}

TEST_CASE("simplify cancels opposite-rhs pairs into the offset") {
  Max2XorProblem p;
  p.add_unary(1, 1, rat(1, 4));
  p.add_unary(1, 0, rat(1, 4));
  Max2XorProblem s = simplify(p);
  CHECK(s.constraints.empty());
  CHECK(s.offset == rat(1, 4));
}

TEST_CASE("simplify is idempotent and value-preserving") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 200; ++round) {
    Max2XorProblem p = random_raw_problem(rng);
    Max2XorProblem s = simplify(p);
    CHECK(simplify(s) == s);
    for (const Assignment& I : all_assignments(p.num_vars))
      CHECK(evaluate(p, I).satisfied == evaluate(s, I).satisfied);
  }
}

TEST_CASE("satisfied + falsified = weight + offset") {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 100; ++round) {
    Max2XorProblem p = random_raw_problem(rng);
    p.offset = rat(round % 5, 3);
    for (const Assignment& I : all_assignments(p.num_vars)) {
      EvalResult r = evaluate(p, I);
      CHECK(r.satisfied + r.falsified == p.weight() + p.offset);
    }
  }
}

TEST_CASE("exhaustive_opt: introduction example has three optima") {
  OptResult r = exhaustive_opt(paper_or_problem());
  CHECK(r.opt == Rational(1));
  CHECK(r.cost == rat(1, 2));
  REQUIRE(r.witnesses.size() == 3);
  // ascending codes: 01, 10, 11
  CHECK(r.witnesses[0].to_code() == 1);
  CHECK(r.witnesses[1].to_code() == 2);
  CHECK(r.witnesses[2].to_code() == 3);
}

TEST_CASE("exhaustive_opt: forced unique optimum") {
  Max2XorProblem p;
  p.add_unary(1, 0, Rational(1));
  p.add_pair(1, 2, 0, Rational(1));
  OptResult r = exhaustive_opt(p);
  CHECK(r.opt == Rational(2));
  CHECK(r.cost == Rational(0));
  REQUIRE(r.witnesses.size() == 1);
  CHECK(r.witnesses[0].to_code() == 0);
}

TEST_CASE("exhaustive_opt: empty problem") {
  OptResult r = exhaustive_opt(Max2XorProblem{});
  CHECK(r.opt == Rational(0));
  CHECK(r.cost == Rational(0));
}

TEST_CASE("exhaustive_opt respects the variable bound") {
  Max2XorProblem p;
  p.add_pair(1, 31, 1, Rational(1));
  CHECK_THROWS_AS(exhaustive_opt(p, 30), std::invalid_argument);
}

TEST_CASE("exhaustive_opt is invariant under simplify") {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 100; ++round) {
    Max2XorProblem p = random_raw_problem(rng);
    OptResult a = exhaustive_opt(p);
    OptResult b = exhaustive_opt(simplify(p));
    CHECK(a.opt == b.opt);
    CHECK(a.cost == b.cost);
  }
}

TEST_CASE("witness cap keeps the lowest assignment codes") {
  Max2XorProblem p;  // every assignment optimal
  p.num_vars = 8;
  OptResult r = exhaustive_opt(p, 30, 4);
  REQUIRE(r.witnesses.size() == 4);
  for (uint64_t i = 0; i < 4; ++i) CHECK(r.witnesses[i].to_code() == i);
}

TEST_CASE("json serialization round trip, bit exact") {
  std::mt19937_64 rng(10);
  for (int round = 0; round < 50; ++round) {
    Max2XorProblem p = simplify(random_raw_problem(rng));
    std::string text = to_m2x_json(p);
    Max2XorProblem q = from_m2x_json(text);
    CHECK(p == q);
    CHECK(to_m2x_json(q) == text);
  }
}

TEST_CASE("json rejects malformed input") {
  CHECK_THROWS(from_m2x_json("{\"num_vars\": 1, \"offset\": \"x\", \"constraints\": []}"));
  CHECK_THROWS(from_m2x_json("{\"num_vars\": 1, \"offset\": \"0\", \"constraints\": [[2, 1, \"1\"]]}"));
  CHECK_THROWS(from_m2x_json("{\"num_vars\": 2, \"offset\": \"0\", \"constraints\": [[1, 2, 1, \"0\"]]}"));
}
