#include "m2x/formula.hpp"

#include <sstream>

#include "doctest.h"

using namespace m2x;

TEST_CASE("minimal well-formed file") {
  ParseStats stats;
  CnfFormula f = parse_dimacs("p cnf 2 1\n1 2 0\n", &stats);
  CHECK(f.num_vars == 2);
  REQUIRE(f.clauses.size() == 1);
  CHECK(f.clauses[0] == clause_of({1, 2}));
  CHECK_FALSE(stats.clause_count_mismatch);
}

TEST_CASE("two clauses, one of width 3") {
  CnfFormula f = parse_dimacs("p cnf 3 2\n1 -2 0\n-1 2 3 0\n");
  REQUIRE(f.clauses.size() == 2);
  CHECK(f.clauses[0] == clause_of({1, -2}));
  CHECK(f.clauses[1] == clause_of({-1, 2, 3}));
  CHECK(f.clauses[1].width() == 3);
}

TEST_CASE("tautologies are dropped with a warning") {
  ParseStats stats;
  CnfFormula f = parse_dimacs("p cnf 2 1\n1 -1 2 0\n", &stats);
  CHECK(f.clauses.empty());
  CHECK(stats.tautologies_dropped == 1);
}

TEST_CASE("duplicate literals are removed") {
  ParseStats stats;
  CnfFormula f = parse_dimacs("p cnf 2 1\n1 1 2 0\n", &stats);
  REQUIRE(f.clauses.size() == 1);
  CHECK(f.clauses[0] == clause_of({1, 2}));
  CHECK(stats.duplicate_literals_removed == 1);
}

TEST_CASE("comments and clause spanning lines") {
  CnfFormula f = parse_dimacs("c a comment\np cnf 4 1\nc another\n1 2\n3 4 0\n");
  REQUIRE(f.clauses.size() == 1);
  CHECK(f.clauses[0].width() == 4);
}

TEST_CASE("clause count mismatch is a warning, not an error") {
  ParseStats stats;
  CnfFormula f = parse_dimacs("p cnf 2 5\n1 2 0\n", &stats);
  CHECK(f.clauses.size() == 1);
  CHECK(stats.clause_count_mismatch);
}

TEST_CASE("errors") {
  CHECK_THROWS_WITH_AS(parse_dimacs("p cnf 1 1\n0\n"),
                       doctest::Contains("empty clause"), std::runtime_error);
  CHECK_THROWS_AS(parse_dimacs("p dnf 1 1\n1 0\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dimacs("1 0\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n2 0\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2\n"), std::runtime_error);
}

TEST_CASE("serialize/parse round trip on normalized formulas") {
  CnfFormula f = parse_dimacs("p cnf 4 3\n-3 1 0\n2 -4 1 0\n4 0\n");
  CnfFormula again = parse_dimacs(to_dimacs(f));
  CHECK(f == again);
}

TEST_CASE("writer sorts literals by variable, positive first on ties") {
  CnfFormula f;
  f.num_vars = 3;
  f.clauses.push_back(clause_of({3, -2, 1}));
  normalize_formula(f);
  CHECK(to_dimacs(f) == "p cnf 3 1\n1 -2 3 0\n");
}

TEST_CASE("normalization is idempotent") {
  CnfFormula f = parse_dimacs("p cnf 3 2\n3 2 1 0\n-1 -1 2 0\n");
  CnfFormula once = f;
  normalize_formula(once);
  CnfFormula twice = once;
  normalize_formula(twice);
  CHECK(once == twice);
  CHECK(once == f);  // parse already normalizes
}
