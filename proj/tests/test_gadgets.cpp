#include "m2x/gadgets.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "doctest.h"
#include "testutil.hpp"

using namespace m2x;
using m2x::testing::all_assignments;

namespace {

Clause positive_clause(int k) {
  Clause c;
  for (int i = 1; i <= k; ++i) c.literals.push_back(Literal{i, false});
  return c;
}

std::multiset<std::tuple<int, int, int, Rational>> constraint_set(
    const Max2XorProblem& p) {
  std::multiset<std::tuple<int, int, int, Rational>> out;
  for (const auto& c : p.constraints) out.insert({c.u, c.v, c.rhs, c.weight});
  return out;
}

bool same_constraints(const Max2XorProblem& a, const Max2XorProblem& b) {
  return constraint_set(a) == constraint_set(b);
}

Rational frag_value(const Max2XorProblem& frag, const Assignment& I) {
  return evaluate(frag, I).satisfied;
}

}  // namespace

TEST_CASE("rewrite_negations") {
  Literal x{1, true}, y{2, false};
  SUBCASE("single negation flips rhs") {
    XorConstraint c = rewrite_negations({x, y, 1, Rational(1)});
    CHECK(c.u == 1);
    CHECK(c.v == 2);
    CHECK(c.rhs == 0);
  }
  SUBCASE("double negation restores rhs") {
    XorConstraint c = rewrite_negations({x, Literal{2, true}, 1, Rational(1)});
    CHECK(c.rhs == 1);
  }
  SUBCASE("unary case") {
    XorConstraint c = rewrite_negations({x, std::nullopt, 1, Rational(1)});
    CHECK(c.unary());
    CHECK(c.rhs == 0);
  }
}

TEST_CASE("gadget_direct on x1 v x2 emits the half-weight triple") {
  GadgetApplication app = gadget_direct(clause_of({1, 2}));
  Max2XorProblem want;
  want.add_unary(1, 1, rat(1, 2));
  want.add_unary(2, 1, rat(1, 2));
  want.add_pair(1, 2, 1, rat(1, 2));
  CHECK(same_constraints(app.fragment, want));
  CHECK(app.params.alpha == Rational(1));
  CHECK(app.params.beta == rat(3, 2));
  CHECK(*app.params.delta_e == Rational(4));
  CHECK(app.params.strict);
  CHECK(app.aux_vars.empty());
}

TEST_CASE("unit clause compiles to a weight-1 unary constraint") {
  GadgetApplication app = gadget_direct(clause_of({-3}));
  Max2XorProblem want;
  want.add_unary(3, 0, Rational(1));
  CHECK(same_constraints(app.fragment, want));
  CHECK(app.params.alpha == Rational(1));
  CHECK(app.params.beta == Rational(1));
}

TEST_CASE("gadget_direct handles negative literals via rewrite_negations") {
  // ¬x1 v x2 -> {1/2: x1=0, 1/2: x2=1, 1/2: x1+x2=0}
  Clause c = clause_of({-1, 2});
  GadgetApplication app = gadget_direct(c);
  Max2XorProblem want;
  want.add_unary(1, 0, rat(1, 2));
  want.add_unary(2, 1, rat(1, 2));
  want.add_pair(1, 2, 0, rat(1, 2));
  CHECK(same_constraints(app.fragment, want));
  for (const Assignment& I : all_assignments(2)) {
    Rational expect = c.satisfied_by(I.bits) ? Rational(1) : Rational(0);
    CHECK(frag_value(app.fragment, I) == expect);
  }
}

TEST_CASE("gadget_direct rejects width > 2") {
  CHECK_THROWS_AS(gadget_direct(positive_clause(3)), std::invalid_argument);
}

TEST_CASE("naive expansion matches gadget_direct at k=2") {
  auto wide = gadget_naive_xor(clause_of({1, 2}));
  REQUIRE(wide.size() == 3);
  for (const Assignment& I : all_assignments(2)) {
    Rational direct = frag_value(gadget_direct(clause_of({1, 2})).fragment, I);
    CHECK(wide_xor_satisfied(wide, I) == direct);
  }
}

TEST_CASE("naive expansion k=1 is the unit constraint") {
  auto wide = gadget_naive_xor(clause_of({1}));
  REQUIRE(wide.size() == 1);
  CHECK(wide[0].weight == Rational(1));
  CHECK(wide[0].rhs == 1);
}

TEST_CASE("naive expansion satisfied weight is the clause indicator") {
  std::mt19937_64 rng(11);
  for (int k = 1; k <= 6; ++k) {
    Clause c;
    for (int i = 1; i <= k; ++i)
      c.literals.push_back(Literal{i, (rng() & 1) != 0});
    auto wide = gadget_naive_xor(c);
    CHECK(wide.size() == (std::size_t{1} << k) - 1);
    for (const Assignment& I : all_assignments(k)) {
      Rational expect = c.satisfied_by(I.bits) ? Rational(1) : Rational(0);
      CHECK(wide_xor_satisfied(wide, I) == expect);
    }
  }
}

TEST_CASE("naive expansion width bound") {
  CHECK_THROWS_AS(gadget_naive_xor(positive_clause(11)), std::invalid_argument);
}

TEST_CASE("kSAT->3SAT chain shapes") {
  SUBCASE("k=4") {
    Cnf3Chain chain = gadget_ksat_to_3sat(positive_clause(4), 5);
    REQUIRE(chain.clauses.size() == 2);
    CHECK(chain.clauses[0] == clause_of({1, 2, 5}));
    CHECK(chain.clauses[1] == clause_of({-5, 3, 4}));
    CHECK(chain.aux_vars == std::vector<int>{5});
    CHECK(chain.params.alpha == Rational(2));
    CHECK(chain.params.beta == Rational(2));
    CHECK_FALSE(chain.params.delta_e.has_value());
  }
  SUBCASE("k=5 has 3 clauses and 2 aux vars") {
    Cnf3Chain chain = gadget_ksat_to_3sat(positive_clause(5), 6);
    CHECK(chain.clauses.size() == 3);
    CHECK(chain.aux_vars.size() == 2);
    for (const Clause& c : chain.clauses) CHECK(c.width() == 3);
  }
  SUBCASE("k < 4 rejected") {
    CHECK_THROWS_AS(gadget_ksat_to_3sat(positive_clause(3), 4),
                    std::invalid_argument);
  }
}

TEST_CASE("kSAT->3SAT chain is satisfiability-equivalent (k=4 oracle)") {
  Clause c = clause_of({1, -2, 3, -4});
  Cnf3Chain chain = gadget_ksat_to_3sat(c, 5);
  for (const Assignment& I : all_assignments(4)) {
    bool orig = c.satisfied_by(I.bits);
    bool chain_sat = false;
    for (int b = 0; b <= 1 && !chain_sat; ++b) {
      Assignment ext(5);
      for (int v = 1; v <= 4; ++v) ext.set(v, I.get(v));
      ext.set(5, b != 0);
      bool all = true;
      for (const Clause& cc : chain.clauses)
        all = all && cc.satisfied_by(ext.bits);
      chain_sat = all;
    }
    CHECK(orig == chain_sat);
  }
}

TEST_CASE("chancellor emits ten half-weight constraints") {
  GadgetApplication app =
      gadget_reference(ReferenceKind::chancellor, positive_clause(3), 4);
  REQUIRE(app.fragment.constraints.size() == 10);
  for (const auto& c : app.fragment.constraints) CHECK(c.weight == rat(1, 2));
  CHECK(app.fragment.weight() == Rational(5));
  CHECK(app.aux_vars == std::vector<int>{4});
}

TEST_CASE("nusslein emits the figure's constraint set") {
  GadgetApplication app =
      gadget_reference(ReferenceKind::nusslein, positive_clause(3), 4);
  Max2XorProblem want;
  want.add_pair(1, 2, 1, Rational(1));
  want.add_pair(1, 4, 0, Rational(1));
  want.add_pair(2, 4, 0, Rational(1));
  want.add_pair(3, 4, 1, rat(1, 2));
  want.add_unary(3, 1, rat(1, 2));
  want.add_unary(4, 1, rat(1, 2));
  CHECK(same_constraints(app.fragment, want));
  CHECK(app.params.beta == rat(9, 2));
  REQUIRE(app.params.paper_claimed_alpha.has_value());
  CHECK(*app.params.paper_claimed_alpha == rat(5, 2));
}

TEST_CASE("bian_tseitin emits the composed figure with beta = 6") {
  GadgetApplication app =
      gadget_reference(ReferenceKind::bian_tseitin, positive_clause(3), 4);
  REQUIRE(app.fragment.constraints.size() == 8);
  CHECK(app.fragment.weight() == Rational(6));
  bool found = false;
  for (const auto& c : app.fragment.constraints)
    if (c.unary() && c.u == 4) {
      CHECK(c.weight == rat(3, 2));
      CHECK(c.rhs == 1);
      found = true;
    }
  CHECK(found);
}

TEST_CASE(
    "bian_tseitin equals the Tseitin split composed with the equivalence set "
    "and the direct gadget") {
  Clause c = positive_clause(3);
  const int b = 4;
  GadgetApplication equiv =
      gadget_bian_equivalence(c.literals[0], c.literals[1], Literal{b, false});
  GadgetApplication tail = gadget_direct(clause_of({b, 3}));
  Max2XorProblem merged;
  merged.num_vars = 4;
  for (const auto& xc : equiv.fragment.constraints) merged.add(xc);
  for (const auto& xc : tail.fragment.constraints) merged.add(xc);
  Max2XorProblem s = simplify(merged);
  CHECK(s.offset == Rational(0));  // pure merge, no cancellation
  GadgetApplication composed =
      gadget_reference(ReferenceKind::bian_tseitin, c, b);
  CHECK(same_constraints(s, simplify(composed.fragment)));
  // mixed-stage composition arithmetic: alpha = sum(alpha_c - 1) + alpha_1
  Rational alpha = (Rational(3) - 1) + (Rational(1) - 1) + Rational(2);
  Rational beta = rat(9, 2) + rat(3, 2);
  CHECK(alpha == composed.params.alpha);
  CHECK(beta == composed.params.beta);
}

TEST_CASE("trevisan gadget is the simplified image of the Max2SAT pipeline") {
  Clause c = positive_clause(3);
  const int b = 4;
  auto image = trevisan_max2sat_image(c, b);
  Rational total(0);
  for (const auto& wc : image) total += wc.weight;
  CHECK(total == Rational(4));  // beta of the Max2SAT gadget
  Max2XorProblem merged;
  merged.num_vars = 4;
  for (const auto& wc : image)
    for (auto& xc : direct_2sat_constraints(wc.clause, wc.weight))
      merged.add(std::move(xc));
  Max2XorProblem s = simplify(merged);
  CHECK(s.offset == rat(3, 2));
  GadgetApplication catalog = gadget_reference(ReferenceKind::trevisan, c, b);
  CHECK(same_constraints(s, simplify(catalog.fragment)));
  // compose_params over the uniform stages, cancellation accounted
  GadgetParams trev2sat{"trevisan-max2sat", "3sat",       "max2sat", rat(7, 2),
                        Rational(4),        std::nullopt, 1,         true};
  GadgetParams direct{"direct",    "max2sat", "max2xor", Rational(1),
                      rat(3, 2),   Rational(4), 0,       true};
  GadgetParams composed = compose_params(trev2sat, direct);
  CHECK(composed.alpha == rat(7, 2));
  CHECK(composed.beta == Rational(6));
  CHECK(composed.alpha - s.offset == catalog.params.alpha);
  CHECK(composed.beta - 2 * s.offset == catalog.params.beta);
}

TEST_CASE("compose_params formula cases") {
  GadgetParams g22{"tseitin", "3sat",       "mix", Rational(2), Rational(2),
                   std::nullopt, 1, true};
  GadgetParams any{"any",        "mix", "max2xor", rat(7, 3), rat(11, 2),
                   std::nullopt, 1,     true};
  GadgetParams c = compose_params(g22, any);
  CHECK(c.alpha == 2 * (rat(7, 3) - 1) + 2);
  CHECK(c.beta == 2 * rat(11, 2));
  GadgetParams ident{"ident",      "max2xor", "max2xor", Rational(1),
                     Rational(1),  std::nullopt, 0,      true};
  GadgetParams c2 = compose_params(any, ident);
  CHECK(c2.alpha == any.alpha);
  CHECK(c2.beta == any.beta);
  CHECK_THROWS_AS(compose_params(any, g22), std::invalid_argument);
}

TEST_CASE("tree shapes") {
  SUBCASE("comb and parse/print round trip") {
    TreeShape comb = TreeShape::comb(4);
    CHECK(comb.str() == "(((1 2) 3) 4)");
    TreeShape parsed = TreeShape::parse("(((1 2) 3) 4)");
    CHECK(parsed.str() == comb.str());
  }
  SUBCASE("balanced splits ceil/floor") {
    CHECK(TreeShape::balanced(4).str() == "((1 2) (3 4))");
    CHECK(TreeShape::balanced(7).str() == "(((1 2) (3 4)) ((5 6) 7))");
  }
  SUBCASE("invalid shapes rejected") {
    CHECK_THROWS_AS(TreeShape::parse("((1 2) 4)"), std::invalid_argument);
    CHECK_THROWS_AS(TreeShape::parse("(1 (3 2))"), std::invalid_argument);
    CHECK_THROWS_AS(TreeShape::parse("(1 2"), std::invalid_argument);
  }
  SUBCASE("random shapes are valid") {
    std::mt19937_64 rng(3);
    for (int k = 2; k <= 9; ++k)
      for (int i = 0; i < 5; ++i)
        CHECK(TreeShape::random_shape(k, rng).leaf_count() == k);
  }
}

TEST_CASE("tree gadget base case equals gadget_direct") {
  GadgetApplication tree = gadget_tree(clause_of({1, 2}), TreeShape::comb(2), 3);
  GadgetApplication direct = gadget_direct(clause_of({1, 2}));
  CHECK(same_constraints(tree.fragment, direct.fragment));
  CHECK(tree.aux_vars.empty());
}

TEST_CASE("tree gadget k=3 comb matches the published constraint list") {
  GadgetApplication app = gadget_tree(positive_clause(3), TreeShape::comb(3), 4);
  Max2XorProblem want;
  want.add_pair(1, 2, 1, rat(1, 2));
  want.add_pair(1, 4, 0, rat(1, 2));
  want.add_pair(2, 4, 0, rat(1, 2));
  want.add_pair(3, 4, 1, rat(1, 2));
  want.add_unary(4, 1, rat(1, 2));
  want.add_unary(3, 1, rat(1, 2));
  CHECK(same_constraints(app.fragment, want));
  CHECK(app.aux_vars == std::vector<int>{4});
  CHECK(app.params.alpha == Rational(2));
  CHECK(app.params.beta == Rational(3));
}

TEST_CASE("tree gadget counts: 3(k-1) constraints, k-2 aux vars") {
  std::mt19937_64 rng(4);
  for (int k = 2; k <= 9; ++k) {
    for (const TreeShape& shape : {TreeShape::comb(k), TreeShape::balanced(k),
                                   TreeShape::random_shape(k, rng)}) {
      GadgetApplication app = gadget_tree(positive_clause(k), shape, k + 1);
      CHECK(app.fragment.constraints.size() ==
            static_cast<std::size_t>(3 * (k - 1)));
      CHECK(app.aux_vars.size() == static_cast<std::size_t>(k - 2));
      for (const auto& c : app.fragment.constraints)
        CHECK(c.weight == rat(1, 2));
    }
  }
}

TEST_CASE("tree gadget k=7 balanced matches the 7SAT figure structure") {
  GadgetApplication app =
      gadget_tree(positive_clause(7), TreeShape::balanced(7), 8);
  CHECK(app.fragment.constraints.size() == 18);
  CHECK(app.aux_vars.size() == 5);
  Max2XorProblem want;
  auto tri = [&want](int a, int b, int c) {
    want.add_pair(a, b, 1, rat(1, 2));
    want.add_pair(a, c, 0, rat(1, 2));
    want.add_pair(b, c, 0, rat(1, 2));
  };
  tri(1, 2, 8);
  tri(3, 4, 9);
  tri(5, 6, 10);
  tri(8, 9, 11);
  tri(10, 7, 12);
  want.add_pair(11, 12, 1, rat(1, 2));
  want.add_unary(11, 1, rat(1, 2));
  want.add_unary(12, 1, rat(1, 2));
  CHECK(same_constraints(app.fragment, want));
}

TEST_CASE("tree gadget respects literal polarities") {
  Clause c = clause_of({-1, 2, -3});
  GadgetApplication app = gadget_tree(c, TreeShape::comb(3), 4);
  for (const Assignment& I : all_assignments(3)) {
    Rational best(-1);
    for (int b = 0; b <= 1; ++b) {
      Assignment ext(4);
      for (int v = 1; v <= 3; ++v) ext.set(v, I.get(v));
      ext.set(4, b != 0);
      Rational val = frag_value(app.fragment, ext);
      if (val > best) best = val;
    }
    CHECK(best == (c.satisfied_by(I.bits) ? Rational(2) : Rational(1)));
  }
}

TEST_CASE("clique gadget k=4") {
  GadgetApplication app = gadget_clique(positive_clause(4), 5);
  CHECK(app.params.alpha == Rational(6));
  CHECK(app.params.beta == Rational(10));
  CHECK(*app.params.delta_e == Rational(2));
  CHECK(app.aux_vars == std::vector<int>{5});
  CHECK(app.fragment.weight() == Rational(10));
}

TEST_CASE("clique gadget k=5 carries the figure weights verbatim") {
  GadgetApplication app = gadget_clique(positive_clause(5), 6);
  CHECK(app.params.beta == rat(52, 3));
  CHECK(app.fragment.weight() == rat(52, 3));
  CHECK(*app.params.delta_e == rat(12, 5));
  CHECK(app.aux_vars.size() == 2);
  auto set = constraint_set(app.fragment);
  CHECK(set.count({1, 2, 1, rat(1, 2)}) == 1);
  CHECK(set.count({1, 6, 1, rat(5, 6)}) == 1);
  CHECK(set.count({1, 7, 1, rat(2, 3)}) == 1);
  CHECK(set.count({6, 7, 1, rat(5, 6)}) == 1);
  CHECK(set.count({6, 0, 1, rat(2, 3)}) == 1);
  CHECK(set.count({7, 0, 1, rat(5, 6)}) == 1);
}

TEST_CASE("clique gadget k=8 parameters from the closed forms") {
  GadgetApplication app = gadget_clique(positive_clause(8), 9);
  CHECK(app.params.alpha == Rational(28));
  CHECK(app.params.beta == Rational(49));
  CHECK(*app.params.delta_e == rat(1, 2));
  CHECK(app.aux_vars.size() == 2);
}

TEST_CASE("clique gadget rejects unsupported widths") {
  CHECK_THROWS_AS(gadget_clique(positive_clause(6), 7), std::invalid_argument);
  CHECK_THROWS_AS(gadget_clique(positive_clause(3), 4), std::invalid_argument);
}

TEST_CASE("strategy parsing and lookup") {
  Strategy s = Strategy::parse("1:unit,2:direct,3:tree,4+:tree-balanced");
  CHECK(s.lookup(1)->kind == GadgetKind::unit);
  CHECK(s.lookup(2)->kind == GadgetKind::direct);
  CHECK(s.lookup(3)->kind == GadgetKind::tree);
  CHECK(s.lookup(4)->kind == GadgetKind::tree_balanced);
  CHECK(s.lookup(9)->kind == GadgetKind::tree_balanced);
  CHECK(s.str() == "1:unit,2:direct,3:tree,4+:tree-balanced");
  Strategy shaped = Strategy::parse("4:tree((1 2) (3 4))");
  CHECK(shaped.lookup(4)->kind == GadgetKind::tree_shape);
  CHECK_THROWS_AS(Strategy::parse("nonsense"), std::invalid_argument);
  CHECK_THROWS_AS(Strategy::parse("2:direct,2:tree"), std::invalid_argument);
}

TEST_CASE("compile_cnf single binary clause") {
  CnfFormula f = parse_dimacs("p cnf 2 1\n1 2 0\n");
  CompileResult r = compile_cnf(f, Strategy::parse("1:unit,2:direct,3+:tree"));
  CHECK(r.problem.constraints.size() == 3);
  CHECK(r.total_aux == 0);
  CHECK(r.sum_beta_minus_alpha == rat(1, 2));
  CHECK(r.unsat_threshold == rat(3, 2));
}

TEST_CASE("compile_cnf width-5 clause with the comb tree") {
  CnfFormula f = parse_dimacs("p cnf 5 1\n1 2 3 4 5 0\n");
  CompileResult r = compile_cnf(f, Strategy::parse("2+:tree"));
  CHECK(r.problem.constraints.size() == 12);
  CHECK(r.total_aux == 3);
  CHECK(r.problem.num_vars == 8);
}

TEST_CASE("compile_cnf empty formula") {
  CnfFormula f;
  CompileResult r = compile_cnf(f, Strategy::parse("2+:tree"));
  CHECK(r.problem.constraints.empty());
  CHECK(r.sum_alpha_minus_one == Rational(0));
  CHECK(r.sum_beta_minus_alpha == Rational(0));
  CHECK(r.unsat_threshold == Rational(1));
}

TEST_CASE("compile_cnf reports a strategy gap") {
  CnfFormula f = parse_dimacs("p cnf 3 1\n1 2 3 0\n");
  CHECK_THROWS_AS(compile_cnf(f, Strategy::parse("2:direct")),
                  std::invalid_argument);
  CHECK_THROWS_AS(compile_cnf(f, Strategy::parse("3:clique")),
                  std::invalid_argument);
}

TEST_CASE("compile_cnf allocates aux vars deterministically in clause order") {
  CnfFormula f = parse_dimacs("p cnf 6 2\n1 2 3 0\n4 5 6 0\n");
  CompileResult r = compile_cnf(f, Strategy::parse("3:tree"));
  REQUIRE(r.applications.size() == 2);
  CHECK(r.applications[0].aux_vars == std::vector<int>{7});
  CHECK(r.applications[1].aux_vars == std::vector<int>{8});
}

TEST_CASE("compile_cnf cancellation across clauses lands in the offset") {
  CnfFormula f = parse_dimacs("p cnf 4 2\n1 2 3 0\n-1 2 4 0\n");
  CompileResult r = compile_cnf(f, Strategy::parse("3:tree"));
  CHECK(r.problem.offset == rat(1, 2));
}

TEST_CASE("formula_to_3sat rewrites wide clauses only") {
  CnfFormula f = parse_dimacs("p cnf 5 2\n1 2 3 4 5 0\n1 -2 0\n");
  CnfFormula g = formula_to_3sat(f);
  CHECK(g.num_vars == 7);
  REQUIRE(g.clauses.size() == 4);
  for (const Clause& c : g.clauses) CHECK(c.width() <= 3);
}

TEST_CASE("catalog params formulas") {
  CHECK(catalog_params(GadgetKind::tree, 5).alpha == Rational(4));
  CHECK(catalog_params(GadgetKind::tree, 5).beta == Rational(6));
  CHECK(catalog_params(GadgetKind::clique, 4).delta_e == Rational(2));
  CHECK(catalog_params(GadgetKind::nusslein, 3).paper_claimed_alpha ==
        rat(5, 2));
  CHECK_THROWS_AS(catalog_params(GadgetKind::clique, 6), std::invalid_argument);
}
