#include "m2x/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "m2x/convert.hpp"

namespace m2x {

SourcePredicate clause_predicate(const Clause& c) {
  std::vector<uint8_t> negated;
  for (const Literal& l : c.literals) negated.push_back(l.negated ? 1 : 0);
  return [negated](uint64_t x) {
    for (std::size_t i = 0; i < negated.size(); ++i) {
      bool v = (x >> i) & 1;
      if (v != (negated[i] != 0)) return true;
    }
    return false;
  };
}

SourcePredicate or_equivalence_predicate(const Clause& src) {
  if (src.width() != 3)
    throw std::invalid_argument("or-equivalence needs three literals");
  std::vector<uint8_t> negated;
  for (const Literal& l : src.literals) negated.push_back(l.negated ? 1 : 0);
  return [negated](uint64_t x) {
    auto val = [&](int i) {
      return (((x >> i) & 1) != 0) != (negated[static_cast<std::size_t>(i)] != 0);
    };
    return (val(0) || val(1)) == val(2);
  };
}

namespace {

// fragment remapped to local variables: clause vars 1..nx, aux nx+1..nx+na
Max2XorProblem remap_fragment(const GadgetApplication& app) {
  std::vector<std::pair<int, int>> mapping;
  int local = 0;
  for (int v : app.clause_vars) mapping.emplace_back(v, ++local);
  for (int v : app.aux_vars) mapping.emplace_back(v, ++local);
  auto local_of = [&](int v) {
    for (auto& [from, to] : mapping)
      if (from == v) return to;
    throw std::invalid_argument("fragment scope outside clause/aux variables");
  };
  Max2XorProblem out;
  out.num_vars = local;
  out.offset = app.fragment.offset;
  for (const auto& c : app.fragment.constraints) {
    if (c.unary())
      out.add_unary(local_of(c.u), c.rhs, c.weight);
    else
      out.add_pair(local_of(c.u), local_of(c.v), c.rhs, c.weight);
  }
  return out;
}

}  // namespace

CertifyOutcome certify_gadget(const GadgetApplication& app,
                              const SourcePredicate& source, int var_bound) {
  const int nx = static_cast<int>(app.clause_vars.size());
  const int na = static_cast<int>(app.aux_vars.size());
  CertifyOutcome out;
  if (nx + na > var_bound) {
    out.failure = "certification bound exceeded: " + std::to_string(nx + na) +
                  " variables";
    return out;
  }
  Max2XorProblem local = remap_fragment(app);
  local.num_vars = nx + na;
  auto scaled = ScaledProblem::build(local);

  std::vector<uint8_t> bits(static_cast<std::size_t>(nx + na) + 1, 0);
  const uint64_t x_count = uint64_t{1} << nx;
  const uint64_t a_count = uint64_t{1} << na;

  // exact rational evaluation per (x, aux) pair; the scaled engine keeps it
  // integral whenever the weights allow
  std::optional<Rational> alpha;
  uint64_t alpha_witness = 0;
  Rational max_fals_best;
  bool any_fals = false, any_sat = false;
  out.cert.table.reserve(x_count);

  for (uint64_t x = 0; x < x_count; ++x) {
    for (int i = 0; i < nx; ++i)
      bits[static_cast<std::size_t>(i) + 1] = (x >> i) & 1;
    bool sat = source(x);
    Rational best;
    bool first = true;
    for (uint64_t a = 0; a < a_count; ++a) {
      for (int i = 0; i < na; ++i)
        bits[static_cast<std::size_t>(nx + i) + 1] = (a >> i) & 1;
      Rational value = scaled ? scaled->unscale(scaled->satisfied(bits))
                              : [&] {
                                  Rational s(0);
                                  for (const auto& c : local.constraints) {
                                    int val = bits[static_cast<std::size_t>(c.u)];
                                    if (!c.unary())
                                      val ^= bits[static_cast<std::size_t>(c.v)];
                                    if (val == c.rhs) s += c.weight;
                                  }
                                  return s;
                                }();
      if (first || value > best) best = value;
      first = false;
    }
    PerAssignmentRow row;
    row.x_code = x;
    row.source_satisfied = sat;
    row.best_extension = best;
    out.cert.table.push_back(row);
    if (sat) {
      any_sat = true;
      if (!alpha) {
        alpha = best;
        alpha_witness = x;
      } else if (*alpha != best) {
        out.failure =
            "not a gadget: satisfying assignments reach different maxima (" +
            rat_str(*alpha) + " at x=" + std::to_string(alpha_witness) +
            ", " + rat_str(best) + " at x=" + std::to_string(x) + ")";
        out.witness_x = x;
        return out;
      }
    } else {
      if (!any_fals || best > max_fals_best) max_fals_best = best;
      any_fals = true;
    }
  }
  if (!any_sat) {
    out.failure = "not a gadget: source constraint is unsatisfiable";
    return out;
  }

  out.cert.alpha = *alpha;
  out.cert.beta = local.weight();
  bool strict_all = any_fals, strict_some = false;
  for (auto& row : out.cert.table) {
    if (row.source_satisfied) continue;
    if (row.best_extension > *alpha - 1) {
      out.failure = "not a gadget: falsifying assignment x=" +
                    std::to_string(row.x_code) + " reaches " +
                    rat_str(row.best_extension) + " > alpha-1";
      out.witness_x = row.x_code;
      return out;
    }
    row.attains_alpha_minus_one = row.best_extension == *alpha - 1;
    strict_all = strict_all && row.attains_alpha_minus_one;
    strict_some = strict_some || row.attains_alpha_minus_one;
  }
  out.cert.strict = strict_all;
  out.cert.strict_some = strict_some;
  if (any_fals) out.cert.gap = *alpha - max_fals_best;
  if (!local.constraints.empty()) out.cert.delta_e = energy_gap(local);
  out.ok = true;
  return out;
}

CertifyOutcome certify_gadget(const GadgetApplication& app, const Clause& c,
                              int var_bound) {
  return certify_gadget(app, clause_predicate(c), var_bound);
}

std::string describe_certificate(const GadgetCertificate& cert) {
  std::ostringstream out;
  out << "(" << rat_str(cert.alpha) << "," << rat_str(cert.beta) << ")-gadget";
  if (cert.strict) out << ", strict";
  if (cert.delta_e) out << ", dE=" << rat_str(*cert.delta_e);
  return out.str();
}

// --- Opt/Cost bookkeeping ----------------------------------------------------

OptCostReport check_opt_cost_relation(const CnfFormula& f,
                                      const Strategy& strategy, int var_bound) {
  OptCostReport rep;
  CompileResult compiled = compile_cnf(f, strategy);
  if (f.num_vars > var_bound || compiled.problem.num_vars > var_bound)
    throw std::invalid_argument("opt/cost check: enumeration bound exceeded");

  // MaxSAT view with unit weights over the original variables
  long best_sat = 0;
  const uint64_t count = uint64_t{1} << f.num_vars;
  std::vector<uint8_t> bits(static_cast<std::size_t>(f.num_vars) + 1, 0);
  for (uint64_t x = 0; x < count; ++x) {
    for (int i = 0; i < f.num_vars; ++i)
      bits[static_cast<std::size_t>(i) + 1] = (x >> i) & 1;
    long sat = 0;
    for (const Clause& c : f.clauses)
      if (c.satisfied_by(bits)) ++sat;
    best_sat = std::max(best_sat, sat);
  }
  rep.opt_f = Rational(best_sat);
  rep.cost_f = Rational(static_cast<long>(f.clauses.size())) - rep.opt_f;

  OptResult pr = exhaustive_opt(compiled.problem, var_bound, 1);
  rep.opt_p = pr.opt;
  rep.cost_p = pr.cost;
  rep.sum_alpha_minus_one = compiled.sum_alpha_minus_one;
  rep.sum_beta_minus_alpha = compiled.sum_beta_minus_alpha;
  rep.unsat_threshold = compiled.unsat_threshold;

  rep.all_strict = true;
  for (const auto& app : compiled.applications)
    rep.all_strict = rep.all_strict && app.params.strict;

  Rational opt_bound = rep.sum_alpha_minus_one + rep.opt_f;
  Rational cost_bound = rep.sum_beta_minus_alpha + rep.cost_f;
  rep.opt_relation_holds =
      rep.all_strict ? rep.opt_p == opt_bound : rep.opt_p <= opt_bound;
  rep.cost_relation_holds =
      rep.all_strict ? rep.cost_p == cost_bound : rep.cost_p >= cost_bound;

  bool unsat_actual = rep.cost_f >= 1;
  bool unsat_by_threshold = rep.cost_p >= rep.unsat_threshold;
  rep.unsat_classification_correct = unsat_actual == unsat_by_threshold;
  return rep;
}

// --- simulated annealing ------------------------------------------------------

namespace {

struct DoubleEngine {
  struct Entry {
    int u, v, rhs;
    double w;
  };
  std::vector<Entry> entries;
  std::vector<std::vector<int32_t>> touching;
  double total = 0;

  explicit DoubleEngine(const Max2XorProblem& p) {
    touching.assign(static_cast<std::size_t>(p.num_vars) + 1, {});
    for (const auto& c : p.constraints) {
      Entry e{c.u, c.v, c.rhs, rat_double(c.weight)};
      total += e.w;
      int idx = static_cast<int>(entries.size());
      entries.push_back(e);
      touching[static_cast<std::size_t>(c.u)].push_back(idx);
      if (c.v != 0) touching[static_cast<std::size_t>(c.v)].push_back(idx);
    }
  }

  double satisfied(const std::vector<uint8_t>& bits) const {
    double s = 0;
    for (const auto& e : entries) {
      int val = bits[static_cast<std::size_t>(e.u)];
      if (e.v != 0) val ^= bits[static_cast<std::size_t>(e.v)];
      if (val == e.rhs) s += e.w;
    }
    return s;
  }

  double flip_delta(const std::vector<uint8_t>& bits, int var) const {
    double d = 0;
    for (int32_t idx : touching[static_cast<std::size_t>(var)]) {
      const Entry& e = entries[static_cast<std::size_t>(idx)];
      int val = bits[static_cast<std::size_t>(e.u)];
      if (e.v != 0) val ^= bits[static_cast<std::size_t>(e.v)];
      d += (val == e.rhs) ? -e.w : e.w;
    }
    return d;
  }
};

}  // namespace

AnnealResult anneal_solve(const Max2XorProblem& p, const AnnealSchedule& s,
                          uint64_t seed) {
  AnnealResult out;
  out.best_assignment = Assignment(p.num_vars);
  if (p.num_vars == 0 || p.constraints.empty()) {
    out.best_value = evaluate(p, out.best_assignment).falsified + p.offset;
    return out;
  }
  if (s.sweeps < 1 || s.restarts < 1)
    throw std::invalid_argument("annealing schedule needs sweeps, restarts >= 1");

  DoubleEngine eng(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double ratio =
      s.sweeps > 1 ? std::pow(s.t_end / s.t_start, 1.0 / (s.sweeps - 1)) : 1.0;

  std::vector<uint8_t> best_bits;
  double best_sat = -1;
  for (int restart = 0; restart < s.restarts; ++restart) {
    std::vector<uint8_t> bits(static_cast<std::size_t>(p.num_vars) + 1, 0);
    for (int v = 1; v <= p.num_vars; ++v) bits[static_cast<std::size_t>(v)] = unif(rng) < 0.5;
    double cur = eng.satisfied(bits);
    if (cur > best_sat) {
      best_sat = cur;
      best_bits = bits;
    }
    double temp = s.t_start;
    for (int sweep = 0; sweep < s.sweeps; ++sweep, temp *= ratio) {
      for (int v = 1; v <= p.num_vars; ++v) {
        double d = eng.flip_delta(bits, v);
        if (d >= 0 || unif(rng) < std::exp(d / temp)) {
          bits[static_cast<std::size_t>(v)] ^= 1;
          cur += d;
          if (cur > best_sat) {
            best_sat = cur;
            best_bits = bits;
          }
        }
      }
      out.trace.push_back(eng.total - best_sat);
    }
  }
  out.best_assignment.bits = best_bits;
  EvalResult exact = evaluate(p, out.best_assignment);
  out.best_value = exact.falsified + p.offset;
  return out;
}

IsingAnnealResult anneal_solve_ising(const IsingModel& m,
                                     const AnnealSchedule& s, uint64_t seed) {
  Max2XorProblem p = ising_to_max2xor(m);
  p.num_vars = std::max(p.num_vars, m.num_vars);
  AnnealResult r = anneal_solve(p, s, seed);
  IsingAnnealResult out;
  out.best_assignment = r.best_assignment;
  out.trace = std::move(r.trace);
  // E(z) = falsified(P) - Weight(P)/2 + model offset
  out.best_energy = ising_energy(m, out.best_assignment);
  return out;
}

// --- tree lemma checks -----------------------------------------------------------

TreeLemmaReport check_tree_lemma(int k, const TreeShape& shape) {
  if (k < 2 || k > 12)
    throw std::invalid_argument("tree lemma check supports 2 <= k <= 12");
  Clause c;
  for (int i = 1; i <= k; ++i) c.literals.push_back(Literal{i, false});
  int root = 0;
  std::vector<int> aux;
  Max2XorProblem frag = tree_with_root_var(c, shape, k + 1, &root, &aux);

  TreeLemmaReport rep;
  rep.k = k;
  rep.constraint_count = static_cast<int>(frag.constraints.size());
  rep.count_ok = rep.constraint_count == 3 * (k - 1);

  const int total_vars = frag.num_vars;  // x's, aux chain, root
  const int n_ext = total_vars - k;      // aux vars including the root
  std::vector<uint8_t> bits(static_cast<std::size_t>(total_vars) + 1, 0);
  auto count_sat = [&]() {
    int n = 0;
    for (const auto& cc : frag.constraints) {
      int val = bits[static_cast<std::size_t>(cc.u)];
      if (!cc.unary()) val ^= bits[static_cast<std::size_t>(cc.v)];
      if (val == cc.rhs) ++n;
    }
    return n;
  };

  int global_max = 0;
  bool extension_ok = true, falsified_ok = true;
  for (uint64_t x = 0; x < (uint64_t{1} << k); ++x) {
    for (int i = 0; i < k; ++i)
      bits[static_cast<std::size_t>(i) + 1] = (x >> i) & 1;
    bool clause_value = x != 0;
    int best_matching_root = -1;  // root fixed to the clause value
    int best_root_true = -1;      // root fixed to 1
    for (uint64_t e = 0; e < (uint64_t{1} << n_ext); ++e) {
      for (int i = 0; i < n_ext; ++i)
        bits[static_cast<std::size_t>(k + i) + 1] = (e >> i) & 1;
      int sat = count_sat();
      global_max = std::max(global_max, sat);
      bool root_val = bits[static_cast<std::size_t>(root)] != 0;
      if (root_val == clause_value)
        best_matching_root = std::max(best_matching_root, sat);
      if (root_val) best_root_true = std::max(best_root_true, sat);
    }
    if (best_matching_root != 2 * (k - 1)) extension_ok = false;
    if (!clause_value && best_root_true != 2 * (k - 2)) falsified_ok = false;
  }
  rep.max_satisfied = global_max;
  rep.max_ok = global_max == 2 * (k - 1);
  rep.extension_ok = extension_ok;
  rep.falsified_root_true_ok = falsified_ok;
  return rep;
}

}  // namespace m2x
