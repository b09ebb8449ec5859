#include "m2x/max2xor.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace m2x {

XorConstraint::XorConstraint(int a, int rhs_, Rational w)
    : u(a), v(0), rhs(rhs_), weight(std::move(w)) {
  if (a < 1) throw std::invalid_argument("variable index must be >= 1");
  if (rhs_ != 0 && rhs_ != 1) throw std::invalid_argument("rhs must be 0/1");
  if (weight <= 0) throw std::invalid_argument("constraint weight must be > 0");
}

XorConstraint::XorConstraint(int a, int b, int rhs_, Rational w)
    : u(std::min(a, b)), v(std::max(a, b)), rhs(rhs_), weight(std::move(w)) {
  if (a < 1 || b < 1) throw std::invalid_argument("variable index must be >= 1");
  if (a == b) throw std::invalid_argument("pair scope variables must differ");
  if (rhs_ != 0 && rhs_ != 1) throw std::invalid_argument("rhs must be 0/1");
  if (weight <= 0) throw std::invalid_argument("constraint weight must be > 0");
}

Assignment Assignment::from_code(uint64_t code, int num_vars) {
  Assignment a(num_vars);
  for (int v = 1; v <= num_vars; ++v)
    a.bits[static_cast<std::size_t>(v)] = (code >> (v - 1)) & 1u;
  return a;
}

uint64_t Assignment::to_code() const {
  uint64_t code = 0;
  for (int v = 1; v <= num_vars(); ++v)
    if (get(v)) code |= uint64_t{1} << (v - 1);
  return code;
}

Rational Max2XorProblem::weight() const {
  Rational w(0);
  for (const auto& c : constraints) w += c.weight;
  return w;
}

void Max2XorProblem::add(XorConstraint c) {
  num_vars = std::max({num_vars, c.u, c.v});
  constraints.push_back(std::move(c));
}

static bool constraint_satisfied(const XorConstraint& c,
                                 const std::vector<uint8_t>& bits) {
  int val = bits[static_cast<std::size_t>(c.u)];
  if (!c.unary()) val ^= bits[static_cast<std::size_t>(c.v)];
  return val == c.rhs;
}

EvalResult evaluate(const Max2XorProblem& p, const Assignment& I) {
  if (I.num_vars() < p.num_vars)
    throw std::invalid_argument("assignment too short for problem");
  EvalResult r{p.offset, Rational(0)};
  for (const auto& c : p.constraints) {
    if (constraint_satisfied(c, I.bits))
      r.satisfied += c.weight;
    else
      r.falsified += c.weight;
  }
  return r;
}

Max2XorProblem simplify(const Max2XorProblem& p) {
  // weight per (scope, rhs)
  std::map<std::pair<int, int>, std::pair<Rational, Rational>> acc;
  for (const auto& c : p.constraints) {
    auto& slot = acc[{c.u, c.v}];
    (c.rhs == 0 ? slot.first : slot.second) += c.weight;
  }
  Max2XorProblem out;
  out.num_vars = p.num_vars;
  out.offset = p.offset;
  for (auto& [scope, ws] : acc) {
    auto& [w0, w1] = ws;
    Rational common = std::min(w0, w1);
    if (common > 0) {
      // one side of an opposite-rhs pair is satisfied by every assignment
      out.offset += common;
      w0 -= common;
      w1 -= common;
    }
    for (int rhs = 0; rhs <= 1; ++rhs) {
      const Rational& w = rhs == 0 ? w0 : w1;
      if (w <= 0) continue;
      if (scope.second == 0)
        out.constraints.emplace_back(scope.first, rhs, w);
      else
        out.constraints.emplace_back(scope.first, scope.second, rhs, w);
    }
  }
  std::sort(out.constraints.begin(), out.constraints.end());
  return out;
}

// --- fast evaluation engine ---------------------------------------------

std::optional<ScaledProblem> ScaledProblem::build(const Max2XorProblem& p) {
  mpz_class scale(1);
  for (const auto& c : p.constraints) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), c.weight.get_den().get_mpz_t());
  if (!fits_int64(scale) || scale > mpz_class(int64_t{1} << 32))
    return std::nullopt;
  ScaledProblem sp;
  sp.num_vars = p.num_vars;
  sp.denom_scale = scale;
  sp.touching.assign(static_cast<std::size_t>(p.num_vars) + 1, {});
  mpz_class total(0);
  for (const auto& c : p.constraints) {
    mpz_class w = c.weight.get_num() * (scale / c.weight.get_den());
    total += w;
    if (!fits_int64(w)) return std::nullopt;
    Entry e{c.u, c.v, c.rhs, static_cast<int64_t>(w.get_si())};
    int idx = static_cast<int>(sp.entries.size());
    sp.entries.push_back(e);
    sp.touching[static_cast<std::size_t>(c.u)].push_back(idx);
    if (c.v != 0) sp.touching[static_cast<std::size_t>(c.v)].push_back(idx);
  }
  if (!fits_int64(total) || total > mpz_class(int64_t{1} << 60))
    return std::nullopt;
  sp.total_weight = static_cast<int64_t>(total.get_si());
  return sp;
}

int64_t ScaledProblem::satisfied(const std::vector<uint8_t>& bits) const {
  int64_t s = 0;
  for (const auto& e : entries) {
    int val = bits[static_cast<std::size_t>(e.u)];
    if (e.v != 0) val ^= bits[static_cast<std::size_t>(e.v)];
    if (val == e.rhs) s += e.w;
  }
  return s;
}

int64_t ScaledProblem::flip_delta(const std::vector<uint8_t>& bits,
                                  int var) const {
  int64_t d = 0;
  for (int32_t idx : touching[static_cast<std::size_t>(var)]) {
    const Entry& e = entries[static_cast<std::size_t>(idx)];
    int val = bits[static_cast<std::size_t>(e.u)];
    if (e.v != 0) val ^= bits[static_cast<std::size_t>(e.v)];
    // flipping one incident variable toggles satisfaction
    d += (val == e.rhs) ? -e.w : e.w;
  }
  return d;
}

namespace {

// Rational twin of ScaledProblem for weights whose common denominator does
// not fit an int64.
struct RationalEngine {
  const Max2XorProblem& p;
  std::vector<std::vector<int32_t>> touching;

  explicit RationalEngine(const Max2XorProblem& prob) : p(prob) {
    touching.assign(static_cast<std::size_t>(p.num_vars) + 1, {});
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      const auto& c = p.constraints[i];
      touching[static_cast<std::size_t>(c.u)].push_back(static_cast<int32_t>(i));
      if (c.v != 0)
        touching[static_cast<std::size_t>(c.v)].push_back(
            static_cast<int32_t>(i));
    }
  }

  Rational satisfied(const std::vector<uint8_t>& bits) const {
    Rational s(0);
    for (const auto& c : p.constraints)
      if (constraint_satisfied(c, bits)) s += c.weight;
    return s;
  }

  Rational flip_delta(const std::vector<uint8_t>& bits, int var) const {
    Rational d(0);
    for (int32_t idx : touching[static_cast<std::size_t>(var)]) {
      const auto& c = p.constraints[static_cast<std::size_t>(idx)];
      if (constraint_satisfied(c, bits))
        d -= c.weight;
      else
        d += c.weight;
    }
    return d;
  }
};

// Finds max satisfied value over all 2^n assignments (Gray-code scan), then
// collects up to `cap` optimal assignments in ascending code order.
template <class Engine, class Value>
void scan_optimum(const Engine& eng, int num_vars, int cap, Value& best,
                  std::vector<uint64_t>& codes) {
  std::vector<uint8_t> bits(static_cast<std::size_t>(num_vars) + 1, 0);
  Value cur = eng.satisfied(bits);
  best = cur;
  const uint64_t count = uint64_t{1} << num_vars;
  for (uint64_t i = 1; i < count; ++i) {
    int var = __builtin_ctzll(i) + 1;  // Gray code flip
    cur += eng.flip_delta(bits, var);
    bits[static_cast<std::size_t>(var)] ^= 1;
    if (cur > best) best = cur;
  }
  // ascending pass for witnesses
  std::fill(bits.begin(), bits.end(), 0);
  cur = eng.satisfied(bits);
  uint64_t code = 0;
  while (true) {
    if (cur == best && static_cast<int>(codes.size()) < cap)
      codes.push_back(code);
    if (code + 1 == count) break;
    // increment: trailing ones flip to 0, next bit flips to 1
    uint64_t next = code + 1;
    uint64_t changed = code ^ next;
    while (changed) {
      int var = __builtin_ctzll(changed) + 1;
      cur += eng.flip_delta(bits, var);
      bits[static_cast<std::size_t>(var)] ^= 1;
      changed &= changed - 1;
    }
    code = next;
  }
}

}  // namespace

OptResult exhaustive_opt(const Max2XorProblem& p, int var_bound,
                         int witness_cap) {
  if (p.num_vars > var_bound)
    throw std::invalid_argument("exhaustive_opt: variable bound exceeded (" +
                                std::to_string(p.num_vars) + " > " +
                                std::to_string(var_bound) + ")");
  OptResult r;
  std::vector<uint64_t> codes;
  if (auto sp = ScaledProblem::build(p)) {
    int64_t best = 0;
    scan_optimum(*sp, p.num_vars, witness_cap, best, codes);
    r.opt = sp->unscale(best) + p.offset;
    r.cost = sp->unscale(sp->total_weight - best) + p.offset;
  } else {
    RationalEngine eng(p);
    Rational best(0);
    scan_optimum(eng, p.num_vars, witness_cap, best, codes);
    r.opt = best + p.offset;
    r.cost = p.weight() - best + p.offset;
  }
  for (uint64_t c : codes) r.witnesses.push_back(Assignment::from_code(c, p.num_vars));
  return r;
}

// --- serialization ------------------------------------------------------

std::string to_m2x_json(const Max2XorProblem& p) {
  nlohmann::ordered_json j;
  j["num_vars"] = p.num_vars;
  j["offset"] = rat_str(p.offset);
  auto& cs = j["constraints"] = nlohmann::ordered_json::array();
  for (const auto& c : p.constraints) {
    nlohmann::ordered_json e = nlohmann::ordered_json::array();
    e.push_back(c.u);
    if (!c.unary()) e.push_back(c.v);
    e.push_back(c.rhs);
    e.push_back(rat_str(c.weight));
    cs.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

Max2XorProblem from_m2x_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Max2XorProblem p;
  p.num_vars = j.at("num_vars").get<int>();
  if (p.num_vars < 0) throw std::invalid_argument("num_vars must be >= 0");
  p.offset = rat_parse(j.at("offset").get<std::string>());
  for (const auto& e : j.at("constraints")) {
    if (!e.is_array() || (e.size() != 3 && e.size() != 4))
      throw std::invalid_argument("constraint entry must be [scope..., rhs, w]");
    Rational w = rat_parse(e.back().get<std::string>());
    if (e.size() == 3)
      p.constraints.emplace_back(e[0].get<int>(), e[1].get<int>(), w);
    else
      p.constraints.emplace_back(e[0].get<int>(), e[1].get<int>(),
                                 e[2].get<int>(), w);
    const auto& c = p.constraints.back();
    if (std::max(c.u, c.v) > p.num_vars)
      throw std::invalid_argument("constraint variable exceeds num_vars");
  }
  return p;
}

}  // namespace m2x
