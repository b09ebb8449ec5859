#include "m2x/convert.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace m2x {

namespace {

template <class Map, class Key>
void add_coeff(Map& m, const Key& k, const Rational& v) {
  if (v == 0) return;
  auto [it, inserted] = m.try_emplace(k, v);
  if (!inserted) {
    it->second += v;
    if (it->second == 0) m.erase(it);
  }
}

std::pair<int, int> ordered(int i, int j) {
  return {std::min(i, j), std::max(i, j)};
}

}  // namespace

void QuboModel::add_linear(int i, const Rational& a) {
  num_vars = std::max(num_vars, i);
  add_coeff(linear, i, a);
}

void QuboModel::add_quadratic(int i, int j, const Rational& b) {
  if (i == j) throw std::invalid_argument("quadratic term needs distinct vars");
  num_vars = std::max({num_vars, i, j});
  add_coeff(quadratic, ordered(i, j), b);
}

void IsingModel::add_h(int i, const Rational& v) {
  num_vars = std::max(num_vars, i);
  add_coeff(h, i, v);
}

void IsingModel::add_J(int i, int j, const Rational& v) {
  if (i == j) throw std::invalid_argument("coupling needs distinct vars");
  num_vars = std::max({num_vars, i, j});
  add_coeff(J, ordered(i, j), v);
}

void CouplingGraph::add_edge(int u, int v) {
  if (u == v) throw std::invalid_argument("coupling graph has no self-loops");
  vertices.insert(u);
  vertices.insert(v);
  edges.insert(ordered(u, v));
}

bool CouplingGraph::adjacent(int u, int v) const {
  return edges.count(ordered(u, v)) != 0;
}

// --- conversions -----------------------------------------------------------

QuboModel max2xor_to_qubo(const Max2XorProblem& p) {
  QuboModel q;
  q.num_vars = p.num_vars;
  for (const auto& c : p.constraints) {
    if (c.unary()) {
      if (c.rhs == 0) {
        q.add_linear(c.u, c.weight);
      } else {
        q.add_linear(c.u, -c.weight);
        q.offset += c.weight;
      }
    } else {
      if (c.rhs == 0) {
        q.add_linear(c.u, c.weight);
        q.add_linear(c.v, c.weight);
        q.add_quadratic(c.u, c.v, -2 * c.weight);
      } else {
        q.add_linear(c.u, -c.weight);
        q.add_linear(c.v, -c.weight);
        q.add_quadratic(c.u, c.v, 2 * c.weight);
      }
    }
  }
  return q;
}

IsingModel qubo_to_ising(const QuboModel& q) {
  IsingModel m;
  m.num_vars = q.num_vars;
  m.offset = q.offset;
  for (const auto& [i, a] : q.linear) {
    m.add_h(i, a / 2);
    m.offset += a / 2;
  }
  for (const auto& [ij, b] : q.quadratic) {
    m.add_J(ij.first, ij.second, b / 4);
    m.add_h(ij.first, b / 4);
    m.add_h(ij.second, b / 4);
    m.offset += b / 4;
  }
  return m;
}

QuboModel ising_to_qubo(const IsingModel& m) {
  QuboModel q;
  q.num_vars = m.num_vars;
  q.offset = m.offset;
  for (const auto& [i, hv] : m.h) {
    q.add_linear(i, 2 * hv);
    q.offset -= hv;
  }
  for (const auto& [ij, jv] : m.J) {
    q.add_quadratic(ij.first, ij.second, 4 * jv);
    q.add_linear(ij.first, -2 * jv);
    q.add_linear(ij.second, -2 * jv);
    q.offset += jv;
  }
  return q;
}

IsingModel max2xor_to_ising(const Max2XorProblem& p) {
  IsingModel m;
  m.num_vars = p.num_vars;
  for (const auto& c : p.constraints) {
    Rational half_w = c.weight / 2;
    if (c.unary())
      m.add_h(c.u, c.rhs == 0 ? half_w : Rational(-half_w));
    else
      m.add_J(c.u, c.v, c.rhs == 1 ? half_w : Rational(-half_w));
    m.offset += c.weight / 2;
  }
  return m;
}

Max2XorProblem ising_to_max2xor(const IsingModel& m) {
  Max2XorProblem p;
  p.num_vars = m.num_vars;
  for (const auto& [i, hv] : m.h) {
    if (hv > 0)
      p.add_unary(i, 0, 2 * hv);
    else
      p.add_unary(i, 1, -2 * hv);
  }
  for (const auto& [ij, jv] : m.J) {
    if (jv > 0)
      p.add_pair(ij.first, ij.second, 1, 2 * jv);
    else
      p.add_pair(ij.first, ij.second, 0, -2 * jv);
  }
  return p;
}

Max2XorProblem qubo_to_max2xor(const QuboModel& q) {
  Max2XorProblem p = ising_to_max2xor(qubo_to_ising(q));
  p.num_vars = std::max(p.num_vars, q.num_vars);
  return p;
}

// --- evaluation ------------------------------------------------------------

Rational qubo_value(const QuboModel& q, const Assignment& x) {
  if (x.num_vars() < q.num_vars)
    throw std::invalid_argument("assignment too short for QUBO model");
  Rational val = q.offset;
  for (const auto& [i, a] : q.linear)
    if (x.get(i)) val += a;
  for (const auto& [ij, b] : q.quadratic)
    if (x.get(ij.first) && x.get(ij.second)) val += b;
  return val;
}

Rational ising_energy(const IsingModel& m, const Assignment& x) {
  if (x.num_vars() < m.num_vars)
    throw std::invalid_argument("assignment too short for Ising model");
  Rational val = m.offset;
  for (const auto& [i, hv] : m.h) val += x.get(i) ? hv : -hv;
  for (const auto& [ij, jv] : m.J)
    val += x.get(ij.first) == x.get(ij.second) ? jv : -jv;
  return val;
}

// --- energy gap --------------------------------------------------------------

Rational energy_gap(const IsingModel& m) {
  // min over nonzero coefficients of 1/|c| = 1/max|c|
  Rational max_abs(0);
  auto visit = [&](const Rational& c) {
    Rational a = c >= 0 ? c : Rational(-c);
    if (a > max_abs) max_abs = a;
  };
  for (const auto& [i, hv] : m.h) visit(hv);
  for (const auto& [ij, jv] : m.J) visit(jv);
  if (max_abs == 0)
    throw std::invalid_argument("energy gap undefined for an all-zero model");
  return Rational(1) / max_abs;
}

Rational energy_gap(const Max2XorProblem& p) {
  Max2XorProblem s = simplify(p);
  if (s.constraints.empty())
    throw std::invalid_argument("energy gap undefined for an empty problem");
  Rational max_w = s.constraints.front().weight;
  for (const auto& c : s.constraints) max_w = std::max(max_w, c.weight);
  Rational via_weights = Rational(2) / max_w;
  Rational via_ising = energy_gap(max2xor_to_ising(s));
  if (via_weights != via_ising)
    throw std::logic_error("energy gap mismatch between 2/w and Ising forms");
  return via_weights;
}

// --- normalization ------------------------------------------------------------

NormalizeResult normalize_to_ranges(const IsingModel& m, const Range& h_range,
                                    const Range& j_range) {
  if (m.h.empty() && m.J.empty())
    throw std::invalid_argument("cannot normalize an empty model");
  bool feasible = true;
  Rational s_lo(0);
  std::optional<Rational> s_hi;
  auto tighten = [&](const Rational& c, const Range& r) {
    if (c == 0 || !feasible) return;
    Rational hi_bound, lo_bound(0);
    if (c > 0) {
      if (r.hi < 0) {
        feasible = false;
        return;
      }
      hi_bound = r.hi / c;
      if (r.lo > 0) lo_bound = r.lo / c;
    } else {
      if (r.lo > 0) {
        feasible = false;
        return;
      }
      hi_bound = r.lo / c;
      if (r.hi < 0) lo_bound = r.hi / c;
    }
    s_hi = s_hi ? std::min(*s_hi, hi_bound) : hi_bound;
    s_lo = std::max(s_lo, lo_bound);
  };
  for (const auto& [i, hv] : m.h) tighten(hv, h_range);
  for (const auto& [ij, jv] : m.J) tighten(jv, j_range);
  if (!feasible || !s_hi || *s_hi < s_lo || *s_hi <= 0)
    throw std::invalid_argument("no positive scale fits the requested ranges");
  const Rational scale = *s_hi;
  NormalizeResult out;
  out.scale = scale;
  out.model.num_vars = m.num_vars;
  out.model.offset = m.offset * scale;
  for (const auto& [i, hv] : m.h) out.model.add_h(i, hv * scale);
  for (const auto& [ij, jv] : m.J)
    out.model.add_J(ij.first, ij.second, jv * scale);
  return out;
}

double landau_zener_success(double delta, double c) {
  if (c <= 0) throw std::invalid_argument("sweep rate must be positive");
  if (delta < 0) throw std::invalid_argument("energy gap must be nonnegative");
  return 1.0 - std::exp(-std::numbers::pi * delta * delta / (4.0 * c));
}

// --- chain rewriting ------------------------------------------------------------

namespace {

// Shortest path from src to dst whose interior lies in `free`; ties broken by
// walking from src through the smallest admissible neighbor id.
std::vector<int> route_path(const CouplingGraph& g, int src, int dst,
                            const std::set<int>& free_qubits) {
  auto allowed = [&](int v) {
    return v == src || v == dst || free_qubits.count(v) != 0;
  };
  // adjacency restricted to allowed vertices
  std::map<int, std::vector<int>> adj;
  for (const auto& [u, v] : g.edges) {
    if (!allowed(u) || !allowed(v)) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& [v, ns] : adj) std::sort(ns.begin(), ns.end());
  std::map<int, int> dist;
  std::deque<int> queue;
  dist[dst] = 0;
  queue.push_back(dst);
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int n : adj[v]) {
      if (dist.count(n)) continue;
      dist[n] = dist[v] + 1;
      queue.push_back(n);
    }
  }
  if (!dist.count(src)) return {};
  std::vector<int> path{src};
  int cur = src;
  while (cur != dst) {
    int next = -1;
    for (int n : adj[cur]) {
      if (dist.count(n) && dist[n] == dist[cur] - 1) {
        next = n;  // neighbors sorted ascending: first hit is smallest id
        break;
      }
    }
    if (next < 0) return {};
    path.push_back(next);
    cur = next;
  }
  return path;
}

}  // namespace

ChainResult chain_rewrite(const Max2XorProblem& p,
                          const std::map<int, int>& placement,
                          const CouplingGraph& g, const Rational& chain_weight) {
  if (chain_weight <= 0)
    throw std::invalid_argument("chain weight must be positive");
  std::set<int> used;
  for (const auto& [var, qubit] : placement) {
    if (!g.vertices.count(qubit))
      throw std::invalid_argument("placement targets unknown qubit " +
                                  std::to_string(qubit));
    if (!used.insert(qubit).second)
      throw std::invalid_argument("placement is not injective");
  }
  auto qubit_of = [&](int var) {
    auto it = placement.find(var);
    if (it == placement.end())
      throw std::invalid_argument("variable " + std::to_string(var) +
                                  " has no qubit placement");
    return it->second;
  };

  ChainResult out;
  out.problem.offset = p.offset;
  out.problem.num_vars = g.vertices.empty() ? 0 : *g.vertices.rbegin();
  std::set<int> free_qubits;
  for (int v : g.vertices)
    if (!used.count(v)) free_qubits.insert(v);

  Max2XorProblem canon = simplify(p);
  for (const auto& c : canon.constraints) {
    if (c.unary()) {
      out.problem.add_unary(qubit_of(c.u), c.rhs, c.weight);
      continue;
    }
    int qu = qubit_of(c.u), qv = qubit_of(c.v);
    if (g.adjacent(qu, qv)) {
      out.problem.add_pair(qu, qv, c.rhs, c.weight);
      continue;
    }
    std::vector<int> path = route_path(g, qu, qv, free_qubits);
    if (path.empty()) {
      out.report.failures.push_back(c);
      continue;
    }
    // interior qubits become chained copies of c.u
    for (std::size_t t = 0; t + 2 < path.size(); ++t)
      out.problem.add_pair(path[t], path[t + 1], 0, chain_weight);
    out.problem.add_pair(path[path.size() - 2], path.back(), c.rhs, c.weight);
    for (std::size_t t = 1; t + 1 < path.size(); ++t) {
      free_qubits.erase(path[t]);
      out.report.qubit_overhead++;
    }
    if (chain_weight < c.weight)
      out.report.chain_weight_below_constraint = true;
    out.report.chains.push_back(std::move(path));
  }
  return out;
}

// --- file formats ------------------------------------------------------------

std::string to_qubo_text(const QuboModel& q) {
  std::ostringstream out;
  out << "c offset = " << rat_str(q.offset) << '\n';
  out << "p qubo 0 " << q.num_vars << ' ' << q.linear.size() << ' '
      << q.quadratic.size() << '\n';
  for (const auto& [i, a] : q.linear)
    out << i << ' ' << i << ' ' << rat_str(a) << '\n';
  for (const auto& [ij, b] : q.quadratic)
    out << ij.first << ' ' << ij.second << ' ' << rat_str(b) << '\n';
  return out.str();
}

QuboModel from_qubo_text(const std::string& text) {
  QuboModel q;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  long max_node = 0, n_lin = 0, n_quad = 0;
  long seen_lin = 0, seen_quad = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c") {
      std::string word, eq, value;
      if (ls >> word >> eq >> value && word == "offset" && eq == "=")
        q.offset = rat_parse(value);
      continue;
    }
    if (first == "p") {
      std::string fmt;
      long target;
      if (!(ls >> fmt >> target >> max_node >> n_lin >> n_quad) ||
          fmt != "qubo")
        throw std::runtime_error("malformed qubo header: " + line);
      header = true;
      continue;
    }
    if (!header) throw std::runtime_error("qubo data before header");
    int i = std::stoi(first);
    int j;
    std::string value;
    if (!(ls >> j >> value))
      throw std::runtime_error("malformed qubo line: " + line);
    Rational coeff = rat_parse(value);
    if (i == j) {
      q.add_linear(i, coeff);
      ++seen_lin;
    } else {
      q.add_quadratic(i, j, coeff);
      ++seen_quad;
    }
  }
  if (!header) throw std::runtime_error("missing qubo header");
  if (seen_lin != n_lin || seen_quad != n_quad)
    throw std::runtime_error("qubo term counts disagree with header");
  q.num_vars = std::max(q.num_vars, static_cast<int>(max_node));
  return q;
}

std::string to_ising_json(const IsingModel& m) {
  nlohmann::ordered_json j;
  j["num_vars"] = m.num_vars;
  j["offset"] = rat_str(m.offset);
  auto& hs = j["h"] = nlohmann::ordered_json::array();
  for (const auto& [i, hv] : m.h) hs.push_back({i, rat_str(hv)});
  auto& js = j["J"] = nlohmann::ordered_json::array();
  for (const auto& [ij, jv] : m.J)
    js.push_back({ij.first, ij.second, rat_str(jv)});
  j["spin_convention"] = "true=+1";
  return j.dump(2) + "\n";
}

IsingModel from_ising_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  IsingModel m;
  m.num_vars = j.at("num_vars").get<int>();
  m.offset = rat_parse(j.at("offset").get<std::string>());
  if (j.contains("spin_convention") &&
      j.at("spin_convention").get<std::string>() != "true=+1")
    throw std::invalid_argument("unsupported spin convention");
  for (const auto& e : j.at("h"))
    m.add_h(e.at(0).get<int>(), rat_parse(e.at(1).get<std::string>()));
  for (const auto& e : j.at("J"))
    m.add_J(e.at(0).get<int>(), e.at(1).get<int>(),
            rat_parse(e.at(2).get<std::string>()));
  return m;
}

CouplingGraph parse_coupling_graph(const std::string& text) {
  CouplingGraph g;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c") continue;
    int u = std::stoi(first);
    int v;
    if (!(ls >> v)) throw std::runtime_error("malformed graph line: " + line);
    g.add_edge(u, v);
  }
  return g;
}

}  // namespace m2x
