#include "m2x/formula.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace m2x {

bool Clause::satisfied_by(const std::vector<uint8_t>& bits_1based) const {
  for (const Literal& l : literals) {
    bool v = bits_1based[static_cast<std::size_t>(l.var)] != 0;
    if (v != l.negated) return true;
  }
  return false;
}

Clause clause_of(std::initializer_list<int> lits) {
  Clause c;
  for (int x : lits) c.literals.push_back(lit(x));
  return c;
}

bool normalize_clause(Clause& c, int* duplicates_removed) {
  std::sort(c.literals.begin(), c.literals.end());
  auto last = std::unique(c.literals.begin(), c.literals.end());
  if (duplicates_removed)
    *duplicates_removed +=
        static_cast<int>(std::distance(last, c.literals.end()));
  c.literals.erase(last, c.literals.end());
  for (std::size_t i = 1; i < c.literals.size(); ++i)
    if (c.literals[i].var == c.literals[i - 1].var) return false;  // tautology
  return true;
}

void normalize_formula(CnfFormula& f, ParseStats* stats) {
  std::vector<Clause> kept;
  kept.reserve(f.clauses.size());
  for (Clause& c : f.clauses) {
    int dups = 0;
    if (normalize_clause(c, &dups)) {
      kept.push_back(std::move(c));
    } else if (stats) {
      stats->tautologies_dropped++;
    }
    if (stats) stats->duplicate_literals_removed += dups;
  }
  f.clauses = std::move(kept);
}

CnfFormula parse_dimacs(std::istream& in, ParseStats* stats) {
  CnfFormula f;
  ParseStats local;
  std::string tok;
  bool header_seen = false;
  long declared_clauses = 0;

  // Skip comments and find the problem line.
  std::string line;
  std::stringstream body;
  while (std::getline(in, line)) {
    std::size_t p = line.find_first_not_of(" \t\r");
    if (p == std::string::npos) continue;
    if (line[p] == 'c') continue;
    if (line[p] == 'p') {
      std::istringstream hs(line.substr(p));
      std::string pword, fmt;
      long nv = -1, nc = -1;
      hs >> pword >> fmt >> nv >> nc;
      if (pword != "p" || fmt != "cnf" || nv < 0 || nc < 0)
        throw std::runtime_error("malformed DIMACS header: " + line);
      f.num_vars = static_cast<int>(nv);
      declared_clauses = nc;
      header_seen = true;
      continue;
    }
    if (!header_seen)
      throw std::runtime_error("clause data before DIMACS header");
    body << line << '\n';
  }
  if (!header_seen) throw std::runtime_error("missing DIMACS header");

  Clause cur;
  long val;
  while (body >> val) {
    if (val == 0) {
      if (cur.literals.empty())
        throw std::runtime_error(
            "empty clause: formula is trivially unsatisfiable");
      f.clauses.push_back(std::move(cur));
      cur = Clause{};
      continue;
    }
    long v = val < 0 ? -val : val;
    if (v > f.num_vars)
      throw std::runtime_error("literal " + std::to_string(val) +
                               " exceeds declared variable count");
    cur.literals.push_back(lit(static_cast<int>(val)));
  }
  if (!body.eof() && body.fail()) {
    body.clear();
    std::string bad;
    body >> bad;
    throw std::runtime_error("unexpected token in clause data: " + bad);
  }
  if (!cur.literals.empty()) throw std::runtime_error("unterminated clause");

  local.declared_clauses = static_cast<int>(declared_clauses);
  local.clause_count_mismatch =
      declared_clauses != static_cast<long>(f.clauses.size());
  normalize_formula(f, &local);
  if (stats) *stats = local;
  return f;
}

CnfFormula parse_dimacs(const std::string& text, ParseStats* stats) {
  std::istringstream in(text);
  return parse_dimacs(in, stats);
}

void write_dimacs(std::ostream& out, const CnfFormula& f) {
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const Clause& c : f.clauses) {
    for (const Literal& l : c.literals) out << to_dimacs(l) << ' ';
    out << "0\n";
  }
}

std::string to_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  write_dimacs(out, f);
  return out.str();
}

}  // namespace m2x
