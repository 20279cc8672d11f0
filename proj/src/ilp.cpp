// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlps/ilp.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "hlps/ir.hpp"

namespace hlps::ilp {

namespace {

constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

int Problem::add_var(const std::string& name, double lo, double hi, bool is_integer, double cost) {
  names.push_back(name);
  lower.push_back(lo);
  upper.push_back(hi);
  integer.push_back(is_integer);
  objective.push_back(cost);
  return size() - 1;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::feasible: return "feasible";
    case Status::infeasible: return "infeasible";
    case Status::unknown: return "unknown";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// dense two-phase simplex, Bland's rule

namespace {

class Tableau {
 public:
  Tableau(int rows, int cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, -1) {}

  double& at(int r, int c) { return t_[r * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  // row `rows_` holds reduced costs; its rhs is minus the objective
  double& cost(int c) { return at(rows_, c); }
  int& basis(int r) { return basis_[r]; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void pivot(int pr, int pc) {
    const double inv = 1.0 / at(pr, pc);
    for (int c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (int r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (std::abs(f) < 1e-14) continue;
      for (int c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed) {
    for (long iter = 0; iter < 200000; ++iter) {
      int pc = -1;
      for (int c = 0; c < cols_; ++c) {
        if (allowed[c] && cost(c) < -kEps) {
          pc = c;
          break;
        }
      }
      if (pc < 0) return true;
      int pr = -1;
      double best = kInf;
      for (int r = 0; r < rows_; ++r) {
        const double a = at(r, pc);
        if (a <= kEps) continue;
        const double ratio = rhs(r) / a;
        if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && basis_[r] < basis_[pr])) {
          best = ratio;
          pr = r;
        }
      }
      if (pr < 0) return false;
      pivot(pr, pc);
    }
    throw Error("simplex iteration limit reached");
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> t_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const Problem& p, const std::vector<double>& lower, const std::vector<double>& upper) {
  const int n = p.size();
  LpResult out;
  std::vector<int> col(n, -1);
  int nfree = 0;
  for (int j = 0; j < n; ++j) {
    if (upper[j] < lower[j] - kEps) return out;
    if (upper[j] - lower[j] > kEps) col[j] = nfree++;
  }

  struct Row {
    std::vector<std::pair<int, double>> a;
    Sense sense;
    double rhs;
  };
  std::vector<Row> rows;
  for (const auto& c : p.constraints) {
    Row r{{}, c.sense, c.rhs};
    for (const auto& t : c.terms) {
      r.rhs -= t.coef * lower[t.var];
      if (col[t.var] >= 0) r.a.emplace_back(col[t.var], t.coef);
    }
    if (r.a.empty()) {
      const bool ok = r.sense == Sense::le   ? r.rhs >= -1e-7
                      : r.sense == Sense::ge ? r.rhs <= 1e-7
                                             : std::abs(r.rhs) <= 1e-7;
      if (!ok) return out;
      continue;
    }
    rows.push_back(std::move(r));
  }
  for (int j = 0; j < n; ++j) {
    if (col[j] >= 0 && std::isfinite(upper[j])) rows.push_back({{{col[j], 1.0}}, Sense::le, upper[j] - lower[j]});
  }
  for (auto& r : rows) {
    if (r.rhs < 0) {
      r.rhs = -r.rhs;
      for (auto& [c, v] : r.a) v = -v;
      if (r.sense == Sense::le) r.sense = Sense::ge;
      else if (r.sense == Sense::ge) r.sense = Sense::le;
    }
  }

  const int m = static_cast<int>(rows.size());
  int nslack = 0;
  int nart = 0;
  for (const auto& r : rows) {
    nslack += r.sense != Sense::eq;
    nart += r.sense != Sense::le;
  }
  const int ncols = nfree + nslack + nart;
  Tableau t(m, ncols);
  std::vector<bool> artificial(ncols, false);
  int next_slack = nfree;
  int next_art = nfree + nslack;
  for (int i = 0; i < m; ++i) {
    const Row& r = rows[i];
    for (const auto& [c, v] : r.a) t.at(i, c) += v;
    t.rhs(i) = r.rhs;
    if (r.sense == Sense::le) {
      t.at(i, next_slack) = 1.0;
      t.basis(i) = next_slack++;
    } else {
      if (r.sense == Sense::ge) t.at(i, next_slack++) = -1.0;
      t.at(i, next_art) = 1.0;
      artificial[next_art] = true;
      t.basis(i) = next_art++;
    }
  }

  if (nart > 0) {
    for (int i = 0; i < m; ++i) {
      if (!artificial[t.basis(i)]) continue;
      for (int c = 0; c <= ncols; ++c) {
        if (c < ncols && artificial[c]) continue;
        t.at(m, c) -= t.at(i, c);
      }
    }
    std::vector<bool> allowed(ncols, true);
    t.optimize(allowed);
    if (-t.rhs(m) > 1e-7) return out;
    for (int i = 0; i < m; ++i) {
      if (!artificial[t.basis(i)]) continue;
      for (int c = 0; c < ncols; ++c) {
        if (!artificial[c] && std::abs(t.at(i, c)) > 1e-7) {
          t.pivot(i, c);
          break;
        }
      }
    }
  }

  // phase 2 reduced costs
  std::vector<double> cost(ncols, 0.0);
  for (int j = 0; j < n; ++j) {
    if (col[j] >= 0) cost[col[j]] = p.objective[j];
  }
  for (int c = 0; c <= ncols; ++c) t.at(m, c) = c < ncols ? cost[c] : 0.0;
  for (int i = 0; i < m; ++i) {
    const double cb = cost[t.basis(i)];
    if (cb == 0.0) continue;
    for (int c = 0; c <= ncols; ++c) t.at(m, c) -= cb * t.at(i, c);
  }
  std::vector<bool> allowed(ncols);
  for (int c = 0; c < ncols; ++c) allowed[c] = !artificial[c];
  if (!t.optimize(allowed)) {
    out.kind = LpResult::Kind::unbounded;
    return out;
  }

  std::vector<double> y(ncols, 0.0);
  for (int i = 0; i < m; ++i) y[t.basis(i)] = t.rhs(i);
  out.kind = LpResult::Kind::optimal;
  out.values.resize(n);
  out.objective = 0;
  for (int j = 0; j < n; ++j) {
    out.values[j] = lower[j] + (col[j] >= 0 ? y[col[j]] : 0.0);
    out.objective += p.objective[j] * out.values[j];
  }
  return out;
}

// ---------------------------------------------------------------------------

std::pair<double, bool> evaluate(const Problem& p, const std::vector<double>& x, double tol) {
  double obj = p.offset;
  bool ok = static_cast<int>(x.size()) == p.size();
  if (!ok) return {kInf, false};
  for (int j = 0; j < p.size(); ++j) {
    obj += p.objective[j] * x[j];
    if (x[j] < p.lower[j] - tol || x[j] > p.upper[j] + tol) ok = false;
    if (p.integer[j] && std::abs(x[j] - std::round(x[j])) > tol) ok = false;
  }
  for (const auto& c : p.constraints) {
    double lhs = 0;
    for (const auto& t : c.terms) lhs += t.coef * x[t.var];
    if (c.sense == Sense::le && lhs > c.rhs + tol) ok = false;
    if (c.sense == Sense::ge && lhs < c.rhs - tol) ok = false;
    if (c.sense == Sense::eq && std::abs(lhs - c.rhs) > tol) ok = false;
  }
  return {obj, ok};
}

Solution BranchAndBound::solve(const Problem& p, const Options& options) const {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  Solution sol;
  struct Node {
    std::vector<double> lo;
    std::vector<double> hi;
  };
  std::vector<Node> stack;
  Node root{p.lower, p.upper};
  for (int j = 0; j < p.size(); ++j) {
    if (p.integer[j]) {
      root.lo[j] = std::ceil(root.lo[j] - 1e-9);
      root.hi[j] = std::floor(root.hi[j] + 1e-9);
    }
  }
  stack.push_back(std::move(root));
  const double margin = p.integral_objective ? 0.5 : 1e-9;
  double best = kInf;
  while (!stack.empty()) {
    if (std::chrono::duration<double>(Clock::now() - start).count() > options.time_limit) {
      sol.timed_out = true;
      break;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    ++sol.nodes;
    LpResult lp = solve_lp(p, node.lo, node.hi);
    if (lp.kind != LpResult::Kind::optimal) continue;
    const double bound = lp.objective + p.offset;
    if (bound > best - margin) continue;
    int k = -1;
    for (int j = 0; j < p.size(); ++j) {
      if (p.integer[j] && node.hi[j] > node.lo[j]) {
        k = j;
        break;
      }
    }
    if (k < 0) {
      best = bound;
      sol.values = lp.values;
      sol.objective = bound;
      continue;
    }
    Node up = node;
    up.lo[k] = node.lo[k] + 1;
    node.hi[k] = node.lo[k];
    stack.push_back(std::move(up));
    stack.push_back(std::move(node));
  }
  if (!sol.values.empty()) {
    for (int j = 0; j < p.size(); ++j) {
      if (p.integer[j]) sol.values[j] = std::round(sol.values[j]);
    }
    sol.status = sol.timed_out ? Status::feasible : Status::optimal;
  } else {
    sol.status = sol.timed_out ? Status::unknown : Status::infeasible;
  }
  return sol;
}

Solution solve(const Problem& p, const Options& options) { return BranchAndBound().solve(p, options); }

// ---------------------------------------------------------------------------
// LP format

namespace {

std::string lp_name(const std::string& s, int index) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.') out = "v_" + out;
  return out + "_" + std::to_string(index);
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void write_terms(std::ostream& os, const std::vector<std::pair<double, std::string>>& terms) {
  if (terms.empty()) {
    os << " 0";
    return;
  }
  for (const auto& [coef, name] : terms) {
    os << (coef < 0 ? " - " : " + ") << number(std::abs(coef)) << " " << name;
  }
}

}  // namespace

std::string to_lp(const Problem& p) {
  std::vector<std::string> names;
  for (int j = 0; j < p.size(); ++j) names.push_back(lp_name(p.names[j], j));
  std::ostringstream os;
  os << "Minimize\n obj:";
  std::vector<std::pair<double, std::string>> obj;
  for (int j = 0; j < p.size(); ++j) {
    if (p.objective[j] != 0) obj.emplace_back(p.objective[j], names[j]);
  }
  write_terms(os, obj);
  os << "\nSubject To\n";
  int index = 0;
  for (const auto& c : p.constraints) {
    std::vector<std::pair<double, std::string>> terms;
    for (const auto& t : c.terms) terms.emplace_back(t.coef, names[t.var]);
    os << " " << lp_name(c.name.empty() ? "c" : c.name, index++) << ":";
    write_terms(os, terms);
    os << (c.sense == Sense::le ? " <= " : c.sense == Sense::ge ? " >= " : " = ") << number(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < p.size(); ++j) {
    os << " ";
    if (std::isfinite(p.lower[j])) os << number(p.lower[j]);
    else os << "-inf";
    os << " <= " << names[j] << " <= ";
    if (std::isfinite(p.upper[j])) os << number(p.upper[j]);
    else os << "+inf";
    os << "\n";
  }
  std::vector<std::string> ints;
  for (int j = 0; j < p.size(); ++j) {
    if (p.integer[j]) ints.push_back(names[j]);
  }
  if (!ints.empty()) {
    os << "Generals\n";
    for (const auto& n : ints) os << " " << n << "\n";
  }
  os << "End\n";
  return os.str();
}

Solution ExternalSolver::solve(const Problem& p, const Options& options) const {
  static std::atomic<int> counter{0};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("hlps_ilp_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::create_directories(dir);
  const fs::path lp = dir / "problem.lp";
  const fs::path solf = dir / "solution.txt";
  {
    std::ofstream os(lp);
    os << to_lp(p);
  }
  std::string cmd = command_;
  auto subst = [&](const std::string& key, const std::string& value) {
    for (size_t pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size())) {
      cmd.replace(pos, key.size(), value);
    }
  };
  subst("{lp}", lp.string());
  subst("{sol}", solf.string());
  subst("{time}", std::to_string(static_cast<long>(options.time_limit)));
  const int rc = std::system(cmd.c_str());
  Solution sol;
  std::ifstream is(solf);
  if (rc != 0 || !is) {
    fs::remove_all(dir);
    throw Error("external solver failed: " + cmd);
  }
  std::map<std::string, int> index;
  for (int j = 0; j < p.size(); ++j) index[lp_name(p.names[j], j)] = j;
  sol.values.assign(p.size(), 0.0);
  bool infeasible = false;
  std::string line;
  while (std::getline(is, line)) {
    std::string lower = line;
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    if (lower.find("infeasible") != std::string::npos) infeasible = true;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string s; ls >> s;) tok.push_back(s);
    for (size_t i = 0; i + 1 < tok.size(); ++i) {
      auto it = index.find(tok[i]);
      if (it == index.end()) continue;
      try {
        sol.values[it->second] = std::stod(tok[i + 1]);
      } catch (const std::exception&) {
      }
      break;
    }
  }
  fs::remove_all(dir);
  if (infeasible) {
    sol.status = Status::infeasible;
    sol.values.clear();
    return sol;
  }
  auto [obj, ok] = evaluate(p, sol.values);
  sol.objective = obj;
  sol.status = ok ? Status::optimal : Status::unknown;
  return sol;
}

}  // namespace hlps::ilp
