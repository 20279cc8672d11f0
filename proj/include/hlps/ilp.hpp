// Copyright 2026 The hlps Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

/// Small mixed 0/1 integer linear programs: an LP-based branch and bound
/// built on a dense two-phase simplex, plus an LP-format writer for external
/// solvers.
namespace hlps::ilp {

enum class Sense { le, ge, eq };

struct Term {
  int var;
  double coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0;
};

/// Minimize `objective · x + offset` subject to `constraints` and bounds.
struct Problem {
  std::vector<std::string> names;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integer;
  std::vector<Constraint> constraints;
  double offset = 0;
  /// Every integer-feasible point has an integral objective; lets the
  /// search prune nodes that cannot improve by at least one.
  bool integral_objective = false;

  int add_var(const std::string& name, double lo, double hi, bool is_integer, double cost = 0);
  int add_binary(const std::string& name, double cost = 0) { return add_var(name, 0, 1, true, cost); }
  void add(Constraint c) { constraints.push_back(std::move(c)); }
  int size() const { return static_cast<int>(names.size()); }
};

enum class Status { optimal, feasible, infeasible, unknown };

std::string to_string(Status s);

struct Solution {
  Status status = Status::unknown;
  std::vector<double> values;
  double objective = std::numeric_limits<double>::infinity();
  long nodes = 0;
  bool timed_out = false;
};

struct Options {
  double time_limit = 400;  // seconds per solve
};

/// Result of one LP relaxation.
struct LpResult {
  enum class Kind { optimal, infeasible, unbounded } kind = Kind::infeasible;
  std::vector<double> values;
  double objective = 0;
};

/// Solves the LP relaxation of `p` with bounds replaced by `lower`/`upper`.
LpResult solve_lp(const Problem& p, const std::vector<double>& lower, const std::vector<double>& upper);

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Solution solve(const Problem& p, const Options& options) const = 0;
};

/// Depth-first branch and bound. Integer variables are branched in index
/// order, down branch first, and only complete leaves become incumbents, so
/// among optimal points the lexicographically smallest is returned.
class BranchAndBound : public Backend {
 public:
  Solution solve(const Problem& p, const Options& options) const override;
};

/// Runs an external solver command. `{lp}` and `{sol}` in the command are
/// replaced by the problem and solution file paths. The solution file is
/// scanned for `<var-name> <value>` pairs; a line mentioning "infeasible"
/// marks the problem infeasible.
class ExternalSolver : public Backend {
 public:
  explicit ExternalSolver(std::string command) : command_(std::move(command)) {}
  Solution solve(const Problem& p, const Options& options) const override;

 private:
  std::string command_;
};

/// CPLEX LP-format text of `p`.
std::string to_lp(const Problem& p);

/// Solves with the embedded branch and bound.
Solution solve(const Problem& p, const Options& options = {});

/// Objective value of `x` and whether it satisfies every constraint and bound.
std::pair<double, bool> evaluate(const Problem& p, const std::vector<double>& x, double tol = 1e-6);

}  // namespace hlps::ilp
