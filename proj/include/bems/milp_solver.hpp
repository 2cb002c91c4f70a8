#pragma once

// Bounded-variable primal simplex and best-bound branch-and-bound over binary
// variables. Dense tableau with sparse row/column skipping in the pivot, which
// keeps block-structured dispatch models cheap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bems/errors.hpp"

namespace bems {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNodeLimit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "Optimal";
    case SolveStatus::kInfeasible: return "Infeasible";
    case SolveStatus::kUnbounded: return "Unbounded";
    case SolveStatus::kNodeLimit: return "NodeLimit";
  }
  return "?";
}

struct Term {
  int var;
  double coef;
};

struct Variable {
  double lower = 0.0;
  double upper = kInfinity;
  double cost = 0.0;
  bool is_binary = false;
  std::string name;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  std::string name;
};

struct SolverOptions {
  double feasibility_tol = 1e-7;
  double integrality_tol = 1e-6;
  double relative_gap = 1e-6;
  long max_nodes = 100000;

  void validate() const {
    if (!(feasibility_tol > 0 && integrality_tol > 0 && relative_gap > 0))
      throw std::invalid_argument("solver tolerances must be positive");
    if (max_nodes < 1) throw std::invalid_argument("max_nodes must be >= 1");
  }
};

struct LpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  long nodes_explored = 0;
  long simplex_iterations = 0;

  bool has_solution() const { return !x.empty(); }
};

// Minimization problem  min c'x  s.t.  rows, lower <= x <= upper.
class LinearProgram {
 public:
  int add_variable(double lower, double upper, double cost, std::string name = {}) {
    vars_.push_back({lower, upper, cost, false, std::move(name)});
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_binary(double cost = 0.0, std::string name = {}) {
    vars_.push_back({0.0, 1.0, cost, true, std::move(name)});
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_constraint(std::vector<Term> terms, Relation rel, double rhs, std::string name = {}) {
    rows_.push_back({std::move(terms), rel, rhs, std::move(name)});
    return static_cast<int>(rows_.size()) - 1;
  }

  void set_bounds(int var, double lower, double upper) {
    vars_.at(static_cast<std::size_t>(var)).lower = lower;
    vars_.at(static_cast<std::size_t>(var)).upper = upper;
  }
  void set_cost(int var, double cost) { vars_.at(static_cast<std::size_t>(var)).cost = cost; }

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(rows_.size()); }
  const Variable& variable(int j) const { return vars_.at(static_cast<std::size_t>(j)); }
  const Constraint& constraint(int i) const { return rows_.at(static_cast<std::size_t>(i)); }
  std::span<const Variable> variables() const { return vars_; }
  std::span<const Constraint> constraints() const { return rows_; }

  std::vector<int> binary_indices() const {
    std::vector<int> out;
    for (int j = 0; j < num_variables(); ++j)
      if (vars_[static_cast<std::size_t>(j)].is_binary) out.push_back(j);
    return out;
  }

  // Throws std::invalid_argument on malformed input.
  void validate() const {
    const int n = num_variables();
    for (int j = 0; j < n; ++j) {
      const auto& v = vars_[static_cast<std::size_t>(j)];
      if (std::isnan(v.lower) || std::isnan(v.upper) || !std::isfinite(v.cost))
        throw std::invalid_argument("variable " + std::to_string(j) + ": non-finite data");
      if (v.lower > v.upper)
        throw std::invalid_argument("variable " + std::to_string(j) + ": lower > upper");
      if (v.is_binary && (v.lower < 0.0 || v.upper > 1.0))
        throw std::invalid_argument("binary variable " + std::to_string(j) + ": bounds outside [0,1]");
    }
    for (int i = 0; i < num_constraints(); ++i) {
      const auto& r = rows_[static_cast<std::size_t>(i)];
      if (!std::isfinite(r.rhs))
        throw std::invalid_argument("constraint " + std::to_string(i) + ": non-finite rhs");
      for (const auto& t : r.terms) {
        if (t.var < 0 || t.var >= n)
          throw std::invalid_argument("constraint " + std::to_string(i) + ": bad variable index");
        if (!std::isfinite(t.coef))
          throw std::invalid_argument("constraint " + std::to_string(i) + ": non-finite coefficient");
      }
    }
  }

  double objective_value(std::span<const double> x) const {
    double z = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j) z += vars_[j].cost * x[j];
    return z;
  }

  double activity(int row, std::span<const double> x) const {
    double a = 0.0;
    for (const auto& t : rows_[static_cast<std::size_t>(row)].terms)
      a += t.coef * x[static_cast<std::size_t>(t.var)];
    return a;
  }

  // Largest violation over rows and bounds; 0 when feasible.
  double max_violation(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      worst = std::max(worst, vars_[j].lower - x[j]);
      worst = std::max(worst, x[j] - vars_[j].upper);
    }
    for (int i = 0; i < num_constraints(); ++i) {
      const auto& r = rows_[static_cast<std::size_t>(i)];
      const double a = activity(i, x);
      if (r.relation != Relation::kGreaterEqual) worst = std::max(worst, a - r.rhs);
      if (r.relation != Relation::kLessEqual) worst = std::max(worst, r.rhs - a);
    }
    return worst;
  }

  // Plain-text LP-style dump for cross-checking with external solvers.
  void write_lp(std::ostream& os) const {
    auto name_of = [&](int j) {
      const auto& nm = vars_[static_cast<std::size_t>(j)].name;
      return nm.empty() ? "x" + std::to_string(j) : nm;
    };
    auto write_expr = [&](const std::vector<Term>& terms) {
      bool first = true;
      for (const auto& t : terms) {
        if (t.coef == 0.0) continue;
        os << (t.coef < 0 ? (first ? "-" : " - ") : (first ? "" : " + "))
           << std::abs(t.coef) << ' ' << name_of(t.var);
        first = false;
      }
      if (first) os << '0';
    };
    os << std::setprecision(17) << "Minimize\n obj: ";
    std::vector<Term> obj;
    for (int j = 0; j < num_variables(); ++j)
      if (vars_[static_cast<std::size_t>(j)].cost != 0.0)
        obj.push_back({j, vars_[static_cast<std::size_t>(j)].cost});
    write_expr(obj);
    os << "\nSubject To\n";
    for (int i = 0; i < num_constraints(); ++i) {
      const auto& r = rows_[static_cast<std::size_t>(i)];
      os << ' ' << (r.name.empty() ? "c" + std::to_string(i) : r.name) << ": ";
      write_expr(r.terms);
      os << (r.relation == Relation::kLessEqual ? " <= " : r.relation == Relation::kEqual ? " = " : " >= ")
         << r.rhs << '\n';
    }
    os << "Bounds\n";
    for (int j = 0; j < num_variables(); ++j) {
      const auto& v = vars_[static_cast<std::size_t>(j)];
      if (v.is_binary) continue;
      os << ' ';
      if (std::isinf(v.lower)) os << "-inf"; else os << v.lower;
      os << " <= " << name_of(j) << " <= ";
      if (std::isinf(v.upper)) os << "+inf"; else os << v.upper;
      os << '\n';
    }
    os << "Binary\n";
    for (int j = 0; j < num_variables(); ++j)
      if (vars_[static_cast<std::size_t>(j)].is_binary) os << ' ' << name_of(j) << '\n';
    os << "End\n";
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
};

namespace detail {

// Each row i becomes  a_i x - s_i = 0  with the slack s_i carrying the row
// bounds, so the all-slack basis is always available and phase 1 minimizes the
// sum of bound infeasibilities of the basic variables. The dictionary is kept
// as  x_B = -T x_N  (the system is homogeneous), so basic values can be
// recomputed from T and the nonbasic values at any time.
class BoundedSimplex {
 public:
  enum class Result { kOptimal, kInfeasible, kUnbounded };

  BoundedSimplex(const LinearProgram& lp, std::span<const double> lower,
                 std::span<const double> upper, double feas_tol)
      : n_(static_cast<std::size_t>(lp.num_variables())),
        m_(static_cast<std::size_t>(lp.num_constraints())),
        feas_tol_(feas_tol) {
    const std::size_t total = n_ + m_;
    lo_.resize(total);
    hi_.resize(total);
    cost_.assign(total, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lower[j];
      hi_[j] = upper[j];
      cost_[j] = lp.variable(static_cast<int>(j)).cost;
    }
    T_.assign(m_ * n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = lp.constraint(static_cast<int>(i));
      for (const auto& t : row.terms) T_[i * n_ + static_cast<std::size_t>(t.var)] -= t.coef;
      const std::size_t s = n_ + i;
      lo_[s] = row.relation == Relation::kLessEqual ? -kInfinity : row.rhs;
      hi_[s] = row.relation == Relation::kGreaterEqual ? kInfinity : row.rhs;
    }
    basic_.resize(m_);
    nonbasic_.resize(n_);
    xN_.resize(n_);
    xB_.assign(m_, 0.0);
    d_.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) basic_[i] = n_ + i;
    for (std::size_t j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      xN_[j] = std::isfinite(lo_[j]) ? lo_[j] : (std::isfinite(hi_[j]) ? hi_[j] : 0.0);
    }
    recompute_basic_values();
  }

  Result solve() {
    for (int attempt = 0; attempt < 4; ++attempt) {
      if (!phase_one()) return Result::kInfeasible;
      const Result r = phase_two();
      if (r != Result::kOptimal) return r;
      recompute_basic_values();
      if (max_basic_infeasibility() <= feas_tol_) return Result::kOptimal;
    }
    throw SolverError("simplex failed to reach a numerically feasible optimum");
  }

  std::vector<double> structural_values() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j)
      if (nonbasic_[j] < n_) x[nonbasic_[j]] = xN_[j];
    for (std::size_t i = 0; i < m_; ++i)
      if (basic_[i] < n_) x[basic_[i]] = xB_[i];
    for (std::size_t j = 0; j < n_; ++j) x[j] = std::clamp(x[j], lo_[j], hi_[j]);
    return x;
  }

  long iterations() const { return iterations_; }

 private:
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kDualTol = 1e-9;
  static constexpr double kDropTol = 1e-13;
  static constexpr int kDegenerateSwitch = 50;

  double& t(std::size_t r, std::size_t c) { return T_[r * n_ + c]; }
  double t(std::size_t r, std::size_t c) const { return T_[r * n_ + c]; }

  void recompute_basic_values() {
    for (std::size_t i = 0; i < m_; ++i) {
      double v = 0.0;
      const double* row = &T_[i * n_];
      for (std::size_t j = 0; j < n_; ++j)
        if (row[j] != 0.0 && xN_[j] != 0.0) v -= row[j] * xN_[j];
      xB_[i] = v;
    }
  }

  double infeasibility(std::size_t i) const {
    const std::size_t v = basic_[i];
    if (xB_[i] < lo_[v]) return lo_[v] - xB_[i];
    if (xB_[i] > hi_[v]) return xB_[i] - hi_[v];
    return 0.0;
  }

  double max_basic_infeasibility() const {
    double w = 0.0;
    for (std::size_t i = 0; i < m_; ++i) w = std::max(w, infeasibility(i));
    return w;
  }

  // Entering column and direction (+1 increase, -1 decrease); -1 if none.
  std::pair<long, int> price(bool bland) const {
    long best = -1;
    int dir = 0;
    double best_score = 0.0;
    std::size_t best_var = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t v = nonbasic_[j];
      if (lo_[v] == hi_[v]) continue;
      const double dj = d_[j];
      int cand = 0;
      if (dj < -kDualTol && xN_[j] < hi_[v]) cand = 1;
      else if (dj > kDualTol && xN_[j] > lo_[v]) cand = -1;
      if (cand == 0) continue;
      if (bland) {
        if (v < best_var) {
          best_var = v;
          best = static_cast<long>(j);
          dir = cand;
        }
      } else if (std::abs(dj) > best_score) {
        best_score = std::abs(dj);
        best = static_cast<long>(j);
        dir = cand;
      }
    }
    return {best, dir};
  }

  struct Step {
    long row = -1;       // leaving row, -1 for a bound flip
    double theta = 0.0;  // step length
    bool to_upper = false;
    bool unbounded = false;
  };

  // Distance a basic variable may travel when decreasing (alpha > 0) or
  // increasing (alpha < 0), honouring phase-1 semantics for infeasible ones.
  bool row_limit(std::size_t i, double alpha, bool phase1, double& dist, bool& to_upper) const {
    const std::size_t v = basic_[i];
    const double x = xB_[i];
    if (alpha > 0) {  // decreasing
      if (phase1 && x > hi_[v] + feas_tol_) {
        dist = x - hi_[v];
        to_upper = true;
        return true;
      }
      if (phase1 && x < lo_[v] - feas_tol_) return false;
      if (!std::isfinite(lo_[v])) return false;
      dist = std::max(0.0, x - lo_[v]);
      to_upper = false;
      return true;
    }
    if (phase1 && x < lo_[v] - feas_tol_) {
      dist = lo_[v] - x;
      to_upper = false;
      return true;
    }
    if (phase1 && x > hi_[v] + feas_tol_) return false;
    if (!std::isfinite(hi_[v])) return false;
    dist = std::max(0.0, hi_[v] - x);
    to_upper = true;
    return true;
  }

  Step ratio_test(std::size_t q, int dir, bool phase1, bool bland) const {
    Step step;
    const std::size_t vq = nonbasic_[q];
    const double flip = hi_[vq] - lo_[vq];  // inf when either side is open
    if (bland) {
      double best = kInfinity;
      std::size_t best_var = std::numeric_limits<std::size_t>::max();
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = t(i, q) * dir;
        if (std::abs(alpha) <= kPivotTol) continue;
        double dist;
        bool up;
        if (!row_limit(i, alpha, phase1, dist, up)) continue;
        const double ratio = dist / std::abs(alpha);
        if (ratio < best - 1e-12 || (ratio <= best + 1e-12 && basic_[i] < best_var)) {
          best = ratio;
          best_var = basic_[i];
          step.row = static_cast<long>(i);
          step.to_upper = up;
        }
      }
      step.theta = best;
    } else {
      // Harris two-pass: bound the step with relaxed bounds, then take the
      // largest pivot among rows whose exact ratio fits under that bound.
      double relaxed = kInfinity;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = t(i, q) * dir;
        if (std::abs(alpha) <= kPivotTol) continue;
        double dist;
        bool up;
        if (!row_limit(i, alpha, phase1, dist, up)) continue;
        relaxed = std::min(relaxed, (dist + feas_tol_) / std::abs(alpha));
      }
      double best_alpha = 0.0;
      for (std::size_t i = 0; i < m_ && std::isfinite(relaxed); ++i) {
        const double alpha = t(i, q) * dir;
        if (std::abs(alpha) <= kPivotTol) continue;
        double dist;
        bool up;
        if (!row_limit(i, alpha, phase1, dist, up)) continue;
        const double ratio = dist / std::abs(alpha);
        if (ratio <= relaxed && std::abs(alpha) > best_alpha) {
          best_alpha = std::abs(alpha);
          step.row = static_cast<long>(i);
          step.theta = ratio;
          step.to_upper = up;
        }
      }
      if (step.row < 0) step.theta = kInfinity;
    }
    if (flip <= step.theta) {
      step.row = -1;
      step.theta = flip;
    }
    step.unbounded = !std::isfinite(step.theta);
    return step;
  }

  void apply_step(std::size_t q, int dir, const Step& step) {
    const double delta = dir * step.theta;
    if (delta != 0.0) {
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = t(i, q);
        if (a != 0.0) xB_[i] -= a * delta;
      }
    }
    const std::size_t vq = nonbasic_[q];
    if (step.row < 0) {
      xN_[q] = dir > 0 ? hi_[vq] : lo_[vq];
      return;
    }
    const auto p = static_cast<std::size_t>(step.row);
    const std::size_t leaving = basic_[p];
    const double entering_value = xN_[q] + delta;
    pivot(p, q);
    basic_[p] = vq;
    nonbasic_[q] = leaving;
    xB_[p] = entering_value;
    xN_[q] = step.to_upper ? hi_[leaving] : lo_[leaving];
  }

  void pivot(std::size_t p, std::size_t q) {
    const double piv = t(p, q);
    double* prow = &T_[p * n_];
    cols_.clear();
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == q || prow[j] == 0.0) continue;
      prow[j] /= piv;
      if (std::abs(prow[j]) < kDropTol) prow[j] = 0.0;
      else cols_.push_back(j);
    }
    prow[q] = 1.0 / piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == p) continue;
      double* row = &T_[i * n_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (const std::size_t j : cols_) {
        double v = row[j] - f * prow[j];
        row[j] = std::abs(v) < kDropTol ? 0.0 : v;
      }
      row[q] = -f / piv;
    }
    const double fd = d_[q];
    if (fd != 0.0) {
      for (const std::size_t j : cols_) d_[j] -= fd * prow[j];
      d_[q] = -fd / piv;
    }
  }

  // d_j = c_Nj - sum_i c_Bi T_ij for the given basic cost vector.
  template <class BasicCost>
  void compute_reduced_costs(bool include_nonbasic_cost, BasicCost&& basic_cost) {
    for (std::size_t j = 0; j < n_; ++j) d_[j] = include_nonbasic_cost ? cost_[nonbasic_[j]] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = basic_cost(i);
      if (cb == 0.0) continue;
      const double* row = &T_[i * n_];
      for (std::size_t j = 0; j < n_; ++j)
        if (row[j] != 0.0) d_[j] -= cb * row[j];
    }
  }

  bool iteration_budget_exceeded() const {
    return iterations_ > 200000 + 50 * static_cast<long>(n_ + m_);
  }

  bool phase_one() {
    int degenerate = 0;
    for (;;) {
      if (iterations_ % 256 == 0) recompute_basic_values();
      bool any = false;
      compute_reduced_costs(false, [&](std::size_t i) {
        const std::size_t v = basic_[i];
        if (xB_[i] < lo_[v] - feas_tol_) { any = true; return -1.0; }
        if (xB_[i] > hi_[v] + feas_tol_) { any = true; return 1.0; }
        return 0.0;
      });
      if (!any) return true;
      const bool bland = degenerate > kDegenerateSwitch;
      const auto [q, dir] = price(bland);
      if (q < 0) return false;
      const Step step = ratio_test(static_cast<std::size_t>(q), dir, true, bland);
      if (step.unbounded) throw SolverError("phase 1 ray without a blocking infeasibility");
      degenerate = step.theta <= 1e-12 ? degenerate + 1 : 0;
      apply_step(static_cast<std::size_t>(q), dir, step);
      ++iterations_;
      if (iteration_budget_exceeded()) throw SolverError("simplex iteration limit exceeded");
    }
  }

  Result phase_two() {
    compute_reduced_costs(true, [&](std::size_t i) { return cost_[basic_[i]]; });
    int degenerate = 0;
    for (;;) {
      if (iterations_ % 256 == 0) recompute_basic_values();
      const bool bland = degenerate > kDegenerateSwitch;
      const auto [q, dir] = price(bland);
      if (q < 0) return Result::kOptimal;
      const Step step = ratio_test(static_cast<std::size_t>(q), dir, false, bland);
      if (step.unbounded) return Result::kUnbounded;
      degenerate = step.theta <= 1e-12 ? degenerate + 1 : 0;
      apply_step(static_cast<std::size_t>(q), dir, step);
      ++iterations_;
      if (iteration_budget_exceeded()) throw SolverError("simplex iteration limit exceeded");
      if (iterations_ % 1024 == 0)
        compute_reduced_costs(true, [&](std::size_t i) { return cost_[basic_[i]]; });
    }
  }

  std::size_t n_;
  std::size_t m_;
  double feas_tol_;
  std::vector<double> lo_, hi_, cost_;
  std::vector<double> T_;
  std::vector<std::size_t> basic_, nonbasic_;
  std::vector<double> xB_, xN_, d_;
  std::vector<std::size_t> cols_;
  long iterations_ = 0;
};

inline LpSolution solve_with_bounds(const LinearProgram& lp, std::span<const double> lower,
                                    std::span<const double> upper, const SolverOptions& opts) {
  LpSolution sol;
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (lower[j] > upper[j]) {
      sol.status = SolveStatus::kInfeasible;
      return sol;
    }
  }
  BoundedSimplex simplex(lp, lower, upper, opts.feasibility_tol);
  const auto result = simplex.solve();
  sol.simplex_iterations = simplex.iterations();
  if (result == BoundedSimplex::Result::kInfeasible) {
    sol.status = SolveStatus::kInfeasible;
    return sol;
  }
  if (result == BoundedSimplex::Result::kUnbounded) {
    sol.status = SolveStatus::kUnbounded;
    return sol;
  }
  sol.status = SolveStatus::kOptimal;
  sol.x = simplex.structural_values();
  sol.objective = lp.objective_value(sol.x);
  return sol;
}

}  // namespace detail

// Continuous relaxation: binary flags are ignored, bounds are kept.
inline LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& opts = {}) {
  lp.validate();
  opts.validate();
  std::vector<double> lo, hi;
  for (const auto& v : lp.variables()) {
    lo.push_back(v.lower);
    hi.push_back(v.upper);
  }
  return detail::solve_with_bounds(lp, lo, hi, opts);
}

inline LpSolution solve_milp(const LinearProgram& lp, const SolverOptions& opts = {}) {
  lp.validate();
  opts.validate();
  const std::vector<int> binaries = lp.binary_indices();
  std::vector<double> base_lo, base_hi;
  for (const auto& v : lp.variables()) {
    base_lo.push_back(v.lower);
    base_hi.push_back(v.upper);
  }

  struct Node {
    double bound;
    long id;
    std::vector<signed char> fixing;  // per binary: -1 free, 0, 1
    std::vector<double> x;            // relaxation optimum at this node
  };
  struct Worse {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };

  LpSolution best;
  best.status = SolveStatus::kInfeasible;
  double incumbent = kInfinity;
  long nodes = 0;
  long iterations = 0;

  auto node_bounds = [&](const std::vector<signed char>& fixing, std::vector<double>& lo,
                         std::vector<double>& hi) {
    lo = base_lo;
    hi = base_hi;
    for (std::size_t k = 0; k < binaries.size(); ++k) {
      if (fixing[k] < 0) continue;
      const auto j = static_cast<std::size_t>(binaries[k]);
      lo[j] = std::max(lo[j], static_cast<double>(fixing[k]));
      hi[j] = std::min(hi[j], static_cast<double>(fixing[k]));
    }
  };
  auto solve_node = [&](const std::vector<signed char>& fixing) {
    std::vector<double> lo, hi;
    node_bounds(fixing, lo, hi);
    auto sol = detail::solve_with_bounds(lp, lo, hi, opts);
    iterations += sol.simplex_iterations;
    ++nodes;
    return sol;
  };
  auto prune_threshold = [&]() {
    return incumbent - std::max(opts.relative_gap * std::abs(incumbent), 1e-9);
  };
  auto most_fractional = [&](const std::vector<double>& x) {
    long pick = -1;
    double best_frac = opts.integrality_tol;
    for (std::size_t k = 0; k < binaries.size(); ++k) {
      const double v = x[static_cast<std::size_t>(binaries[k])];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac) {
        best_frac = frac;
        pick = static_cast<long>(k);
      }
    }
    return pick;
  };
  auto offer = [&](const std::vector<double>& x) {
    const double z = lp.objective_value(x);
    if (z < incumbent) {
      incumbent = z;
      best.x = x;
      best.objective = z;
      best.status = SolveStatus::kOptimal;
    }
  };
  // Rows touched by each variable, for rounding moves.
  std::vector<std::vector<Term>> column_rows(static_cast<std::size_t>(lp.num_variables()));
  for (int i = 0; i < lp.num_constraints(); ++i)
    for (const auto& t : lp.constraint(i).terms) column_rows[static_cast<std::size_t>(t.var)].push_back({i, t.coef});
  auto row_holds = [&](int i, double act) {
    const auto& c = lp.constraint(i);
    switch (c.relation) {
      case Relation::kLessEqual: return act <= c.rhs + opts.feasibility_tol;
      case Relation::kGreaterEqual: return act >= c.rhs - opts.feasibility_tol;
      case Relation::kEqual: return std::abs(act - c.rhs) <= opts.feasibility_tol;
    }
    return false;
  };
  // Move each non-integral binary to whichever of its integer neighbours keeps
  // every row it touches satisfied, nearest first. Binaries with no safe move
  // are retried after the others have moved.
  auto shift_rounding = [&](const std::vector<double>& x) {
    std::vector<double> r = x;
    std::vector<double> act(static_cast<std::size_t>(lp.num_constraints()));
    for (int i = 0; i < lp.num_constraints(); ++i) act[static_cast<std::size_t>(i)] = lp.activity(i, r);
    std::vector<std::size_t> pending;
    for (const int j : binaries)
      if (r[static_cast<std::size_t>(j)] != std::round(r[static_cast<std::size_t>(j)]))
        pending.push_back(static_cast<std::size_t>(j));
    bool progress = true;
    while (!pending.empty() && progress) {
      progress = false;
      std::vector<std::size_t> deferred;
      for (const std::size_t j : pending) {
        const double near = std::round(r[j]);
        bool moved = false;
        for (const double target : {near, 1.0 - near}) {
          const double delta = target - r[j];
          bool ok = true;
          for (const auto& [row, a] : column_rows[j])
            if (!row_holds(row, act[static_cast<std::size_t>(row)] + a * delta)) {
              ok = false;
              break;
            }
          if (!ok) continue;
          for (const auto& [row, a] : column_rows[j]) act[static_cast<std::size_t>(row)] += a * delta;
          r[j] = target;
          moved = progress = true;
          break;
        }
        if (!moved) deferred.push_back(j);
      }
      pending = std::move(deferred);
    }
    if (pending.empty() && lp.max_violation(r) <= opts.feasibility_tol) {
      offer(r);
      return true;
    }
    return false;
  };
  // Round binaries in place and keep the point if it stays feasible; failing
  // that, fix the rounded binaries and re-solve the continuous part.
  auto try_rounding = [&](const std::vector<double>& x, bool resolve) {
    if (shift_rounding(x)) return;
    for (const double cut : {opts.integrality_tol, 0.5}) {
      std::vector<double> rounded = x;
      std::vector<signed char> fixing(binaries.size());
      for (std::size_t k = 0; k < binaries.size(); ++k) {
        const auto j = static_cast<std::size_t>(binaries[k]);
        rounded[j] = x[j] > cut ? 1.0 : 0.0;
        fixing[k] = static_cast<signed char>(rounded[j]);
      }
      if (lp.max_violation(rounded) <= opts.feasibility_tol) {
        offer(rounded);
        return;
      }
      if (resolve && nodes < opts.max_nodes) {
        auto sol = solve_node(fixing);
        if (sol.status == SolveStatus::kOptimal) {
          offer(sol.x);
          return;
        }
      }
    }
  };

  std::priority_queue<Node, std::vector<Node>, Worse> open;
  long next_id = 0;
  std::vector<signed char> root_fixing(binaries.size(), -1);
  auto root = solve_node(root_fixing);
  if (root.status == SolveStatus::kUnbounded) {
    root.nodes_explored = nodes;
    return root;
  }
  if (root.status == SolveStatus::kOptimal) {
    const long k = most_fractional(root.x);
    if (k < 0) {
      offer(root.x);
    } else {
      try_rounding(root.x, true);
      if (root.objective < prune_threshold())
        open.push({root.objective, next_id++, root_fixing, std::move(root.x)});
    }
  }

  bool limit_hit = false;
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= prune_threshold()) continue;
    const long k = most_fractional(node.x);
    for (const signed char value : {0, 1}) {
      if (nodes >= opts.max_nodes) {
        limit_hit = true;
        break;
      }
      auto fixing = node.fixing;
      fixing[static_cast<std::size_t>(k)] = value;
      auto child = solve_node(fixing);
      if (child.status != SolveStatus::kOptimal) continue;
      if (child.objective >= prune_threshold()) continue;
      if (most_fractional(child.x) < 0) {
        offer(child.x);
      } else {
        if (!shift_rounding(child.x) && nodes % 16 == 0) try_rounding(child.x, false);
        open.push({child.objective, next_id++, std::move(fixing), std::move(child.x)});
      }
    }
    if (limit_hit) break;
  }

  best.nodes_explored = nodes;
  best.simplex_iterations = iterations;
  if (limit_hit && !open.empty()) best.status = SolveStatus::kNodeLimit;
  return best;
}

}  // namespace bems
