#include "cmdpal/lp.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cmdpal {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;

// One simplex phase with Bland's rule: maximize c.x over the current basis,
// entering columns restricted to [0, n_enterable).
void simplex_phase(const MatrixXd& A, const VectorXd& b, const VectorXd& c,
                   std::vector<int>& basis, int n_enterable) {
  const int m = static_cast<int>(A.rows());
  const long max_pivots = 50000L + 200L * static_cast<long>(A.cols()) * m;

  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots) throw std::runtime_error("simplex: pivot limit exceeded");

    MatrixXd B(m, m);
    VectorXd c_b(m);
    for (int i = 0; i < m; ++i) {
      B.col(i) = A.col(basis[i]);
      c_b(i) = c(basis[i]);
    }
    const auto lu = B.partialPivLu();
    const VectorXd x_b = lu.solve(b);
    const VectorXd y = B.transpose().partialPivLu().solve(c_b);

    int entering = -1;
    for (int j = 0; j < n_enterable; ++j) {
      if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
      if (c(j) - y.dot(A.col(j)) > kCostTol) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return;

    const VectorXd w = lu.solve(A.col(entering));
    int leaving = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (w(i) <= kPivotTol) continue;
      const double ratio = std::max(x_b(i), 0.0) / w(i);
      if (leaving < 0 || ratio < best_ratio - kPivotTol ||
          (ratio < best_ratio + kPivotTol && basis[i] < basis[leaving])) {
        leaving = i;
        best_ratio = ratio;
      }
    }
    if (leaving < 0) throw std::runtime_error("simplex: unbounded direction");
    basis[leaving] = entering;
  }
}

}  // namespace

LpSolution solve_lp(const StandardLp& lp) {
  const int m = static_cast<int>(lp.eq_A.rows());
  const int n = static_cast<int>(lp.eq_A.cols());
  if (lp.eq_b.size() != m || lp.objective.size() != n)
    throw std::invalid_argument("solve_lp: inconsistent dimensions");

  MatrixXd A(m, n + m);
  A.leftCols(n) = lp.eq_A;
  A.rightCols(m) = MatrixXd::Identity(m, m);
  VectorXd b = lp.eq_b;
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0.0) {
      A.row(i) = -A.row(i);
      b(i) = -b(i);
    }
  }

  // Phase I: drive the artificial variables to zero.
  std::vector<int> basis(m);
  std::iota(basis.begin(), basis.end(), n);
  VectorXd c1 = VectorXd::Zero(n + m);
  c1.tail(m).setConstant(-1.0);
  simplex_phase(A, b, c1, basis, n);

  {
    MatrixXd B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = A.col(basis[i]);
    const VectorXd x_b = B.partialPivLu().solve(b);
    for (int i = 0; i < m; ++i) {
      if (basis[i] >= n && x_b(i) > 1e-7)
        throw std::runtime_error("solve_lp: infeasible, row " + std::to_string(basis[i] - n) +
                                 " cannot be satisfied");
    }
  }

  // Swap any zero-level artificial for a structural column where possible;
  // rows where no pivot exists are redundant and keep their artificial.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    MatrixXd B(m, m);
    for (int k = 0; k < m; ++k) B.col(k) = A.col(basis[k]);
    const auto lu = B.partialPivLu();
    for (int j = 0; j < n; ++j) {
      if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
      const VectorXd w = lu.solve(A.col(j));
      if (std::abs(w(i)) > 1e-7) {
        basis[i] = j;
        break;
      }
    }
  }

  // Phase II on the real objective; artificials may not re-enter.
  VectorXd c2 = VectorXd::Zero(n + m);
  c2.head(n) = lp.objective;
  simplex_phase(A, b, c2, basis, n);

  MatrixXd B(m, m);
  VectorXd c_b(m);
  for (int i = 0; i < m; ++i) {
    B.col(i) = A.col(basis[i]);
    c_b(i) = c2(basis[i]);
  }
  const auto lu = B.partialPivLu();
  const VectorXd x_b = lu.solve(b);

  LpSolution out;
  out.x = VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) out.x(basis[i]) = std::max(x_b(i), 0.0);
  out.value = lp.objective.dot(out.x);
  VectorXd y = B.transpose().partialPivLu().solve(c_b);
  out.row_duals.resize(m);
  for (int i = 0; i < m; ++i)
    out.row_duals(i) = (lp.eq_b(i) < 0.0) ? -y(i) : y(i);
  return out;
}

StandardLp build_occupancy_lp(const TabularCmdp& cmdp) {
  const int S = cmdp.n_states, A = cmdp.n_actions, m = cmdp.num_constraints();
  const int n_mu = S * A;

  StandardLp lp;
  lp.objective = VectorXd::Zero(n_mu + m);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) lp.objective(s * A + a) = cmdp.reward(s, a);

  lp.eq_A = MatrixXd::Zero(S + m, n_mu + m);
  lp.eq_b = VectorXd::Zero(S + m);
  // Flow rows: sum_a mu(s',a) - gamma sum_{s,a} P(s'|s,a) mu(s,a) = rho(s').
  for (int sp = 0; sp < S; ++sp) {
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) {
        double coeff = -cmdp.discount * cmdp.transition(s * A + a, sp);
        if (s == sp) coeff += 1.0;
        lp.eq_A(sp, s * A + a) = coeff;
      }
    lp.eq_b(sp) = cmdp.initial_dist(sp);
  }
  // Constraint rows: <mu, c_i> - z_i = b_i.
  for (int i = 0; i < m; ++i) {
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        lp.eq_A(S + i, s * A + a) = cmdp.constraint_rewards[i](s, a);
    lp.eq_A(S + i, n_mu + i) = -1.0;
    lp.eq_b(S + i) = cmdp.thresholds(i);
  }
  return lp;
}

CmdpLpResult solve_occupancy_lp(const TabularCmdp& cmdp) {
  const StandardLp lp = build_occupancy_lp(cmdp);
  const LpSolution sol = solve_lp(lp);
  const int S = cmdp.n_states, A = cmdp.n_actions, m = cmdp.num_constraints();

  CmdpLpResult out;
  out.mu_star.mu.resize(S, A);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) out.mu_star.mu(s, a) = sol.x(s * A + a);
  out.v_star = sol.value;
  out.flow_duals = sol.row_duals.head(S);
  // The slack column z_i >= 0 forces the raw dual of a constraint row to be
  // <= 0 at optimality; the multiplier of <mu, c_i> >= b_i is its negation.
  out.lambda_star = (-sol.row_duals.tail(m)).cwiseMax(0.0);
  return out;
}

double slater_margin(const TabularCmdp& cmdp, int constraint_index) {
  if (constraint_index < 0 || constraint_index >= cmdp.num_constraints())
    throw std::invalid_argument("slater_margin: constraint index out of range");
  const MatrixXd& c = cmdp.constraint_rewards[constraint_index];
  const int S = cmdp.n_states, A = cmdp.n_actions;

  VectorXd v = VectorXd::Zero(S);
  for (int sweep = 0; sweep < 1000000; ++sweep) {
    VectorXd next(S);
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a)
        best = std::max(best, c(s, a) + cmdp.discount * cmdp.transition.row(s * A + a).dot(v));
      next(s) = best;
    }
    const double delta = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (delta < 1e-10) break;
  }

  TabularPolicy greedy;
  greedy.probs = MatrixXd::Zero(S, A);
  for (int s = 0; s < S; ++s) {
    int best_a = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A; ++a) {
      const double q = c(s, a) + cmdp.discount * cmdp.transition.row(s * A + a).dot(v);
      if (q > best) {
        best = q;
        best_a = a;
      }
    }
    greedy.probs(s, best_a) = 1.0;
  }
  const double v_max = policy_evaluate(cmdp, greedy, c).scalar_value;
  return v_max - cmdp.thresholds(constraint_index);
}

std::string StandardLp::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "maximize";
  for (int j = 0; j < objective.size(); ++j) out << ' ' << objective(j);
  out << "\nsubject to (Ax = b, x >= 0)\n";
  for (int i = 0; i < eq_A.rows(); ++i) {
    out << "row " << i << ":";
    for (int j = 0; j < eq_A.cols(); ++j) out << ' ' << eq_A(i, j);
    out << " = " << eq_b(i) << '\n';
  }
  return out.str();
}

}  // namespace cmdpal
