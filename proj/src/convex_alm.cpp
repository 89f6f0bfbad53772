#include "cmdpal/convex_alm.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cmdpal {

RateConstants RateConstants::compute(double lambda_star_norm, double sigma, double beta,
                                     double delta_1) {
  RateConstants k;
  k.B = lambda_star_norm +
        std::sqrt(sigma * beta * std::numbers::pi * std::numbers::pi / 3.0);
  k.kappa = beta / (8.0 * k.B * k.B);
  k.omega = 3.0;
  k.C = delta_recursion_bound(delta_1, k.kappa, k.omega, sigma);
  k.sigma = sigma;
  k.beta = beta;
  return k;
}

double delta_recursion_bound(double delta_1, double kappa, double omega, double sigma) {
  if (kappa <= 0.0) throw std::invalid_argument("delta_recursion_bound: kappa must be positive");
  const double p = omega * sigma * kappa;
  return (4.0 / kappa) * (1.0 + std::sqrt(2.0 * p * (p + 1.0))) +
         4.0 * std::max(delta_1, 4.0 / kappa);
}

namespace {

double augmented_value(const ConvexProblem& problem, const VectorXd& lambda, double beta,
                       const VectorXd& x) {
  const VectorXd residual = problem.constraint_A * x - problem.constraint_b;
  return problem.value(x) + lambda.dot(residual) + 0.5 * beta * residual.squaredNorm();
}

VectorXd augmented_gradient(const ConvexProblem& problem, const VectorXd& lambda,
                            double beta, const VectorXd& x) {
  const VectorXd residual = problem.constraint_A * x - problem.constraint_b;
  return problem.gradient(x) + problem.constraint_A.transpose() * (lambda + beta * residual);
}

}  // namespace

VectorXd al_subsolve(const ConvexProblem& problem, const VectorXd& lambda, double beta,
                     double eps, const VectorXd& warm, long max_iters, long* iters_used) {
  if (eps <= 0.0) throw std::invalid_argument("al_subsolve: eps must be positive");
  if (problem.diameter <= 0.0)
    throw std::invalid_argument("al_subsolve: need a positive diameter bound");

  // ||A||_F bounds the spectral norm, so this over-estimates the curvature
  // of the penalty term; only the step size gets smaller.
  const double smooth = problem.smoothness + beta * problem.constraint_A.squaredNorm();
  const double step = 1.0 / smooth;

  VectorXd x = problem.project(warm);
  double best_cert = std::numeric_limits<double>::infinity();
  for (long k = 0; k < max_iters; ++k) {
    const VectorXd grad = augmented_gradient(problem, lambda, beta, x);
    const VectorXd next = problem.project(x - step * grad);
    // Gradient-mapping certificate: F(x+) - F* <= ||g|| * diam for
    // smooth convex F, with g = L (x - x+).
    const double cert = smooth * (x - next).norm() * problem.diameter;
    x = next;
    best_cert = std::min(best_cert, cert);
    if (cert <= eps) {
      if (iters_used) *iters_used = k + 1;
      return x;
    }
  }
  std::ostringstream msg;
  msg << "al_subsolve: iteration cap " << max_iters << " reached, best certified gap "
      << best_cert << " > " << eps;
  throw std::runtime_error(msg.str());
}

ConvexAlmResult run_convex_alm(const ConvexProblem& problem, int T, double beta,
                               double sigma) {
  if (T < 1) throw std::invalid_argument("run_convex_alm: need at least one iteration");
  const int m = static_cast<int>(problem.constraint_A.rows());
  VectorXd lambda = VectorXd::Zero(m);
  VectorXd x = problem.project(VectorXd::Zero(problem.constraint_A.cols()));

  ConvexAlmResult result;
  for (int t = 1; t <= T; ++t) {
    const double eps_t = sigma / (static_cast<double>(t) * t);
    long iters = 0;
    x = al_subsolve(problem, lambda, beta, eps_t, x, 20'000'000, &iters);
    const VectorXd residual = problem.constraint_A * x - problem.constraint_b;

    ConvexAlmTraceRow row;
    row.iter = t;
    row.eps_t = eps_t;
    row.lambda = lambda;
    row.f_value = problem.value(x);
    row.cons_norm = residual.norm();
    row.subsolve_iters = iters;
    result.trace.push_back(std::move(row));

    lambda += 0.5 * beta * residual;
  }
  result.x = x;
  return result;
}

std::string ConvexAlmResult::trace_csv(const RateConstants* constants, double f_star) const {
  std::ostringstream out;
  out.precision(17);
  const int m = trace.empty() ? 0 : static_cast<int>(trace.front().lambda.size());
  out << "iter,eps_t";
  for (int i = 0; i < m; ++i) out << ",lambda_" << i;
  out << ",f_value,f_gap,cons_norm,subsolve_iters,d_gap_bound,cons_bound\n";
  for (const auto& row : trace) {
    out << row.iter << ',' << row.eps_t;
    for (int i = 0; i < m; ++i) out << ',' << row.lambda(i);
    out << ',' << row.f_value << ',' << row.f_value - f_star << ',' << row.cons_norm << ','
        << row.subsolve_iters;
    if (constants) {
      const double t = row.iter;
      out << ',' << constants->C / t << ','
          << (2.0 / std::sqrt(constants->beta)) *
                 (std::sqrt(constants->C / t) + std::sqrt(2.0 * constants->sigma) / t);
    } else {
      out << ",,";
    }
    out << '\n';
  }
  return out.str();
}

double dual_smoothness_probe(const ConvexProblem& problem, double beta,
                             const std::vector<std::pair<VectorXd, VectorXd>>& pairs,
                             double subsolve_eps) {
  const VectorXd start = problem.project(VectorXd::Zero(problem.constraint_A.cols()));
  double worst = 0.0;
  for (const auto& [l1, l2] : pairs) {
    const double gap = (l1 - l2).norm();
    if (gap == 0.0) continue;
    const VectorXd x1 = al_subsolve(problem, l1, beta, subsolve_eps, start);
    const VectorXd x2 = al_subsolve(problem, l2, beta, subsolve_eps, start);
    const VectorXd g1 = problem.constraint_A * x1 - problem.constraint_b;
    const VectorXd g2 = problem.constraint_A * x2 - problem.constraint_b;
    worst = std::max(worst, (g1 - g2).norm() / gap);
  }
  return worst;
}

}  // namespace cmdpal
