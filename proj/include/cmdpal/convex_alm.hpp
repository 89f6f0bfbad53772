#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace cmdpal {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// min f(x) subject to A x = b, x in X (compact convex, given by a projector).
struct ConvexProblem {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
  MatrixXd constraint_A;
  VectorXd constraint_b;
  std::function<VectorXd(const VectorXd&)> project;
  double diameter = 0.0;    // bound on diam(X)
  double smoothness = 0.0;  // Lipschitz constant of grad f
};

/// Constants of the outer-loop rate bounds.
struct RateConstants {
  double B = 0.0;
  double kappa = 0.0;
  double omega = 3.0;
  double C = 0.0;
  double sigma = 0.0;
  double beta = 0.0;

  // B = ||lambda*|| + sqrt(sigma beta pi^2 / 3); kappa = beta / (8 B^2);
  // C = (4/kappa)(1 + sqrt(2 omega sigma kappa (omega sigma kappa + 1)))
  //     + 4 max{delta_1, 4/kappa}.
  static RateConstants compute(double lambda_star_norm, double sigma, double beta,
                               double delta_1);
};

/// Projected gradient descent on L^beta(x, lambda) = f + <lambda, Ax-b>
/// + (beta/2)||Ax-b||^2 until the gradient-mapping certificate
/// ||g|| * diameter <= eps. Throws when the iteration cap is hit, carrying
/// the best achieved certificate value in the message.
VectorXd al_subsolve(const ConvexProblem& problem, const VectorXd& lambda,
                     double beta, double eps, const VectorXd& warm,
                     long max_iters = 20'000'000, long* iters_used = nullptr);

struct ConvexAlmTraceRow {
  int iter = 0;
  double eps_t = 0.0;
  VectorXd lambda;      // lambda_t, before the update of this round
  double f_value = 0.0;
  double cons_norm = 0.0;  // ||A x_{t+1} - b||
  long subsolve_iters = 0;
};

struct ConvexAlmResult {
  VectorXd x;
  std::vector<ConvexAlmTraceRow> trace;
  std::string trace_csv(const RateConstants* constants = nullptr,
                        double f_star = 0.0) const;
};

/// lambda_1 = 0; T rounds of eps_t = sigma/t^2 subsolve then
/// lambda <- lambda + (beta/2)(A x - b).
ConvexAlmResult run_convex_alm(const ConvexProblem& problem, int T, double beta,
                               double sigma);

/// C such that any sequence with delta_{t+1} <= delta_t - kappa delta_t^2
/// + omega sigma / t^2 stays <= C/t.
double delta_recursion_bound(double delta_1, double kappa, double omega, double sigma);

/// max ||grad d(l) - grad d(l')|| / ||l - l'|| over the given pairs, with
/// grad d(l) = A x(l) - b from high-accuracy subsolves. Bounded by 1/beta.
double dual_smoothness_probe(const ConvexProblem& problem, double beta,
                             const std::vector<std::pair<VectorXd, VectorXd>>& pairs,
                             double subsolve_eps = 1e-10);

}  // namespace cmdpal
