#include "vrcd/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vrcd::theory {

Matrix expected_sketch_quadratic(const Matrix& projector, const BlockSampler& sampler) {
  const int d = sampler.dimension();
  if (projector.rows() != d || projector.cols() != d) {
    throw std::invalid_argument("expected_sketch_quadratic: dimension mismatch");
  }
  const Vector& p = sampler.marginals();
  Matrix expectation = Matrix::Zero(d, d);
  for (const auto& outcome : sampler.enumerate_outcomes()) {
    for (int i : outcome.coords) {
      for (int j : outcome.coords) {
        expectation(i, j) += outcome.prob * projector(i, j) / (p[i] * p[j]);
      }
    }
  }
  return expectation;
}

double compute_L(const Matrix& m, const Matrix& projector) {
  require_symmetric(m, "compute_L");
  require_symmetric(projector, "compute_L");
  Matrix root = psd_sqrt(m);
  return largest_eigenvalue(symmetrize(root * projector * root));
}

double compute_calL(const Matrix& m, const Matrix& projector, const BlockSampler& sampler) {
  require_symmetric(m, "compute_calL");
  require_symmetric(projector, "compute_calL");
  Matrix root = psd_sqrt(m);
  Matrix expectation = expected_sketch_quadratic(projector, sampler);
  return largest_eigenvalue(symmetrize(root * expectation * root));
}

EsoReport check_eso(const Matrix& m, const Matrix& projector, const BlockSampler& sampler,
                    const Vector& v) {
  const int d = sampler.dimension();
  if (v.size() != d || m.rows() != d) throw std::invalid_argument("check_eso: dimension mismatch");
  Matrix root = psd_sqrt(m);
  Matrix lhs = symmetrize(root * expected_sketch_quadratic(projector, sampler) * root);
  Matrix bound = Matrix::Zero(d, d);
  const Vector& p = sampler.marginals();
  for (int i = 0; i < d; ++i) bound(i, i) = v[i] / p[i];
  EsoReport report;
  report.slack = smallest_eigenvalue(symmetrize(bound - lhs));
  report.ok = report.slack >= -1e-10;
  return report;
}

StepsizeResult sega_stepsize(const Vector& p, const Vector& v, double mu) {
  if (mu <= 0) throw std::invalid_argument("sega_stepsize: linear-rate theory needs mu > 0");
  if (p.size() != v.size()) throw std::invalid_argument("sega_stepsize: size mismatch");
  StepsizeResult out;
  out.alpha = std::numeric_limits<double>::infinity();
  out.complexity = 0;
  for (int i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0) || v[i] < 0) throw std::invalid_argument("sega_stepsize: need p > 0, v >= 0");
    out.alpha = std::min(out.alpha, p[i] / (4 * v[i] + mu));
    out.complexity = std::max(out.complexity, (4 * v[i] + mu) / (p[i] * mu));
  }
  return out;
}

StepsizeResult svrcd_stepsize(const Vector& p, const Vector& v, double mu, double rho) {
  if (mu <= 0) throw std::invalid_argument("svrcd_stepsize: linear-rate theory needs mu > 0");
  if (!(rho > 0) || !(rho < 1)) throw std::invalid_argument("svrcd_stepsize: rho must lie in (0,1)");
  if (p.size() != v.size()) throw std::invalid_argument("svrcd_stepsize: size mismatch");
  double worst_ratio = 0;
  for (int i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0) || v[i] < 0) throw std::invalid_argument("svrcd_stepsize: need p > 0, v >= 0");
    worst_ratio = std::max(worst_ratio, v[i] / p[i]);
  }
  StepsizeResult out;
  out.alpha = 1.0 / (4 * worst_ratio + mu / rho);
  out.complexity = (4 * worst_ratio + mu / rho) / mu;
  return out;
}

FiniteSumStepsizes finite_sum_stepsizes(const Vector& p_hat, const Vector& v_hat, double mu_hat,
                                        int n, double rho) {
  if (mu_hat <= 0) throw std::invalid_argument("finite_sum_stepsizes: need mu > 0");
  if (!(rho > 0) || !(rho < 1)) throw std::invalid_argument("finite_sum_stepsizes: rho must lie in (0,1)");
  if (p_hat.size() != n || v_hat.size() != n) {
    throw std::invalid_argument("finite_sum_stepsizes: size mismatch");
  }
  FiniteSumStepsizes out;
  out.saga.alpha = std::numeric_limits<double>::infinity();
  out.lsvrg.alpha = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    if (!(p_hat[j] > 0) || v_hat[j] < 0) {
      throw std::invalid_argument("finite_sum_stepsizes: need p > 0, v >= 0");
    }
    out.saga.alpha = std::min(out.saga.alpha, n * p_hat[j] / (4 * v_hat[j] + n * mu_hat));
    out.saga.complexity =
        std::max(out.saga.complexity, (4 * v_hat[j] + n * mu_hat) / (n * mu_hat * p_hat[j]));
    out.lsvrg.alpha =
        std::min(out.lsvrg.alpha, n / (4 * v_hat[j] / p_hat[j] + n * mu_hat / rho));
    out.lsvrg.complexity =
        std::max(out.lsvrg.complexity, 4 * v_hat[j] / (n * mu_hat * p_hat[j]) + 1.0 / rho);
  }
  return out;
}

namespace {

AsvrcdParams accelerated_params_unchecked(double big_l, double lp, double mu, double rho) {
  AsvrcdParams out;
  out.rho = rho;
  out.eta = 0.25 / std::max(lp, big_l);
  out.theta2 = lp / (2 * std::max(big_l, lp));
  out.theta1 = std::min(0.5, std::sqrt(out.eta * mu * std::max(0.5, out.theta2 / rho)));
  out.gamma = 1.0 / std::max(2 * mu, 4 * out.theta1 / out.eta);
  out.beta = 1.0 - out.gamma * mu;
  out.complexity = 1.0 / rho + std::sqrt(big_l / mu) + std::sqrt(lp / (rho * mu));
  out.contraction =
      0.25 * std::min(rho, std::sqrt(mu / (2 * std::max(big_l, lp / rho))));
  return out;
}

}  // namespace

AsvrcdParams asvrcd_params(double big_l, double expected_smoothness, double mu, double rho) {
  if (!(big_l > 0) || !(expected_smoothness > 0) || !(mu > 0)) {
    throw std::invalid_argument("asvrcd_params: constants must be positive");
  }
  if (!(rho > 0) || !(rho < 1)) throw std::invalid_argument("asvrcd_params: rho must lie in (0,1)");
  AsvrcdParams out = accelerated_params_unchecked(big_l, expected_smoothness, mu, rho);
  // theta1 <= 1/2 and theta2 <= 1/2 by construction; guard regardless.
  if (out.theta1 + out.theta2 > 1.0 + 1e-12) {
    throw std::logic_error("asvrcd_params: theta1 + theta2 exceeds 1");
  }
  if (!(out.theta1 > 0) || !(out.theta2 > 0) || !(out.beta > 0) || !(out.beta < 1)) {
    throw std::logic_error("asvrcd_params: parameters left their ranges");
  }
  return out;
}

bool check_expected_smoothness(const CompositeProblem& problem, const BlockSampler& sampler,
                               double expected_smoothness,
                               const std::vector<std::pair<Vector, Vector>>& trial_pairs,
                               double tol, double* worst_slack) {
  const Vector& p = sampler.marginals();
  const auto outcomes = sampler.enumerate_outcomes();
  const Matrix& projector = problem.projector;
  double worst = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (const auto& [x, w] : trial_pairs) {
    const Vector grad_x = problem.f_gradient(x);
    const Vector grad_w = problem.f_gradient(w);
    double lhs = 0;
    for (const auto& outcome : outcomes) {
      Vector g = grad_w;
      for (int i : outcome.coords) g[i] += (grad_x[i] - grad_w[i]) / p[i];
      const Vector diff = g - grad_x;
      lhs += outcome.prob * diff.dot(projector * diff);
    }
    const double breg =
        bregman_distance(problem.f_value, problem.f_gradient, w, x);
    const double slack = 2 * expected_smoothness * breg + tol - lhs;
    worst = std::min(worst, slack);
    if (slack < 0) ok = false;
  }
  if (worst_slack) *worst_slack = worst;
  return ok;
}

Vector default_v(double calL, const Vector& p) { return calL * p; }

double default_rho(const BlockSampler& sampler) {
  return sampler.expected_size() / sampler.dimension();
}

double simplified_rate_rho(const BlockSampler& sampler, double mu, double calL) {
  if (!(mu > 0) || !(calL > 0)) throw std::invalid_argument("simplified_rate_rho: need mu, calL > 0");
  const double floor = std::sqrt(mu / calL);
  return std::min(0.5, std::max(default_rho(sampler), floor));
}

TheoryParams derive(const Matrix& m, const Matrix& projector, const BlockSampler& sampler,
                    double mu, double rho) {
  TheoryParams out;
  out.big_l = compute_L(m, projector);
  out.calL = compute_calL(m, projector, sampler);
  if (out.big_l > out.calL + 1e-9 * std::max(1.0, out.calL)) {
    throw std::logic_error("derive: L exceeded calL, which the theory forbids");
  }
  out.expected_smoothness = out.calL;
  out.v = default_v(out.calL, sampler.marginals());
  out.mu = mu;
  out.rho = rho;
  out.sega = sega_stepsize(sampler.marginals(), out.v, mu);
  out.svrcd = svrcd_stepsize(sampler.marginals(), out.v, mu, rho);
  out.accelerated = asvrcd_params(out.big_l, out.expected_smoothness, mu, rho);
  return out;
}

}  // namespace vrcd::theory
