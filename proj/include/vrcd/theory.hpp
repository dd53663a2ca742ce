#pragma once

#include <utility>
#include <vector>

#include "vrcd/problem.hpp"
#include "vrcd/sampling.hpp"

namespace vrcd::theory {

// E[ Theta_S P Theta_S ] with Theta_S = sum_{i in S} p_i^{-1} e_i e_i^T,
// assembled by exact outcome enumeration (never Monte Carlo).
Matrix expected_sketch_quadratic(const Matrix& projector, const BlockSampler& sampler);

// L = lambda_max(M^{1/2} P M^{1/2})
double compute_L(const Matrix& m, const Matrix& projector);

// calL = lambda_max(M^{1/2} E[Theta_S P Theta_S] M^{1/2})
double compute_calL(const Matrix& m, const Matrix& projector, const BlockSampler& sampler);

struct EsoReport {
  bool ok = false;
  double slack = 0;  // min eigenvalue of diag(p^-1 ∘ v) - LHS
};
EsoReport check_eso(const Matrix& m, const Matrix& projector, const BlockSampler& sampler,
                    const Vector& v);

struct StepsizeResult {
  double alpha = 0;
  double complexity = 0;  // iterations per factor log(1/eps)
};

// alpha = min_i p_i / (4 v_i + mu); complexity = max_i (4 v_i + mu) / (p_i mu)
StepsizeResult sega_stepsize(const Vector& p, const Vector& v, double mu);

// alpha = min_i 1 / (4 v_i / p_i + mu / rho);
// complexity = (4 max_i(v_i / p_i) + mu / rho) / mu
StepsizeResult svrcd_stepsize(const Vector& p, const Vector& v, double mu, double rho);

struct FiniteSumStepsizes {
  StepsizeResult saga;
  StepsizeResult lsvrg;
};

// alpha_saga  = min_j n p_j / (4 v_j + n mu), complexity max_j (4v_j + n mu)/(n mu p_j)
// alpha_lsvrg = min_j n / (4 v_j / p_j + n mu / rho), complexity max_j (4 v_j/(n mu p_j) + 1/rho)
FiniteSumStepsizes finite_sum_stepsizes(const Vector& p_hat, const Vector& v_hat, double mu_hat,
                                        int n, double rho);

struct AsvrcdParams {
  double eta = 0;
  double theta1 = 0;
  double theta2 = 0;
  double gamma = 0;
  double beta = 0;
  double rho = 0;
  double complexity = 0;   // 1/rho + sqrt(L/mu) + sqrt(L'/(rho mu))
  double contraction = 0;  // per-step Lyapunov contraction: (1/4) min{rho, sqrt(mu / (2 max{L, L'/rho}))}
};

// Evaluation order: eta, theta2, theta1, gamma, beta.
AsvrcdParams asvrcd_params(double big_l, double expected_smoothness, double mu, double rho);

// Exact-enumeration check of E‖g - ∇f(x)‖²_P <= 2 L' D_f(w, x) + tol at the
// supplied (x, w) pairs, with g the anchored estimator built from partials.
bool check_expected_smoothness(const CompositeProblem& problem, const BlockSampler& sampler,
                               double expected_smoothness,
                               const std::vector<std::pair<Vector, Vector>>& trial_pairs,
                               double tol = 1e-10, double* worst_slack = nullptr);

Vector default_v(double calL, const Vector& p);

// Coordinate-work balance: E|S| / d.
double default_rho(const BlockSampler& sampler);

// Simplified-rate mode: raises default_rho to sqrt(mu/calL), capped at 1/2
// so the coin probability stays inside (0,1).
double simplified_rate_rho(const BlockSampler& sampler, double mu, double calL);

struct TheoryParams {
  double big_l = 0;
  double calL = 0;
  double expected_smoothness = 0;  // L' used for the accelerated method
  Vector v;
  double mu = 0;
  double rho = 0;
  StepsizeResult sega;
  StepsizeResult svrcd;
  AsvrcdParams accelerated;
};

TheoryParams derive(const Matrix& m, const Matrix& projector, const BlockSampler& sampler,
                    double mu, double rho);

}  // namespace vrcd::theory
