#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vrcd/problem.hpp"
#include "vrcd/sampling.hpp"
#include "vrcd/theory.hpp"

namespace vrcd {

// g = anchor_grad + sum_{i in coords} (1/p_i)(∂_i f(x) - anchor_grad_i) e_i.
// With anchor_grad = h this is the SEGA/SVRCD estimator; with
// anchor_grad = ∇f(w) it is the ASVRCD one.
Vector coordinate_estimator(const CompositeProblem& problem, const Vector& x,
                            const Vector& anchor_grad, const Vector& marginals,
                            std::span<const int> coords);

// g = (1/n) J e + (1/n) sum_{j in groups} (1/p_j)(∇f_j(x) - J_{:,j}).
// With J the control matrix this is the SAGA/L-SVRG estimator; with
// J = G(w) it is the anchored estimator of the accelerated variant.
Vector finite_sum_estimator(const FiniteSumProblem& fs, const Vector& x,
                            const Matrix& anchor_jacobian, const Vector& group_probs,
                            std::span<const int> groups);

struct SegaState {
  Vector x;
  Vector h;  // control variate
  double alpha = 0;
};
SegaState make_sega_state(const CompositeProblem& problem, double alpha);

void sega_step(SegaState& state, const CompositeProblem& problem, const Vector& marginals,
               std::span<const int> coords);
void svrcd_step(SegaState& state, const CompositeProblem& problem, const Vector& marginals,
                std::span<const int> coords, bool refresh);

struct AsvrcdState {
  Vector y;
  Vector z;
  Vector w;
  Vector grad_w;  // cached ∇f(w), refreshed only when w changes
  theory::AsvrcdParams params;
};
AsvrcdState make_asvrcd_state(const CompositeProblem& problem, const theory::AsvrcdParams& params);

// x^k is recomputed from (y, z, w) every step, never stored.
void asvrcd_step(AsvrcdState& state, const CompositeProblem& problem, const Vector& marginals,
                 std::span<const int> coords, bool refresh);

struct JacobianState {
  Vector x;
  Matrix jac;  // d x n control matrix
  double alpha = 0;
};
JacobianState make_jacobian_state(const FiniteSumProblem& fs, double alpha);

void saga_step(JacobianState& state, const FiniteSumProblem& fs, const Vector& group_probs,
               std::span<const int> groups);
void lsvrg_step(JacobianState& state, const FiniteSumProblem& fs, const Vector& group_probs,
                std::span<const int> groups, bool refresh);

struct LKatyushaState {
  Vector y;
  Vector z;
  Vector w;
  Matrix jac_w;    // G(w), refreshed only when w changes
  Vector grad_w;   // (1/n) G(w) e
  theory::AsvrcdParams params;
};
LKatyushaState make_lkatyusha_state(const FiniteSumProblem& fs, const theory::AsvrcdParams& params);

void lkatyusha_step(LKatyushaState& state, const FiniteSumProblem& fs, const Vector& group_probs,
                    std::span<const int> groups, bool refresh);

enum class Algorithm { Sega, Svrcd, Asvrcd, Saga, Lsvrg, Lkatyusha };
const char* algorithm_name(Algorithm alg);
bool is_finite_sum_algorithm(Algorithm alg);

struct SolverParams {
  double alpha = 0;                     // SEGA / SVRCD / SAGA / L-SVRG
  double rho = 0;                       // coin probability where the method uses one
  theory::AsvrcdParams accelerated;     // ASVRCD / L-Katyusha variant
};

struct Reference {
  Vector x_star;
  double optimum = 0;  // P(x*)
};

struct RunOptions {
  long long budget = 0;
  std::uint64_t seed = 0;
  long long trace_every = 1;
  // When >= 0: stop once objective(x) - optimum <= target_suboptimality,
  // checked every target_check_every iterations.
  double target_suboptimality = -1;
  long long target_check_every = 1;
  bool record_lyapunov = true;
};

struct TraceRecord {
  long long iteration = 0;
  double suboptimality = 0;
  double dist_sq = 0;
  std::optional<double> lyapunov;
};

struct Trace {
  std::vector<TraceRecord> records;
  long long iterations_to_target = -1;  // -1 when the target was never reached
};

Trace run_solver(Algorithm alg, const CompositeProblem& problem, const BlockSampler& sampler,
                 const SolverParams& params, const RunOptions& opts, const Reference& ref);

// Sampler draws component subsets: dimension must equal fs.components.
Trace run_finite_sum_solver(Algorithm alg, const FiniteSumProblem& fs, const BlockSampler& sampler,
                            const SolverParams& params, const RunOptions& opts,
                            const Reference& ref);

}  // namespace vrcd
