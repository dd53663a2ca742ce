#include "vrcd/solvers.hpp"

#include <stdexcept>

namespace vrcd {

namespace {

void require_positive_marginals(const Vector& marginals, std::span<const int> coords) {
  for (int i : coords) {
    if (i < 0 || i >= marginals.size() || !(marginals[i] > 0)) {
      throw std::invalid_argument("sampled coordinate has zero marginal probability");
    }
  }
}

}  // namespace

Vector coordinate_estimator(const CompositeProblem& problem, const Vector& x,
                            const Vector& anchor_grad, const Vector& marginals,
                            std::span<const int> coords) {
  require_positive_marginals(marginals, coords);
  Vector g = anchor_grad;
  for (int i : coords) {
    g[i] += (problem.f_partial(x, i) - anchor_grad[i]) / marginals[i];
  }
  return g;
}

Vector finite_sum_estimator(const FiniteSumProblem& fs, const Vector& x,
                            const Matrix& anchor_jacobian, const Vector& group_probs,
                            std::span<const int> groups) {
  require_positive_marginals(group_probs, groups);
  const int n = fs.components;
  Vector g = anchor_jacobian.rowwise().sum() / n;
  for (int j : groups) {
    g += (fs.component_gradient(j, x) - anchor_jacobian.col(j)) / (n * group_probs[j]);
  }
  return g;
}

SegaState make_sega_state(const CompositeProblem& problem, double alpha) {
  SegaState state;
  state.x = problem.anchor;
  state.h = Vector::Zero(problem.dim);
  state.alpha = alpha;
  return state;
}

void sega_step(SegaState& state, const CompositeProblem& problem, const Vector& marginals,
               std::span<const int> coords) {
  require_positive_marginals(marginals, coords);
  Vector g = state.h;
  for (int i : coords) {
    const double partial = problem.f_partial(state.x, i);
    g[i] += (partial - state.h[i]) / marginals[i];
    state.h[i] = partial;  // overwrite sampled coordinates with fresh partials
  }
  state.x = problem.prox(state.alpha, state.x - state.alpha * g);
}

void svrcd_step(SegaState& state, const CompositeProblem& problem, const Vector& marginals,
                std::span<const int> coords, bool refresh) {
  require_positive_marginals(marginals, coords);
  Vector g = state.h;
  for (int i : coords) {
    g[i] += (problem.f_partial(state.x, i) - state.h[i]) / marginals[i];
  }
  if (refresh) state.h = problem.f_gradient(state.x);  // full gradient at the pre-step point
  state.x = problem.prox(state.alpha, state.x - state.alpha * g);
}

AsvrcdState make_asvrcd_state(const CompositeProblem& problem, const theory::AsvrcdParams& params) {
  AsvrcdState state;
  state.y = problem.anchor;
  state.z = problem.anchor;
  state.w = problem.anchor;
  state.grad_w = problem.f_gradient(problem.anchor);
  state.params = params;
  return state;
}

void asvrcd_step(AsvrcdState& state, const CompositeProblem& problem, const Vector& marginals,
                 std::span<const int> coords, bool refresh) {
  const auto& pr = state.params;
  if (pr.theta1 + pr.theta2 > 1.0 + 1e-12) {
    throw std::invalid_argument("asvrcd_step: theta1 + theta2 exceeds 1");
  }
  const Vector x =
      pr.theta1 * state.z + pr.theta2 * state.w + (1.0 - pr.theta1 - pr.theta2) * state.y;
  const Vector g = coordinate_estimator(problem, x, state.grad_w, marginals, coords);
  const Vector y_next = problem.prox(pr.eta, x - pr.eta * g);
  state.z = pr.beta * state.z + (1.0 - pr.beta) * x + (pr.gamma / pr.eta) * (y_next - x);
  if (refresh) {
    state.w = state.y;  // the pre-update y, as the update rule states
    state.grad_w = problem.f_gradient(state.w);
  }
  state.y = y_next;
}

JacobianState make_jacobian_state(const FiniteSumProblem& fs, double alpha) {
  JacobianState state;
  state.x = Vector::Zero(fs.dim);
  state.jac = Matrix::Zero(fs.dim, fs.components);
  state.alpha = alpha;
  return state;
}

void saga_step(JacobianState& state, const FiniteSumProblem& fs, const Vector& group_probs,
               std::span<const int> groups) {
  require_positive_marginals(group_probs, groups);
  const int n = fs.components;
  Vector g = state.jac.rowwise().sum() / n;
  std::vector<std::pair<int, Vector>> fresh;
  fresh.reserve(groups.size());
  for (int j : groups) {
    Vector grad_j = fs.component_gradient(j, state.x);
    g += (grad_j - state.jac.col(j)) / (n * group_probs[j]);
    fresh.emplace_back(j, std::move(grad_j));
  }
  state.x = fs.prox(state.alpha, state.x - state.alpha * g);
  for (auto& [j, grad_j] : fresh) state.jac.col(j) = grad_j;
}

void lsvrg_step(JacobianState& state, const FiniteSumProblem& fs, const Vector& group_probs,
                std::span<const int> groups, bool refresh) {
  const Vector g = finite_sum_estimator(fs, state.x, state.jac, group_probs, groups);
  if (refresh) state.jac = fs.jacobian(state.x);  // Jacobian at the pre-step point
  state.x = fs.prox(state.alpha, state.x - state.alpha * g);
}

LKatyushaState make_lkatyusha_state(const FiniteSumProblem& fs, const theory::AsvrcdParams& params) {
  LKatyushaState state;
  state.y = Vector::Zero(fs.dim);
  state.z = state.y;
  state.w = state.y;
  state.jac_w = fs.jacobian(state.w);
  state.grad_w = state.jac_w.rowwise().sum() / fs.components;
  state.params = params;
  return state;
}

void lkatyusha_step(LKatyushaState& state, const FiniteSumProblem& fs, const Vector& group_probs,
                    std::span<const int> groups, bool refresh) {
  require_positive_marginals(group_probs, groups);
  const auto& pr = state.params;
  if (pr.theta1 + pr.theta2 > 1.0 + 1e-12) {
    throw std::invalid_argument("lkatyusha_step: theta1 + theta2 exceeds 1");
  }
  const int n = fs.components;
  const Vector x =
      pr.theta1 * state.z + pr.theta2 * state.w + (1.0 - pr.theta1 - pr.theta2) * state.y;
  Vector g = state.grad_w;
  for (int j : groups) {
    g += (fs.component_gradient(j, x) - state.jac_w.col(j)) / (n * group_probs[j]);
  }
  const Vector y_next = fs.prox(pr.eta, x - pr.eta * g);
  state.z = pr.beta * state.z + (1.0 - pr.beta) * x + (pr.gamma / pr.eta) * (y_next - x);
  if (refresh) {
    state.w = state.y;
    state.jac_w = fs.jacobian(state.w);
    state.grad_w = state.jac_w.rowwise().sum() / n;
  }
  state.y = y_next;
}

const char* algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::Sega: return "sega";
    case Algorithm::Svrcd: return "svrcd";
    case Algorithm::Asvrcd: return "asvrcd";
    case Algorithm::Saga: return "saga";
    case Algorithm::Lsvrg: return "lsvrg";
    case Algorithm::Lkatyusha: return "lkatyusha";
  }
  return "unknown";
}

bool is_finite_sum_algorithm(Algorithm alg) {
  return alg == Algorithm::Saga || alg == Algorithm::Lsvrg || alg == Algorithm::Lkatyusha;
}

namespace {

struct RunContext {
  const RunOptions& opts;
  const Reference& ref;
  Trace trace;
  bool target_active = false;

  explicit RunContext(const RunOptions& opts_, const Reference& ref_)
      : opts(opts_), ref(ref_), target_active(opts_.target_suboptimality >= 0) {}

  bool want_trace(long long k) const {
    if (k == 0 || k == opts.budget) return true;
    return opts.trace_every > 0 && k % opts.trace_every == 0;
  }

  bool want_target_check(long long k) const {
    if (!target_active || trace.iterations_to_target >= 0) return false;
    if (k == opts.budget) return true;
    return opts.target_check_every > 0 && k % opts.target_check_every == 0;
  }

  // Returns true once the target has been hit, so callers may stop early.
  template <typename Objective, typename Lyapunov>
  bool observe(long long k, const Vector& point, Objective&& objective, Lyapunov&& lyapunov) {
    const bool tracing = want_trace(k);
    const bool checking = want_target_check(k);
    if (!tracing && !checking) return false;
    const double subopt = objective(point) - ref.optimum;
    if (tracing) {
      TraceRecord rec;
      rec.iteration = k;
      rec.suboptimality = subopt;
      rec.dist_sq = (point - ref.x_star).squaredNorm();
      rec.lyapunov = lyapunov();
      trace.records.push_back(std::move(rec));
    }
    if (checking && subopt <= opts.target_suboptimality) {
      trace.iterations_to_target = k;
      return true;
    }
    return false;
  }
};

}  // namespace

Trace run_solver(Algorithm alg, const CompositeProblem& problem, const BlockSampler& sampler,
                 const SolverParams& params, const RunOptions& opts, const Reference& ref) {
  if (is_finite_sum_algorithm(alg)) {
    throw std::invalid_argument("run_solver: finite-sum algorithm passed a coordinate problem");
  }
  if (problem.dim != sampler.dimension()) {
    throw std::invalid_argument("run_solver: sampler dimension mismatch");
  }
  Rng rng(opts.seed);
  const Vector& p = sampler.marginals();

  SegaState seg;
  AsvrcdState acc;
  const bool accelerated = alg == Algorithm::Asvrcd;
  const double rho = accelerated ? params.accelerated.rho : params.rho;
  if (accelerated) {
    acc = make_asvrcd_state(problem, params.accelerated);
  } else {
    seg = make_sega_state(problem, params.alpha);
  }

  // GJS-style potential for SEGA/SVRCD: ‖x - x*‖² + α Σ_i q_i²/(2 p_i) with
  // q = M^{†/2}(h - ∇f(x*)). For ASVRCD, the three-term potential of the
  // accelerated analysis.
  Matrix pinv_root;
  Vector grad_star;
  if (opts.record_lyapunov) {
    grad_star = problem.f_gradient(ref.x_star);
    if (!accelerated) pinv_root = psd_pinv_sqrt(problem.smoothness);
  }

  auto lyapunov = [&]() -> std::optional<double> {
    if (!opts.record_lyapunov) return std::nullopt;
    if (accelerated) {
      const auto& pr = acc.params;
      const double py = problem.objective(acc.y) - ref.optimum;
      const double pw = problem.objective(acc.w) - ref.optimum;
      const double weight = 2 * pr.gamma * pr.beta / pr.theta1;
      const double weight_w = (2 * pr.theta2 + pr.theta1) * pr.gamma * pr.beta / (pr.theta1 * pr.rho);
      return (acc.z - ref.x_star).squaredNorm() + weight * py + weight_w * pw;
    }
    const Vector q = pinv_root * (seg.h - grad_star);
    double control = 0;
    for (int i = 0; i < q.size(); ++i) control += q[i] * q[i] / (2 * p[i]);
    return (seg.x - ref.x_star).squaredNorm() + seg.alpha * control;
  };

  auto objective = [&](const Vector& x) { return problem.objective(x); };

  RunContext ctx(opts, ref);
  const Vector* point = accelerated ? &acc.y : &seg.x;
  if (ctx.observe(0, *point, objective, lyapunov)) return std::move(ctx.trace);

  for (long long k = 0; k < opts.budget; ++k) {
    const SampleDraw draw = sampler.sample(rng);
    switch (alg) {
      case Algorithm::Sega:
        sega_step(seg, problem, p, draw.coords);
        break;
      case Algorithm::Svrcd: {
        const bool refresh = coin(rho, rng);
        svrcd_step(seg, problem, p, draw.coords, refresh);
        break;
      }
      case Algorithm::Asvrcd: {
        const bool refresh = coin(rho, rng);
        asvrcd_step(acc, problem, p, draw.coords, refresh);
        break;
      }
      default:
        break;
    }
    if (ctx.observe(k + 1, *point, objective, lyapunov)) break;
  }
  return std::move(ctx.trace);
}

Trace run_finite_sum_solver(Algorithm alg, const FiniteSumProblem& fs, const BlockSampler& sampler,
                            const SolverParams& params, const RunOptions& opts,
                            const Reference& ref) {
  if (!is_finite_sum_algorithm(alg)) {
    throw std::invalid_argument("run_finite_sum_solver: coordinate algorithm passed");
  }
  if (sampler.dimension() != fs.components) {
    throw std::invalid_argument("run_finite_sum_solver: sampler must draw component subsets");
  }
  Rng rng(opts.seed);
  const Vector& p = sampler.marginals();

  JacobianState jac_state;
  LKatyushaState kat;
  const bool accelerated = alg == Algorithm::Lkatyusha;
  const double rho = accelerated ? params.accelerated.rho : params.rho;
  if (accelerated) {
    kat = make_lkatyusha_state(fs, params.accelerated);
  } else {
    jac_state = make_jacobian_state(fs, params.alpha);
  }

  auto objective = [&](const Vector& x) { return fs.objective(x); };
  auto lyapunov = [&]() -> std::optional<double> { return std::nullopt; };

  RunContext ctx(opts, ref);
  const Vector* point = accelerated ? &kat.y : &jac_state.x;
  if (ctx.observe(0, *point, objective, lyapunov)) return std::move(ctx.trace);

  for (long long k = 0; k < opts.budget; ++k) {
    const SampleDraw draw = sampler.sample(rng);
    switch (alg) {
      case Algorithm::Saga:
        saga_step(jac_state, fs, p, draw.coords);
        break;
      case Algorithm::Lsvrg: {
        const bool refresh = coin(rho, rng);
        lsvrg_step(jac_state, fs, p, draw.coords, refresh);
        break;
      }
      case Algorithm::Lkatyusha: {
        const bool refresh = coin(rho, rng);
        lkatyusha_step(kat, fs, p, draw.coords, refresh);
        break;
      }
      default:
        break;
    }
    if (ctx.observe(k + 1, *point, objective, lyapunov)) break;
  }
  return std::move(ctx.trace);
}

}  // namespace vrcd
