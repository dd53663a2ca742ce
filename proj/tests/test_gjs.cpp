#include <doctest.h>

#include "vrcd/gjs.hpp"
#include "vrcd/harness.hpp"
#include "vrcd/rng.hpp"
#include "vrcd/solvers.hpp"
#include "vrcd/theory.hpp"

using namespace vrcd;

namespace {

Matrix random_spd(int d, Rng& rng, double shift = 0.5) {
  Matrix c(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) c(i, j) = rng.normal();
  }
  return symmetrize(c * c.transpose() / d + shift * Matrix::Identity(d, d));
}

Vector random_vector(int d, Rng& rng) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.normal();
  return v;
}

Vector random_distribution(int d, Rng& rng) {
  Vector p(d);
  for (int i = 0; i < d; ++i) p[i] = 0.5 + rng.uniform();
  return p / p.sum();
}

gjs::SketchPair identity_pair(int rows, int cols) {
  gjs::SketchPair pair;
  pair.rows = rows;
  pair.cols = cols;
  gjs::SketchOutcome outcome;
  outcome.prob = 1.0;
  outcome.projector = [](const Matrix& x) { return x; };
  outcome.sketch = [](const Matrix& x) { return x; };
  pair.outcomes.push_back(std::move(outcome));
  return pair;
}

}  // namespace

TEST_CASE("identity sketches turn the method into proximal gradient descent") {
  Rng rng(71);
  const int d = 4;
  const CompositeProblem problem = make_composite(
      {random_spd(d, rng), random_vector(d, rng)},
      RegularizerSpec::ball_subspace(Matrix::Identity(d, d), 1.0));
  const gjs::GjsProblem adapted = gjs::adapt(problem);
  const gjs::SketchPair pair = identity_pair(d, 1);
  const double alpha = 0.2;
  gjs::GjsState state = gjs::make_gjs_state(adapted, alpha);
  Vector x = Vector::Zero(d);
  for (int k = 0; k < 10; ++k) {
    const Vector x_pre = x;
    gjs::gjs_step(state, adapted, pair.outcomes[0]);
    x = problem.prox(alpha, x - alpha * problem.f_gradient(x));
    CHECK((state.x - x).cwiseAbs().maxCoeff() < 1e-13);
    // the full projector overwrote the estimate with the pre-step jacobian
    CHECK((state.jac.col(0) - problem.f_gradient(x_pre)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("row and column sketch pairs are unbiased with idempotent projectors") {
  Rng rng(72);
  const BlockSampler rows = BlockSampler::single_coordinate(random_distribution(5, rng));
  const gjs::SketchPair row_pair = gjs::row_sketch_pair(rows, 3);
  CHECK(gjs::sketch_unbiased(row_pair));
  CHECK(gjs::projector_idempotent(row_pair));

  const BlockSampler cols = BlockSampler::single_coordinate(random_distribution(4, rng));
  const gjs::SketchPair col_pair = gjs::column_sketch_pair(cols, 3);
  CHECK(gjs::sketch_unbiased(col_pair));
  CHECK(gjs::projector_idempotent(col_pair));

  const BlockSampler indep = BlockSampler::independent(Vector::Constant(4, 0.3));
  CHECK(gjs::sketch_unbiased(gjs::row_sketch_pair(indep, 2)));
}

TEST_CASE("unbiased sketch expectation on random matrices") {
  Rng rng(73);
  const BlockSampler sampler = BlockSampler::single_coordinate(random_distribution(4, rng));
  const gjs::SketchPair pair = gjs::column_sketch_pair(sampler, 3);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x(3, 4);
    for (int j = 0; j < 4; ++j) x.col(j) = random_vector(3, rng);
    Matrix mean = Matrix::Zero(3, 4);
    for (const auto& outcome : pair.outcomes) mean += outcome.prob * outcome.sketch(x);
    CHECK((mean - x).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("gjs estimator is unbiased") {
  Rng rng(74);
  const int d = 5;
  const CompositeProblem problem =
      make_composite({random_spd(d, rng), random_vector(d, rng)}, RegularizerSpec::none(d));
  const gjs::GjsProblem adapted = gjs::adapt(problem);
  const BlockSampler sampler = BlockSampler::single_coordinate(random_distribution(d, rng));
  const gjs::SketchPair pair = gjs::row_sketch_pair(sampler, 1);
  for (int trial = 0; trial < 20; ++trial) {
    gjs::GjsState state = gjs::make_gjs_state(adapted, 0.1);
    state.x = random_vector(d, rng);
    state.jac = random_vector(d, rng);
    const Matrix jac_x = adapted.jacobian(state.x);
    Vector mean = Vector::Zero(d);
    for (const auto& outcome : pair.outcomes) {
      mean += outcome.prob * gjs::gjs_estimator(adapted, state, jac_x, outcome.sketch);
    }
    CHECK((mean - problem.f_gradient(state.x)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("row sketches replicate the coordinate method") {
  Rng rng(75);
  const int d = 6;
  const Matrix projector = harness::generate_projector(2, d);
  const CompositeProblem problem =
      make_composite({random_spd(d, rng), random_vector(d, rng)},
                     RegularizerSpec::ball_subspace(projector, 1.0));
  const BlockSampler sampler = BlockSampler::single_coordinate(random_distribution(d, rng));
  const Vector& p = sampler.marginals();
  const double calL = theory::compute_calL(problem.smoothness, projector, sampler);
  const double alpha =
      theory::sega_stepsize(p, theory::default_v(calL, p), problem.strong_convexity).alpha;

  const gjs::GjsProblem adapted = gjs::adapt(problem);
  const gjs::SketchPair pair = gjs::row_sketch_pair(sampler, 1);
  gjs::GjsState sketch_state = gjs::make_gjs_state(adapted, alpha);
  SegaState sega = make_sega_state(problem, alpha);
  Rng draws(76);
  for (int k = 0; k < 50; ++k) {
    const SampleDraw draw = sampler.sample(draws);
    gjs::gjs_step(sketch_state, adapted, pair.outcomes[draw.group]);
    sega_step(sega, problem, p, draw.coords);
    CHECK((sketch_state.x - sega.x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sketch_state.jac.col(0) - sega.h).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("column sketches replicate the finite-sum method") {
  Rng rng(77);
  const int n = 4, dh = 3;
  std::vector<QuadraticComponent> parts;
  Vector v_hat(n);
  for (int j = 0; j < n; ++j) {
    Matrix a = random_spd(dh, rng);
    v_hat[j] = largest_eigenvalue(a);
    parts.push_back({a, random_vector(dh, rng)});
  }
  const FiniteSumProblem fs =
      make_finite_sum(parts, RegularizerSpec::ball_subspace(Matrix::Identity(dh, dh), 1.0));
  const Vector p_hat = random_distribution(n, rng);
  const BlockSampler sampler = BlockSampler::single_coordinate(p_hat);
  const double alpha =
      theory::finite_sum_stepsizes(p_hat, v_hat, fs.strong_convexity, n, 0.5).saga.alpha;

  const gjs::GjsProblem adapted = gjs::adapt(fs);
  const gjs::SketchPair pair = gjs::column_sketch_pair(sampler, dh);
  gjs::GjsState sketch_state = gjs::make_gjs_state(adapted, alpha);
  JacobianState saga = make_jacobian_state(fs, alpha);
  Rng draws(78);
  for (int k = 0; k < 50; ++k) {
    const int j = sampler.sample(draws).group;
    gjs::gjs_step(sketch_state, adapted, pair.outcomes[j]);
    const int group[] = {j};
    saga_step(saga, fs, p_hat, group);
    CHECK((sketch_state.x - saga.x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sketch_state.jac - saga.jac).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("commutation holds for the supported sketch pairs") {
  Rng rng(79);
  const int n = 3, dh = 2;
  std::vector<Matrix> col_smoothness;
  for (int j = 0; j < n; ++j) col_smoothness.push_back(random_spd(dh, rng));
  const BlockSampler cols = BlockSampler::single_coordinate(random_distribution(n, rng));
  const gjs::SketchPair col_pair = gjs::column_sketch_pair(cols, dh);
  CHECK(gjs::commutes_with_projector(col_pair, gjs::column_pinv_sqrt_map(col_smoothness)));

  const int d = 4;
  const BlockSampler rows = BlockSampler::single_coordinate(random_distribution(d, rng));
  const gjs::SketchPair row_pair = gjs::row_sketch_pair(rows, 1);
  Matrix diagonal = Vector::LinSpaced(d, 1.0, 2.5).asDiagonal();
  CHECK(gjs::commutes_with_projector(row_pair, gjs::column_pinv_sqrt_map({diagonal})));
  // a dense smoothness matrix does not commute with row projections
  CHECK_FALSE(
      gjs::commutes_with_projector(row_pair, gjs::column_pinv_sqrt_map({random_spd(d, rng)})));
}

TEST_CASE("stepsize conditions hold at the derived stepsize and fail at ten times it") {
  Rng rng(80);
  const int d = 4;
  const Matrix m = random_spd(d, rng);
  const Matrix projector = Matrix::Identity(d, d);
  const Vector p = random_distribution(d, rng);
  const BlockSampler sampler = BlockSampler::single_coordinate(p);
  const double mu = 0.4;
  const double calL = theory::compute_calL(m, projector, sampler);
  const Vector v = theory::default_v(calL, p);
  const double alpha = theory::sega_stepsize(p, v, mu).alpha;
  Vector weights(d);
  for (int i = 0; i < d; ++i) weights[i] = std::sqrt(0.5 / p[i]);
  const gjs::SketchPair pair = gjs::row_sketch_pair(sampler, 1);

  const auto good = gjs::check_gjs_conditions(pair, {m}, projector, weights, alpha, mu);
  CHECK(good.ok);
  CHECK(good.slack_contraction >= -1e-10);
  CHECK(good.slack_residual >= -1e-10);

  const auto taut = gjs::check_gjs_conditions(pair, {m}, projector, weights, 10 * alpha, mu);
  CHECK_FALSE(taut.ok);

  // alpha = 0 reduces the contraction condition to a norm inequality that
  // always holds
  const auto at_zero = gjs::check_gjs_conditions(pair, {m}, projector, weights, 0.0, mu);
  CHECK(at_zero.slack_contraction >= -1e-12);
}

TEST_CASE("variance bound via enumeration") {
  Rng rng(81);
  const int n = 3, dh = 3;
  std::vector<QuadraticComponent> parts;
  for (int j = 0; j < n; ++j) parts.push_back({random_spd(dh, rng), random_vector(dh, rng)});
  const FiniteSumProblem fs = make_finite_sum(parts, RegularizerSpec::none(dh));
  const BlockSampler sampler = BlockSampler::single_coordinate(random_distribution(n, rng));
  const gjs::SketchPair pair = gjs::column_sketch_pair(sampler, dh);
  const Matrix q = Matrix::Identity(dh, dh);

  // solve the smooth problem exactly for x*
  Matrix mean_a = Matrix::Zero(dh, dh);
  Vector mean_b = Vector::Zero(dh);
  for (const auto& part : parts) {
    mean_a += part.a / n;
    mean_b += part.b / n;
  }
  const Vector x_star = mean_a.ldlt().solve(mean_b);
  const Matrix jac_star = fs.jacobian(x_star);

  // both sides vanish at the fixed point with the true jacobian
  double slack = 0;
  CHECK(gjs::variance_bound_check(pair, jac_star, jac_star, jac_star, q, 1e-10, &slack));
  CHECK(slack == doctest::Approx(1e-10));

  for (int trial = 0; trial < 25; ++trial) {
    const Vector x = random_vector(dh, rng);
    Matrix jac_estimate(dh, n);
    for (int j = 0; j < n; ++j) jac_estimate.col(j) = random_vector(dh, rng);
    CHECK(gjs::variance_bound_check(pair, fs.jacobian(x), jac_star, jac_estimate, q));
  }

  // the identity sketch never violates the two-term expansion either
  const gjs::SketchPair id_pair = identity_pair(dh, n);
  const Vector x = random_vector(dh, rng);
  Matrix jac_estimate(dh, n);
  for (int j = 0; j < n; ++j) jac_estimate.col(j) = random_vector(dh, rng);
  CHECK(gjs::variance_bound_check(id_pair, fs.jacobian(x), jac_star, jac_estimate, q));
}
