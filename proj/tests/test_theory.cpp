#include <doctest.h>

#include <cmath>

#include "vrcd/harness.hpp"
#include "vrcd/problem.hpp"
#include "vrcd/rng.hpp"
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

Vector random_distribution(int d, Rng& rng) {
  Vector p(d);
  for (int i = 0; i < d; ++i) p[i] = 0.5 + rng.uniform();
  return p / p.sum();
}

}  // namespace

TEST_CASE("compute_L basic values") {
  const Matrix id3 = Matrix::Identity(3, 3);
  CHECK(theory::compute_L(id3, id3) == doctest::Approx(1.0));
  CHECK(theory::compute_L(id3, Matrix::Constant(3, 3, 1.0 / 3)) == doctest::Approx(1.0));

  Rng rng(31);
  const Matrix m = random_spd(5, rng);
  CHECK(theory::compute_L(m, Matrix::Identity(5, 5)) ==
        doctest::Approx(largest_eigenvalue(m)).epsilon(1e-10));

  Matrix asym = Matrix::Zero(2, 2);
  asym(0, 1) = 1.0;
  CHECK_THROWS(theory::compute_L(asym, Matrix::Identity(2, 2)));
}

TEST_CASE("compute_calL matches the paper example and the closed form") {
  for (int d : {3, 10, 50}) {
    const Matrix identity = Matrix::Identity(d, d);
    const BlockSampler sampler = BlockSampler::single_coordinate(Vector::Constant(d, 1.0 / d));
    CHECK(theory::compute_calL(identity, identity, sampler) == doctest::Approx(d).epsilon(1e-12));
    CHECK(theory::compute_calL(identity, Matrix::Constant(d, d, 1.0 / d), sampler) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  // closed-form reduction for P = I and single-coordinate sampling:
  // calL = lambda_max(diag(p)^{-1/2} M diag(p)^{-1/2})
  Rng rng(32);
  const int d = 6;
  const Matrix m = random_spd(d, rng);
  const Vector p = random_distribution(d, rng);
  const BlockSampler sampler = BlockSampler::single_coordinate(p);
  const Matrix scaled =
      p.cwiseSqrt().cwiseInverse().asDiagonal() * m * p.cwiseSqrt().cwiseInverse().asDiagonal();
  CHECK(theory::compute_calL(m, Matrix::Identity(d, d), sampler) ==
        doctest::Approx(largest_eigenvalue(symmetrize(scaled))).epsilon(1e-10));
}

TEST_CASE("check_eso accepts calL*p and rejects half of it") {
  Rng rng(33);
  const int d = 5;
  const Matrix m = random_spd(d, rng);
  const Matrix projector = Matrix::Identity(d, d);
  const Vector p = random_distribution(d, rng);
  const BlockSampler sampler = BlockSampler::single_coordinate(p);
  const double calL = theory::compute_calL(m, projector, sampler);
  CHECK(theory::check_eso(m, projector, sampler, theory::default_v(calL, p)).ok);
  CHECK_FALSE(theory::check_eso(m, projector, sampler, 0.5 * theory::default_v(calL, p)).ok);

  // scalar case: the bound is met with equality
  const Matrix scalar = Matrix::Constant(1, 1, 2.5);
  const BlockSampler trivial = BlockSampler::single_coordinate(Vector::Ones(1));
  const auto report =
      theory::check_eso(scalar, Matrix::Identity(1, 1), trivial, Vector::Constant(1, 2.5));
  CHECK(report.ok);
  CHECK(report.slack == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sega stepsize formula") {
  Vector p(2), v(2);
  p << 0.5, 0.5;
  v << 1, 1;
  const auto result = theory::sega_stepsize(p, v, 0.1);
  CHECK(result.alpha == doctest::Approx(0.5 / 4.1));
  CHECK(result.complexity == doctest::Approx(82.0));

  const auto scalar = theory::sega_stepsize(Vector::Ones(1), Vector::Constant(1, 3.0), 0.2);
  CHECK(scalar.alpha == doctest::Approx(1.0 / 12.2));

  Vector v2(2);
  v2 << 1, 10;
  CHECK(theory::sega_stepsize(p, v2, 0.1).alpha == doctest::Approx(0.5 / 40.1));

  CHECK_THROWS(theory::sega_stepsize(p, v, 0.0));
}

TEST_CASE("svrcd stepsize formula") {
  Vector p(2), v(2);
  p << 0.5, 0.5;
  v << 1, 1;
  const auto result = theory::svrcd_stepsize(p, v, 0.1, 0.1);
  CHECK(result.alpha == doctest::Approx(1.0 / 9.0));

  // with v = calL * p the complexity collapses to (4 calL + mu/rho)/mu
  const double calL = 7.0, mu = 0.2, rho = 0.25;
  const auto collapsed = theory::svrcd_stepsize(p, calL * p, mu, rho);
  CHECK(collapsed.complexity == doctest::Approx((4 * calL + mu / rho) / mu));

  const auto scalar = theory::svrcd_stepsize(Vector::Ones(1), Vector::Constant(1, 2.0), 0.3, 0.5);
  CHECK(scalar.alpha == doctest::Approx(1.0 / (8.0 + 0.6)));

  CHECK_THROWS(theory::svrcd_stepsize(p, v, 0.1, 0.0));
  CHECK_THROWS(theory::svrcd_stepsize(p, v, 0.1, 1.0));
}

TEST_CASE("finite-sum stepsizes") {
  {
    const auto single = theory::finite_sum_stepsizes(Vector::Ones(1), Vector::Constant(1, 2.0),
                                                     0.5, 1, 0.3);
    CHECK(single.saga.alpha == doctest::Approx(1.0 / (4 * 2.0 + 0.5)));
  }
  {
    const int n = 4;
    const double mean_v = 3.0, mu = 0.2;
    const auto uniform = theory::finite_sum_stepsizes(Vector::Constant(n, 1.0 / n),
                                                      Vector::Constant(n, mean_v), mu, n, 0.5);
    CHECK(uniform.saga.alpha == doctest::Approx(1.0 / (4 * mean_v + n * mu)));
  }
  {
    // lifted-constants identity: the coordinate stepsize with v = v_hat/n^2,
    // mu = mu_hat/n and block marginals equals n times the finite-sum one
    Rng rng(34);
    const int n = 5;
    const Vector p_hat = random_distribution(n, rng);
    Vector v_hat(n);
    for (int j = 0; j < n; ++j) v_hat[j] = 1.0 + 4.0 * rng.uniform();
    const double mu_hat = 0.3;
    const auto fs = theory::finite_sum_stepsizes(p_hat, v_hat, mu_hat, n, 0.4);
    const auto lifted = theory::sega_stepsize(
        p_hat, v_hat / (static_cast<double>(n) * n), mu_hat / n);
    CHECK(lifted.alpha == doctest::Approx(n * fs.saga.alpha).epsilon(1e-12));
    CHECK(lifted.complexity == doctest::Approx(fs.saga.complexity).epsilon(1e-12));
  }
}

TEST_CASE("asvrcd parameter formulas") {
  {
    const auto p = theory::asvrcd_params(1.0, 1.0, 0.01, 0.5);
    CHECK(p.eta == doctest::Approx(0.25));
    CHECK(p.theta2 == doctest::Approx(0.5));
    CHECK(p.theta1 == doctest::Approx(0.05));
    CHECK(p.gamma == doctest::Approx(1.25));
    CHECK(p.beta == doctest::Approx(0.9875));
  }
  {
    // exact algebraic values: eta = 1/4000, theta1 = sqrt(1/800),
    // gamma = 1/(400 sqrt(2))
    const auto p = theory::asvrcd_params(100.0, 1000.0, 1.0, 0.1);
    CHECK(p.eta == doctest::Approx(1.0 / 4000).epsilon(1e-15));
    CHECK(p.theta2 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.theta1 == doctest::Approx(std::sqrt(1.0 / 800)).epsilon(1e-14));
    CHECK(p.gamma == doctest::Approx(1.0 / (400 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(p.beta == doctest::Approx(1.0 - 1.0 / (400 * std::sqrt(2.0))).epsilon(1e-14));
  }
  {
    // L' = L degenerates theta2 to 1/2
    const auto p = theory::asvrcd_params(7.0, 7.0, 0.1, 0.3);
    CHECK(p.theta2 == doctest::Approx(0.5));
  }
  CHECK_THROWS(theory::asvrcd_params(1.0, 1.0, 0.01, 1.0));
  CHECK_THROWS(theory::asvrcd_params(0.0, 1.0, 0.01, 0.5));
}

TEST_CASE("expected smoothness inequality") {
  Rng rng(35);
  const int d = 5;
  const Matrix m = random_spd(d, rng);
  const CompositeProblem problem = make_composite(
      {m, Vector::Zero(d)}, RegularizerSpec::subspace(harness::generate_projector(1, d)));
  const BlockSampler sampler = BlockSampler::single_coordinate(random_distribution(d, rng));
  const double calL = theory::compute_calL(m, problem.projector, sampler);

  auto rand_vec = [&]() {
    Vector v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    return v;
  };

  // exact at x = w
  const Vector same = rand_vec();
  CHECK(theory::check_expected_smoothness(problem, sampler, calL, {{same, same}}));

  std::vector<std::pair<Vector, Vector>> pairs;
  for (int k = 0; k < 100; ++k) pairs.emplace_back(rand_vec(), rand_vec());
  double slack = 0;
  CHECK(theory::check_expected_smoothness(problem, sampler, calL, pairs, 1e-10, &slack));
  CHECK(slack >= 0);

  // L' = 0 fails as soon as the estimator has any variance
  CHECK_FALSE(theory::check_expected_smoothness(problem, sampler, 0.0, pairs));
}

TEST_CASE("L never exceeds calL") {
  Rng rng(36);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 4 + trial;
    const Matrix m = random_spd(d, rng);
    const Matrix projector = trial % 2 == 0 ? Matrix(Matrix::Identity(d, d))
                                            : harness::generate_projector(d % 2 == 0 ? 2 : 1, d);
    BlockSampler sampler = trial % 3 == 0
                               ? BlockSampler::independent(Vector::Constant(d, 0.35))
                               : BlockSampler::single_coordinate(random_distribution(d, rng));
    CHECK(theory::compute_L(m, projector) <=
          theory::compute_calL(m, projector, sampler) + 1e-10);
  }
}

TEST_CASE("calL shrinks with the projector range") {
  Rng rng(37);
  const int d = 8;
  const Matrix m = random_spd(d, rng);
  const BlockSampler sampler = BlockSampler::single_coordinate(Vector::Constant(d, 1.0 / d));
  double previous = -1;
  for (int rank : {1, 2, 4, 8}) {  // nested ranges as rank grows
    const double value = theory::compute_calL(m, harness::generate_projector(rank, d), sampler);
    CHECK(value >= previous - 1e-10);
    previous = value;
  }
}

TEST_CASE("coordinate form of the sketch stepsize conditions") {
  Rng rng(38);
  const int d = 6;
  const Vector p = random_distribution(d, rng);
  const double mu = 0.2;
  const BlockSampler sampler = BlockSampler::single_coordinate(p);
  const Matrix m = random_spd(d, rng);
  const double calL = theory::compute_calL(m, Matrix::Identity(d, d), sampler);
  const Vector v = theory::default_v(calL, p);
  const double alpha = theory::sega_stepsize(p, v, mu).alpha;
  for (int i = 0; i < d; ++i) {
    const double b_sq = 0.5 / p[i];
    CHECK(2 * alpha * v[i] / p[i] + b_sq * alpha * mu <= b_sq * p[i] + 1e-12);
    CHECK(2 * alpha * v[i] / p[i] + b_sq * p[i] <= 1.0 + 1e-12);
  }
}

TEST_CASE("rho defaults") {
  const BlockSampler sampler = BlockSampler::single_block(4, 2, Vector::Constant(4, 0.25));
  CHECK(theory::default_rho(sampler) == doctest::Approx(0.25));
  CHECK(theory::simplified_rate_rho(sampler, 1.0, 16.0) == doctest::Approx(0.25));
  CHECK(theory::simplified_rate_rho(sampler, 1.0, 4.0) == doctest::Approx(0.5));
  CHECK(theory::simplified_rate_rho(sampler, 1.0, 1.0) == doctest::Approx(0.5));  // capped
}

TEST_CASE("derive bundles consistent parameters") {
  Rng rng(39);
  const int d = 6;
  const Matrix m = random_spd(d, rng);
  const Matrix projector = Matrix::Identity(d, d);
  const BlockSampler sampler = BlockSampler::single_coordinate(Vector::Constant(d, 1.0 / d));
  const double mu = smallest_eigenvalue(m);
  const auto tp = theory::derive(m, projector, sampler, mu, 0.2);
  CHECK(tp.big_l <= tp.calL + 1e-10);
  CHECK(tp.expected_smoothness == tp.calL);
  CHECK(tp.sega.alpha > 0);
  CHECK(tp.svrcd.alpha > 0);
  CHECK(tp.accelerated.theta1 > 0);
  CHECK(tp.accelerated.theta1 + tp.accelerated.theta2 <= 1.0);
  CHECK(tp.v == theory::default_v(tp.calL, sampler.marginals()));
}
