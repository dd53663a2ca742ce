#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vrcd/harness.hpp"
#include "vrcd/rng.hpp"
#include "vrcd/theory.hpp"

using namespace vrcd;
using harness::ExperimentConfig;

TEST_CASE("type-4 matrix matches the scaled-down construction") {
  const Matrix m = harness::generate_matrix(4, 2.0, 4, 1);
  Vector expected(4);
  expected << 2, 1, 3, 1;
  CHECK((m - Matrix(expected.asDiagonal())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("type-2 spectrum splits into ones and spikes") {
  const int d = 50;
  const Matrix m = harness::generate_matrix(2, 100.0, d, 2);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  for (int i = 0; i < d - 5; ++i) CHECK(ev[i] == doctest::Approx(1.0).epsilon(1e-8));
  for (int i = d - 5; i < d; ++i) CHECK(ev[i] == doctest::Approx(100.0).epsilon(1e-8));
}

TEST_CASE("full-scale type-2 spectrum") {
  const int d = 1000;
  const Matrix m = harness::generate_matrix(2, 100.0, d, 3);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ev[d - 101] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ev[d - 100] == doctest::Approx(100.0).epsilon(1e-8));
  CHECK(ev[d - 1] == doctest::Approx(100.0).epsilon(1e-8));
}

TEST_CASE("all matrix types are PD with the right top eigenvalue") {
  for (int type = 1; type <= 4; ++type) {
    for (double target : {100.0, 1000.0}) {
      const Matrix m = harness::generate_matrix(type, target, 200, 4);
      CHECK(is_symmetric(m));
      CHECK(smallest_eigenvalue(m) > 0);
      const double top = largest_eigenvalue(m);
      CHECK(std::abs(top - target) <= 0.01 * target);
    }
  }
  CHECK_THROWS(harness::generate_matrix(5, 100.0, 200, 1));
  CHECK_THROWS(harness::generate_matrix(1, 100.0, 201, 1));  // odd d
  CHECK_THROWS(harness::generate_matrix(2, 100.0, 44, 1));   // not a multiple of 10
  CHECK_THROWS(harness::generate_matrix(1, 1.0, 200, 1));    // L must exceed 1
}

TEST_CASE("right-hand side has norm exactly three halves") {
  const Matrix m = harness::generate_matrix(2, 100.0, 50, 5);
  const Vector b = harness::generate_b(m, 6);
  CHECK(b.norm() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(b == harness::generate_b(m, 6));  // deterministic
  CHECK(harness::generate_b(m, 7) != b);

  // identity solve: b is the scaled probe itself
  const Matrix id = Matrix::Identity(8, 8);
  const Vector scaled = harness::generate_b(id, 9);
  Rng rng(9);
  Vector probe(8);
  for (int i = 0; i < 8; ++i) probe[i] = rng.normal();
  CHECK((scaled - 1.5 * probe / probe.norm()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS(harness::generate_b(Matrix::Zero(3, 3), 1));
}

TEST_CASE("block projector family") {
  CHECK((harness::generate_projector(4, 4) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <
        1e-15);
  const Matrix half = harness::generate_projector(1, 2);
  CHECK((half - Matrix::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff() < 1e-15);
  Eigen::FullPivLU<Matrix> lu(half);
  CHECK(lu.rank() == 1);

  const Matrix p = harness::generate_projector(2, 4);
  CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.trace() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p(0, 0) == doctest::Approx(0.5));
  CHECK(p(0, 2) == 0.0);

  CHECK_THROWS(harness::generate_projector(3, 4));

  const auto apply = harness::block_projector_apply(2, 6);
  Rng rng(10);
  const Matrix dense = harness::generate_projector(2, 6);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(6);
    for (int i = 0; i < 6; ++i) x[i] = rng.normal();
    CHECK((apply(x) - dense * x).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("reference solution solves the unconstrained quadratic") {
  Rng rng(11);
  const int d = 8;
  Matrix c(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) c(i, j) = rng.normal();
  }
  const Matrix m = symmetrize(c * c.transpose() / d + 0.5 * Matrix::Identity(d, d));
  Vector b(d);
  for (int i = 0; i < d; ++i) b[i] = rng.normal();
  const CompositeProblem problem = make_composite({m, b}, RegularizerSpec::none(d));
  const auto solution = harness::reference_solution(problem);
  CHECK((solution.x - m.ldlt().solve(b)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("reference solution reports non-convergence") {
  const Matrix m = harness::generate_matrix(2, 1000.0, 20, 13);
  const Vector b = harness::generate_b(m, 14);
  const CompositeProblem problem = make_composite({m, b}, RegularizerSpec::none(20));
  CHECK_THROWS(harness::reference_solution(problem, 1e-13, 3));
  CHECK_THROWS(harness::reference_solution(problem, 0.0));
}

TEST_CASE("reference solution matches the subspace solve when the ball is inactive") {
  Rng rng(12);
  const int d = 6;
  Matrix c(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) c(i, j) = rng.normal();
  }
  const Matrix m = symmetrize(c * c.transpose() / d + Matrix::Identity(d, d));
  Vector b(d);
  for (int i = 0; i < d; ++i) b[i] = 0.05 * rng.normal();  // small b keeps the minimizer interior
  const Matrix projector = harness::generate_projector(2, d);
  const CompositeProblem problem =
      make_composite({m, b}, RegularizerSpec::ball_subspace(projector, 1.0));
  const auto solution = harness::reference_solution(problem);

  const Matrix basis = range_basis(projector);
  const Vector direct = basis * (basis.transpose() * m * basis).ldlt().solve(basis.transpose() * b);
  CHECK(direct.norm() < 1.0);  // genuinely interior
  CHECK((solution.x - direct).cwiseAbs().maxCoeff() < 1e-9);

  // prox fixed-point optimality
  const double step = 1.0 / largest_eigenvalue(m);
  const Vector fixed = problem.prox(step, solution.x - step * problem.f_gradient(solution.x));
  CHECK((fixed - solution.x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("config parsing round trip") {
  std::istringstream in(R"(# comment
matrix_type = 3
L = 250
d = 40
projector_rank = 4
algorithms = sega, asvrcd
sampling = importance
seeds = 3, 5
budget = 1234
trace_every = 7
out = somewhere/else
radius = 0.5
matrix_seed = 77
b_seed = 88
rho_floor = true
)");
  const ExperimentConfig config = harness::parse_config(in);
  CHECK(config.matrix_type == 3);
  CHECK(config.target_l == 250);
  CHECK(config.d == 40);
  CHECK(config.projector_rank == 4);
  REQUIRE(config.algorithms.size() == 2);
  CHECK(config.algorithms[0] == Algorithm::Sega);
  CHECK(config.algorithms[1] == Algorithm::Asvrcd);
  CHECK(config.sampling == harness::SamplingMode::Importance);
  CHECK(config.seeds == std::vector<std::uint64_t>{3, 5});
  CHECK(config.budget == 1234);
  CHECK(config.trace_every == 7);
  CHECK(config.out_dir == "somewhere/else");
  CHECK(config.radius == 0.5);
  CHECK(config.matrix_seed == 77);
  CHECK(config.b_seed == 88);
  CHECK(config.rho_floor);
}

TEST_CASE("config rejects malformed input") {
  std::istringstream bad_key("nonsense = 1\n");
  CHECK_THROWS(harness::parse_config(bad_key));
  std::istringstream bad_sampling("sampling = sometimes\n");
  CHECK_THROWS(harness::parse_config(bad_sampling));
  std::istringstream bad_algorithm("algorithms = saga\n");
  CHECK_THROWS(harness::parse_config(bad_algorithm));
  std::istringstream no_equals("just words\n");
  CHECK_THROWS(harness::parse_config(no_equals));
}

TEST_CASE("dense matrix config") {
  std::istringstream in(
      "matrix_dense = 2 0 0 1\n"
      "b_dense = 0.5 0.25\n"
      "projector_rank = identity\n"
      "algorithms = svrcd\n");
  const ExperimentConfig config = harness::parse_config(in);
  REQUIRE(config.dense_matrix.has_value());
  CHECK(config.d == 2);
  CHECK((*config.dense_matrix)(0, 0) == 2.0);
  CHECK((*config.dense_matrix)(1, 1) == 1.0);
  REQUIRE(config.dense_b.has_value());
  CHECK((*config.dense_b)[1] == 0.25);

  const auto built = harness::build_experiment(config);
  CHECK(built.problem.dim == 2);
  CHECK(built.params.mu == doctest::Approx(1.0));
  CHECK(built.params.big_l == doctest::Approx(2.0));
}

TEST_CASE("run_experiment writes the expected trace files") {
  ExperimentConfig config;
  config.matrix_type = 4;
  config.target_l = 50;
  config.d = 20;
  config.projector_rank = 2;
  config.algorithms = {Algorithm::Svrcd, Algorithm::Asvrcd};
  config.sampling = harness::SamplingMode::Importance;
  config.seeds = {1, 2};
  config.budget = 400;
  config.trace_every = 50;
  config.out_dir = (std::filesystem::temp_directory_path() / "vrcd_test_traces").string();
  std::filesystem::remove_all(config.out_dir);

  const auto written = harness::run_experiment(config);
  // 2 algorithms x (2 seeds + 1 aggregate)
  CHECK(written.size() == 6);
  for (const auto& path : written) {
    CHECK(std::filesystem::exists(path));
  }

  // check one file in detail
  std::ifstream in(config.out_dir + "/svrcd_importance_r2_seed1.csv");
  REQUIRE(in.good());
  std::string line;
  bool saw_header = false;
  int rows = 0;
  double worst_subopt = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    if (line.rfind("iter,", 0) == 0) {
      saw_header = true;
      continue;
    }
    long long iter;
    double subopt, dist;
    REQUIRE(std::sscanf(line.c_str(), "%lld,%lf,%lf", &iter, &subopt, &dist) == 3);
    worst_subopt = std::min(worst_subopt, subopt);
    ++rows;
  }
  CHECK(saw_header);
  CHECK(rows == 9);  // k = 0 plus 400/50
  CHECK(worst_subopt >= -1e-9);

  ExperimentConfig empty = config;
  empty.algorithms.clear();
  CHECK_THROWS(harness::run_experiment(empty));

  std::filesystem::remove_all(config.out_dir);
}

TEST_CASE("figure presets cover the documented grids") {
  const auto fig1 = harness::figure1_configs(200, "out", {1, 2}, 1000);
  REQUIRE(fig1.size() == 2);
  CHECK(fig1[0].sampling == harness::SamplingMode::Uniform);
  CHECK(fig1[1].sampling == harness::SamplingMode::Importance);
  for (const auto& config : fig1) {
    CHECK(config.matrix_type == 1);
    CHECK(config.target_l == 100);
    CHECK(config.projector_rank == -1);
    CHECK(config.algorithms.size() == 2);
  }

  const auto fig2 = harness::figure2_configs(1, 200, "out", {1}, 1000);
  REQUIRE(fig2.size() == 4);
  CHECK(fig2[0].projector_rank == 200);
  CHECK(fig2[1].projector_rank == 20);
  CHECK(fig2[2].projector_rank == 2);
  CHECK(fig2[3].projector_rank == 1);
  for (const auto& config : fig2) {
    CHECK(config.target_l == 1000);
    CHECK(config.sampling == harness::SamplingMode::Importance);
  }
}
