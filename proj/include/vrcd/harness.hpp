#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vrcd/problem.hpp"
#include "vrcd/solvers.hpp"
#include "vrcd/theory.hpp"

namespace vrcd::harness {

// Experiment matrices, types 1-4. The constructions rescale with d: the
// odd-index band has d/2 slots and the spike count is d/10, matching the
// originals at d = 1000. Types 1-3 are conjugated by a seeded random
// orthonormal matrix from a QR factorization.
Matrix generate_matrix(int type, double target_l, int d, std::uint64_t seed);

// Normal-entry solve scaled so that the result has norm exactly 3/2.
Vector generate_b(const Matrix& m, std::uint64_t seed);

// Block-diagonal projector: `rank` blocks of size d/rank, each (rank/d) * ones.
Matrix generate_projector(int rank, int d);

// O(d) apply for generate_projector's output.
std::function<Vector(const Vector&)> block_projector_apply(int rank, int d);

struct ReferenceSolution {
  Vector x;
  double objective = 0;
  long long iterations = 0;
};

// Proximal gradient with stepsize 1/lambda_max(M) iterated until the step
// length drops below tolerance * max(1, ‖x‖).
ReferenceSolution reference_solution(const CompositeProblem& problem, double tolerance = 1e-13,
                                     long long max_iterations = 10'000'000);

enum class SamplingMode { Uniform, Importance };
const char* sampling_name(SamplingMode mode);

struct ExperimentConfig {
  int matrix_type = 1;
  double target_l = 100;
  int d = 200;               // desk-scale default; 1000 reproduces the originals
  int projector_rank = -1;   // -1 = identity
  std::vector<Algorithm> algorithms;
  SamplingMode sampling = SamplingMode::Uniform;
  std::vector<std::uint64_t> seeds = {1};
  long long budget = 100000;
  long long trace_every = 100;
  std::string out_dir = "traces";
  double radius = 1.0;
  std::uint64_t matrix_seed = 1;
  std::uint64_t b_seed = 2;
  bool rho_floor = false;    // simplified-rate coin probability for the accelerated method
  std::optional<Matrix> dense_matrix;  // explicit instance instead of a generator recipe
  std::optional<Vector> dense_b;
};

// Plain-text key-value config: one `key = value` per line, `#` comments.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct BuiltExperiment {
  Matrix m;
  Vector b;
  Matrix projector;
  CompositeProblem problem;
  BlockSampler sampler;
  theory::TheoryParams params;
  Reference reference;
};

BuiltExperiment build_experiment(const ExperimentConfig& config);

// One CSV per (algorithm, seed) plus one aggregated geometric-mean file per
// algorithm; returns the paths written.
std::vector<std::string> run_experiment(const ExperimentConfig& config);

std::vector<ExperimentConfig> figure1_configs(int d, const std::string& out_dir,
                                              std::vector<std::uint64_t> seeds, long long budget);
std::vector<ExperimentConfig> figure2_configs(int matrix_type, int d, const std::string& out_dir,
                                              std::vector<std::uint64_t> seeds, long long budget);

}  // namespace vrcd::harness
