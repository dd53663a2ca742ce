#include "vrcd/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "vrcd/rng.hpp"

namespace vrcd::harness {

namespace {

Matrix random_orthonormal(int d, Rng& rng) {
  Matrix a(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) a(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(d, d);
}

}  // namespace

Matrix generate_matrix(int type, double target_l, int d, std::uint64_t seed) {
  if (type < 1 || type > 4) throw std::invalid_argument("generate_matrix: type must be 1..4");
  if (!(target_l > 1)) throw std::invalid_argument("generate_matrix: L must exceed 1");
  if ((type == 1 || type == 4) && d % 2 != 0) {
    throw std::invalid_argument("generate_matrix: odd-index construction needs even d");
  }
  if ((type == 2 || type == 3) && d % 10 != 0) {
    throw std::invalid_argument("generate_matrix: spike construction needs d divisible by 10");
  }
  Rng rng(seed);
  const int odd_slots = d / 2;
  const int spikes = d / 10;

  Vector diag = Vector::Ones(d);
  switch (type) {
    case 1:
      for (int k = 1; k <= odd_slots; ++k) {
        diag[2 * (k - 1)] += std::pow(target_l - 1.0, static_cast<double>(k) / odd_slots);
      }
      break;
    case 2:
      for (int i = 0; i < spikes; ++i) diag[i] += target_l - 1.0;
      break;
    case 3:
      // kappa = L keeps the stated L column consistent and the matrix PD:
      // `spikes` eigenvalues at 1, the rest at L.
      diag.setConstant(target_l);
      for (int i = 0; i < spikes; ++i) diag[i] -= target_l - 1.0;
      break;
    case 4:
      for (int k = 1; k <= odd_slots; ++k) {
        diag[2 * (k - 1)] += (target_l / odd_slots) * k;
      }
      return Matrix(diag.asDiagonal());
  }
  Matrix u = random_orthonormal(d, rng);
  return symmetrize(u * diag.asDiagonal() * u.transpose());
}

Vector generate_b(const Matrix& m, std::uint64_t seed) {
  const int d = static_cast<int>(m.rows());
  Rng rng(seed);
  Vector probe(d);
  for (int i = 0; i < d; ++i) probe[i] = rng.normal();
  Eigen::LDLT<Matrix> solver(m);
  Vector raw = solver.solve(probe);
  if ((m * raw - probe).norm() > 1e-8 * probe.norm()) {
    throw std::invalid_argument("generate_b: matrix is singular");
  }
  return (1.5 / raw.norm()) * raw;
}

Matrix generate_projector(int rank, int d) {
  if (rank < 1 || d < 1 || d % rank != 0) {
    throw std::invalid_argument("generate_projector: rank must divide d");
  }
  const int block = d / rank;
  const double value = static_cast<double>(rank) / d;
  Matrix p = Matrix::Zero(d, d);
  for (int t = 0; t < rank; ++t) {
    p.block(t * block, t * block, block, block).setConstant(value);
  }
  return p;
}

std::function<Vector(const Vector&)> block_projector_apply(int rank, int d) {
  if (rank < 1 || d < 1 || d % rank != 0) {
    throw std::invalid_argument("block_projector_apply: rank must divide d");
  }
  const int block = d / rank;
  const double value = static_cast<double>(rank) / d;
  return [rank, block, value, d](const Vector& x) {
    if (x.size() != d) throw std::invalid_argument("block_projector_apply: size mismatch");
    Vector y(d);
    for (int t = 0; t < rank; ++t) {
      const double s = x.segment(t * block, block).sum() * value;
      y.segment(t * block, block).setConstant(s);
    }
    return y;
  };
}

ReferenceSolution reference_solution(const CompositeProblem& problem, double tolerance,
                                     long long max_iterations) {
  if (!(tolerance > 0)) throw std::invalid_argument("reference_solution: tolerance must be positive");
  const double step = 1.0 / largest_eigenvalue(problem.smoothness);
  Vector x = problem.prox(step, problem.anchor);
  for (long long iter = 1; iter <= max_iterations; ++iter) {
    Vector next = problem.prox(step, x - step * problem.f_gradient(x));
    const double move = (next - x).norm();
    x = std::move(next);
    if (move <= tolerance * std::max(1.0, x.norm())) {
      return {x, problem.objective(x), iter};
    }
  }
  throw std::runtime_error("reference_solution: no convergence within the iteration cap");
}

const char* sampling_name(SamplingMode mode) {
  return mode == SamplingMode::Uniform ? "uniform" : "importance";
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  std::size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "sega") return Algorithm::Sega;
  if (name == "svrcd") return Algorithm::Svrcd;
  if (name == "asvrcd") return Algorithm::Asvrcd;
  if (name == "saga" || name == "lsvrg" || name == "lkatyusha") {
    throw std::invalid_argument("config: finite-sum algorithm '" + name +
                                "' is not runnable on the experiment instances");
  }
  throw std::invalid_argument("config: unknown algorithm '" + name + "'");
}

std::vector<double> parse_numbers(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  double x;
  while (ss >> x) out.push_back(x);
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  config.algorithms.clear();
  config.seeds.clear();
  std::optional<std::vector<double>> dense_matrix_values;
  std::optional<std::vector<double>> dense_b_values;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) + " is not key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key == "matrix_type") {
      config.matrix_type = std::stoi(value);
    } else if (key == "L") {
      config.target_l = std::stod(value);
    } else if (key == "d") {
      config.d = std::stoi(value);
    } else if (key == "projector_rank") {
      config.projector_rank = value == "identity" ? -1 : std::stoi(value);
    } else if (key == "algorithms") {
      for (const auto& name : split_list(value)) config.algorithms.push_back(parse_algorithm(name));
    } else if (key == "sampling") {
      if (value == "uniform") {
        config.sampling = SamplingMode::Uniform;
      } else if (value == "importance") {
        config.sampling = SamplingMode::Importance;
      } else {
        throw std::invalid_argument("config: sampling must be uniform or importance");
      }
    } else if (key == "seeds") {
      for (const auto& s : split_list(value)) config.seeds.push_back(std::stoull(s));
    } else if (key == "budget") {
      config.budget = std::stoll(value);
    } else if (key == "trace_every") {
      config.trace_every = std::stoll(value);
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "radius") {
      config.radius = std::stod(value);
    } else if (key == "matrix_seed") {
      config.matrix_seed = std::stoull(value);
    } else if (key == "b_seed") {
      config.b_seed = std::stoull(value);
    } else if (key == "rho_floor") {
      config.rho_floor = value == "true" || value == "1";
    } else if (key == "matrix_dense") {
      dense_matrix_values = parse_numbers(value);
    } else if (key == "b_dense") {
      dense_b_values = parse_numbers(value);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (config.seeds.empty()) config.seeds = {1};

  if (dense_matrix_values) {
    const auto& vals = *dense_matrix_values;
    const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(vals.size()))));
    if (static_cast<std::size_t>(d) * d != vals.size()) {
      throw std::invalid_argument("config: matrix_dense must hold d*d numbers");
    }
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) m(i, j) = vals[i * d + j];  // row-major
    }
    config.dense_matrix = std::move(m);
    config.d = d;
  }
  if (dense_b_values) {
    config.dense_b = Eigen::Map<const Vector>(dense_b_values->data(),
                                              static_cast<long>(dense_b_values->size()));
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  return parse_config(in);
}

BuiltExperiment build_experiment(const ExperimentConfig& config) {
  BuiltExperiment built;
  built.m = config.dense_matrix
                ? *config.dense_matrix
                : generate_matrix(config.matrix_type, config.target_l, config.d, config.matrix_seed);
  const int d = static_cast<int>(built.m.rows());
  built.b = config.dense_b ? *config.dense_b : generate_b(built.m, config.b_seed);
  if (built.b.size() != d) throw std::invalid_argument("build_experiment: b dimension mismatch");

  RegularizerSpec reg;
  if (config.projector_rank < 0) {
    built.projector = Matrix::Identity(d, d);
    reg = RegularizerSpec::ball_subspace(built.projector, config.radius);
    reg.projector_apply = [](const Vector& x) { return x; };
  } else {
    built.projector = generate_projector(config.projector_rank, d);
    reg = RegularizerSpec::ball_subspace(built.projector, config.radius);
    reg.projector_apply = block_projector_apply(config.projector_rank, d);
  }
  built.problem = make_composite(QuadraticInstance{built.m, built.b}, reg);

  Vector probs;
  if (config.sampling == SamplingMode::Uniform) {
    probs = Vector::Constant(d, 1.0 / d);
  } else {
    probs = importance_probabilities(built.m.diagonal(), built.projector.diagonal());
  }
  built.sampler = BlockSampler::single_coordinate(probs);

  const double mu = built.problem.strong_convexity;
  const double calL = theory::compute_calL(built.m, built.projector, built.sampler);
  const double rho = config.rho_floor ? theory::simplified_rate_rho(built.sampler, mu, calL)
                                      : theory::default_rho(built.sampler);
  built.params = theory::derive(built.m, built.projector, built.sampler, mu, rho);

  const ReferenceSolution ref = reference_solution(built.problem);
  built.reference = Reference{ref.x, ref.objective};
  return built;
}

namespace {

void write_header_line(std::ofstream& out, const char* key, const std::string& value) {
  out << "# " << key << ": " << value << "\n";
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(const std::string& path, const ExperimentConfig& config,
                     const BuiltExperiment& built, Algorithm alg, std::uint64_t seed,
                     const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("run_experiment: cannot write " + path);
  const auto& tp = built.params;
  write_header_line(out, "algorithm", algorithm_name(alg));
  write_header_line(out, "sampling", sampling_name(config.sampling));
  write_header_line(out, "seed", std::to_string(seed));
  write_header_line(out, "d", std::to_string(built.problem.dim));
  write_header_line(out, "matrix_type", std::to_string(config.matrix_type));
  write_header_line(out, "L_target", fmt(config.target_l));
  write_header_line(out, "projector_rank",
                    config.projector_rank < 0 ? "identity" : std::to_string(config.projector_rank));
  write_header_line(out, "radius", fmt(config.radius));
  write_header_line(out, "mu", fmt(tp.mu));
  write_header_line(out, "L", fmt(tp.big_l));
  write_header_line(out, "calL", fmt(tp.calL));
  write_header_line(out, "expected_smoothness", fmt(tp.expected_smoothness));
  write_header_line(out, "rho", fmt(tp.rho));
  if (alg == Algorithm::Sega) {
    write_header_line(out, "alpha", fmt(tp.sega.alpha));
    write_header_line(out, "complexity", fmt(tp.sega.complexity));
  } else if (alg == Algorithm::Svrcd) {
    write_header_line(out, "alpha", fmt(tp.svrcd.alpha));
    write_header_line(out, "complexity", fmt(tp.svrcd.complexity));
  } else if (alg == Algorithm::Asvrcd) {
    write_header_line(out, "eta", fmt(tp.accelerated.eta));
    write_header_line(out, "theta1", fmt(tp.accelerated.theta1));
    write_header_line(out, "theta2", fmt(tp.accelerated.theta2));
    write_header_line(out, "gamma", fmt(tp.accelerated.gamma));
    write_header_line(out, "beta", fmt(tp.accelerated.beta));
    write_header_line(out, "complexity", fmt(tp.accelerated.complexity));
  }
  write_header_line(out, "optimum", fmt(built.reference.optimum));
  out << "iter,suboptimality,dist_sq\n";
  for (const auto& rec : trace.records) {
    out << rec.iteration << "," << fmt(rec.suboptimality) << "," << fmt(rec.dist_sq) << "\n";
  }
  if (!out) throw std::runtime_error("run_experiment: write failed for " + path);
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& config) {
  if (config.algorithms.empty()) {
    throw std::invalid_argument("run_experiment: empty algorithm list");
  }
  if (config.seeds.empty()) throw std::invalid_argument("run_experiment: no seeds");
  std::filesystem::create_directories(config.out_dir);

  const BuiltExperiment built = build_experiment(config);
  const std::string rank_tag =
      config.projector_rank < 0 ? "id" : std::to_string(config.projector_rank);

  std::vector<std::string> written;
  for (Algorithm alg : config.algorithms) {
    SolverParams params;
    params.alpha = alg == Algorithm::Sega ? built.params.sega.alpha : built.params.svrcd.alpha;
    params.rho = built.params.rho;
    params.accelerated = built.params.accelerated;

    std::vector<Trace> traces;
    for (std::uint64_t seed : config.seeds) {
      RunOptions opts;
      opts.budget = config.budget;
      opts.seed = seed;
      opts.trace_every = config.trace_every;
      opts.record_lyapunov = false;
      Trace trace = run_solver(alg, built.problem, built.sampler, params, opts, built.reference);

      std::ostringstream name;
      name << config.out_dir << "/" << algorithm_name(alg) << "_" << sampling_name(config.sampling)
           << "_r" << rank_tag << "_seed" << seed << ".csv";
      write_trace_csv(name.str(), config, built, alg, seed, trace);
      written.push_back(name.str());
      traces.push_back(std::move(trace));
    }

    // Aggregated plot data: per-iteration geometric mean over seeds
    // (suboptimality clamped at 1e-300 to keep the log finite).
    std::ostringstream name;
    name << config.out_dir << "/" << algorithm_name(alg) << "_" << sampling_name(config.sampling)
         << "_r" << rank_tag << "_geomean.csv";
    std::ofstream out(name.str());
    if (!out) throw std::runtime_error("run_experiment: cannot write " + name.str());
    write_header_line(out, "algorithm", algorithm_name(alg));
    write_header_line(out, "sampling", sampling_name(config.sampling));
    write_header_line(out, "seeds", std::to_string(config.seeds.size()));
    out << "iter,geomean_suboptimality,geomean_dist_sq\n";
    const std::size_t rows = traces.front().records.size();
    for (std::size_t r = 0; r < rows; ++r) {
      double log_sub = 0;
      double log_dist = 0;
      for (const auto& trace : traces) {
        log_sub += std::log(std::max(trace.records[r].suboptimality, 1e-300));
        log_dist += std::log(std::max(trace.records[r].dist_sq, 1e-300));
      }
      out << traces.front().records[r].iteration << ","
          << fmt(std::exp(log_sub / traces.size())) << ","
          << fmt(std::exp(log_dist / traces.size())) << "\n";
    }
    written.push_back(name.str());
  }
  return written;
}

std::vector<ExperimentConfig> figure1_configs(int d, const std::string& out_dir,
                                              std::vector<std::uint64_t> seeds, long long budget) {
  std::vector<ExperimentConfig> configs;
  for (SamplingMode mode : {SamplingMode::Uniform, SamplingMode::Importance}) {
    ExperimentConfig config;
    config.matrix_type = 1;
    config.target_l = 100;
    config.d = d;
    config.projector_rank = -1;
    config.algorithms = {Algorithm::Svrcd, Algorithm::Asvrcd};
    config.sampling = mode;
    config.seeds = seeds;
    config.budget = budget;
    config.trace_every = std::max<long long>(1, budget / 500);
    config.out_dir = out_dir;
    configs.push_back(std::move(config));
  }
  return configs;
}

std::vector<ExperimentConfig> figure2_configs(int matrix_type, int d, const std::string& out_dir,
                                              std::vector<std::uint64_t> seeds, long long budget) {
  std::vector<ExperimentConfig> configs;
  for (int rank : {d, d / 10, d / 100, 1}) {
    if (rank < 1 || d % rank != 0) continue;
    ExperimentConfig config;
    config.matrix_type = matrix_type;
    config.target_l = 1000;
    config.d = d;
    config.projector_rank = rank;
    config.algorithms = {Algorithm::Svrcd, Algorithm::Asvrcd};
    config.sampling = SamplingMode::Importance;
    config.seeds = seeds;
    config.budget = budget;
    config.trace_every = std::max<long long>(1, budget / 500);
    config.out_dir = out_dir;
    configs.push_back(std::move(config));
  }
  return configs;
}

}  // namespace vrcd::harness
