#include "vrcd/problem.hpp"

#include <memory>
#include <stdexcept>

#include "vrcd/prox.hpp"

namespace vrcd {

RegularizerSpec RegularizerSpec::none(int dim) {
  RegularizerSpec spec;
  spec.kind = RegularizerKind::None;
  spec.projector = Matrix::Identity(dim, dim);
  return spec;
}

RegularizerSpec RegularizerSpec::subspace(Matrix projector) {
  RegularizerSpec spec;
  spec.kind = RegularizerKind::Subspace;
  spec.projector = std::move(projector);
  return spec;
}

RegularizerSpec RegularizerSpec::ball_subspace(Matrix projector, double radius) {
  if (radius <= 0) throw std::invalid_argument("ball_subspace: radius must be positive");
  RegularizerSpec spec;
  spec.kind = RegularizerKind::BallSubspace;
  spec.projector = std::move(projector);
  spec.radius = radius;
  return spec;
}

namespace {

std::function<Vector(const Vector&)> projector_apply_or_dense(const RegularizerSpec& reg) {
  if (reg.projector_apply) return reg.projector_apply;
  auto p = std::make_shared<Matrix>(reg.projector);
  return [p](const Vector& x) { return Vector(*p * x); };
}

}  // namespace

CompositeProblem make_composite(const QuadraticInstance& quad, const RegularizerSpec& reg) {
  const int d = static_cast<int>(quad.m.rows());
  if (quad.m.cols() != d || quad.b.size() != d) {
    throw std::invalid_argument("make_composite: inconsistent quadratic dimensions");
  }
  require_symmetric(quad.m, "make_composite");

  CompositeProblem problem;
  problem.dim = d;
  auto q = std::make_shared<QuadraticInstance>(quad);
  problem.f_value = [q](const Vector& x) { return q->value(x); };
  problem.f_gradient = [q](const Vector& x) { return q->gradient(x); };
  problem.f_partial = [q](const Vector& x, int i) { return q->partial(x, i); };
  problem.smoothness = quad.m;
  problem.projector = reg.projector;
  problem.anchor = Vector::Zero(d);
  problem.psi_value = [](const Vector&) { return 0.0; };
  problem.strong_convexity = subspace_strong_convexity(quad.m, reg.projector);

  switch (reg.kind) {
    case RegularizerKind::None:
      problem.prox = [](double, const Vector& x) { return x; };
      break;
    case RegularizerKind::Subspace: {
      auto apply = projector_apply_or_dense(reg);
      problem.prox = [apply](double, const Vector& x) { return apply(x); };
      break;
    }
    case RegularizerKind::BallSubspace: {
      auto apply = projector_apply_or_dense(reg);
      const double radius = reg.radius;
      problem.prox = [apply, radius](double, const Vector& x) {
        Vector y = apply(x);
        const double norm = y.norm();
        if (norm <= radius || norm == 0.0) return y;
        return Vector((radius / norm) * y);
      };
      break;
    }
  }
  return problem;
}

double FiniteSumProblem::f_value(const Vector& x) const {
  double sum = 0;
  for (int j = 0; j < components; ++j) sum += component_value(j, x);
  return sum / components;
}

Vector FiniteSumProblem::f_gradient(const Vector& x) const {
  Vector g = Vector::Zero(dim);
  for (int j = 0; j < components; ++j) g += component_gradient(j, x);
  return g / components;
}

Matrix FiniteSumProblem::jacobian(const Vector& x) const {
  Matrix jac(dim, components);
  for (int j = 0; j < components; ++j) jac.col(j) = component_gradient(j, x);
  return jac;
}

FiniteSumProblem make_finite_sum(std::vector<QuadraticComponent> parts, const RegularizerSpec& reg) {
  if (parts.empty()) throw std::invalid_argument("make_finite_sum: no components");
  const int n = static_cast<int>(parts.size());
  const int d = static_cast<int>(parts[0].a.rows());
  for (const auto& part : parts) {
    if (part.a.rows() != d || part.a.cols() != d || part.b.size() != d) {
      throw std::invalid_argument("make_finite_sum: inconsistent component dimensions");
    }
    require_symmetric(part.a, "make_finite_sum");
  }

  FiniteSumProblem fs;
  fs.components = n;
  fs.dim = d;
  auto shared = std::make_shared<std::vector<QuadraticComponent>>(std::move(parts));
  fs.component_value = [shared](int j, const Vector& x) {
    const auto& p = (*shared)[j];
    return 0.5 * x.dot(p.a * x) - p.b.dot(x);
  };
  fs.component_gradient = [shared](int j, const Vector& x) {
    const auto& p = (*shared)[j];
    return Vector(p.a * x - p.b);
  };
  fs.component_smoothness.reserve(n);
  for (const auto& part : *shared) fs.component_smoothness.push_back(part.a);

  Matrix mean = Matrix::Zero(d, d);
  for (const auto& part : *shared) mean += part.a;
  mean /= n;
  fs.strong_convexity = subspace_strong_convexity(mean, reg.projector);

  fs.psi_value = [](const Vector&) { return 0.0; };
  switch (reg.kind) {
    case RegularizerKind::None:
      fs.prox = [](double, const Vector& x) { return x; };
      break;
    case RegularizerKind::Subspace: {
      auto apply = projector_apply_or_dense(reg);
      fs.prox = [apply](double, const Vector& x) { return apply(x); };
      break;
    }
    case RegularizerKind::BallSubspace: {
      auto apply = projector_apply_or_dense(reg);
      const double radius = reg.radius;
      fs.prox = [apply, radius](double, const Vector& x) {
        Vector y = apply(x);
        const double norm = y.norm();
        if (norm <= radius || norm == 0.0) return y;
        return Vector((radius / norm) * y);
      };
      break;
    }
  }
  return fs;
}

Vector lift(const Vector& x, int copies) {
  if (copies < 1) throw std::invalid_argument("lift: need at least one copy");
  const int d = static_cast<int>(x.size());
  Vector out(static_cast<long>(d) * copies);
  for (int j = 0; j < copies; ++j) out.segment(j * d, d) = x;
  return out;
}

Vector block_mean(const Vector& x, int copies) {
  if (copies < 1 || x.size() % copies != 0) {
    throw std::invalid_argument("block_mean: size not divisible into blocks");
  }
  const int d = static_cast<int>(x.size()) / copies;
  Vector mean = Vector::Zero(d);
  for (int j = 0; j < copies; ++j) mean += x.segment(j * d, d);
  return mean / copies;
}

Matrix block_constant_projector(int copies, int block_dim) {
  const int d = copies * block_dim;
  Matrix p = Matrix::Zero(d, d);
  const double w = 1.0 / copies;
  for (int j = 0; j < copies; ++j) {
    for (int k = 0; k < copies; ++k) {
      p.block(j * block_dim, k * block_dim, block_dim, block_dim) =
          w * Matrix::Identity(block_dim, block_dim);
    }
  }
  return p;
}

CompositeProblem build_product_problem(const FiniteSumProblem& fs) {
  if (fs.components < 1) throw std::invalid_argument("build_product_problem: need n >= 1");
  const int n = fs.components;
  const int dh = fs.dim;
  const int d = n * dh;

  CompositeProblem problem;
  problem.dim = d;
  auto shared = std::make_shared<FiniteSumProblem>(fs);
  problem.f_value = [shared, n, dh](const Vector& x) {
    double sum = 0;
    for (int j = 0; j < n; ++j) sum += shared->component_value(j, x.segment(j * dh, dh));
    return sum / n;
  };
  problem.f_gradient = [shared, n, dh, d](const Vector& x) {
    Vector g(d);
    for (int j = 0; j < n; ++j) {
      g.segment(j * dh, dh) = shared->component_gradient(j, x.segment(j * dh, dh)) / n;
    }
    return g;
  };
  problem.f_partial = [shared, n, dh](const Vector& x, int i) {
    const int j = i / dh;
    const int local = i % dh;
    return shared->component_gradient(j, x.segment(j * dh, dh))[local] / n;
  };

  Matrix m = Matrix::Zero(d, d);
  for (int j = 0; j < n; ++j) {
    m.block(j * dh, j * dh, dh, dh) = fs.component_smoothness[j] / n;
  }
  problem.smoothness = std::move(m);
  problem.strong_convexity = fs.strong_convexity / n;
  problem.projector = block_constant_projector(n, dh);
  problem.anchor = Vector::Zero(d);
  problem.psi_value = [shared, dh](const Vector& x) { return shared->psi_value(x.head(dh)); };
  // Consensus prox: average the blocks, then apply the inner prox with the
  // stepsize divided by n (the exact minimizer of the lifted prox problem).
  problem.prox = [shared, n](double stepsize, const Vector& x) {
    return lift(shared->prox(stepsize / n, block_mean(x, n)), n);
  };
  return problem;
}

Vector product_eso_vector(const Vector& v_hat, int block_dim) {
  if (block_dim < 1) throw std::invalid_argument("product_eso_vector: need block_dim >= 1");
  const int n = static_cast<int>(v_hat.size());
  const double scale = 1.0 / (static_cast<double>(n) * n);
  Vector out(static_cast<long>(n) * block_dim);
  for (int j = 0; j < n; ++j) {
    out.segment(j * block_dim, block_dim).setConstant(v_hat[j] * scale);
  }
  return out;
}

double bregman_distance(const std::function<double(const Vector&)>& f,
                        const std::function<Vector(const Vector&)>& grad,
                        const Vector& x, const Vector& y) {
  return f(x) - f(y) - grad(y).dot(x - y);
}

double subspace_strong_convexity(const Matrix& m, const Matrix& projector) {
  require_symmetric(m, "subspace_strong_convexity");
  if (projector.isIdentity(1e-12)) return smallest_eigenvalue(m);
  Matrix basis = range_basis(projector);
  if (basis.cols() == 0) return 0.0;
  Matrix restricted = basis.transpose() * m * basis;
  return smallest_eigenvalue(symmetrize(restricted));
}

}  // namespace vrcd
