#include "vrcd/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace vrcd {

namespace {

void require_distribution(const Vector& probs, const char* what) {
  if (probs.size() == 0) throw std::invalid_argument(std::string(what) + ": empty distribution");
  for (int i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0)) throw std::invalid_argument(std::string(what) + ": probabilities must be positive");
  }
  if (std::abs(probs.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string(what) + ": probabilities must sum to 1");
  }
}

Vector prefix_sums(const Vector& probs) {
  Vector cum(probs.size());
  double acc = 0;
  for (int i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cum[i] = acc;
  }
  return cum;
}

}  // namespace

BlockSampler BlockSampler::single_coordinate(Vector probabilities) {
  require_distribution(probabilities, "single_coordinate");
  BlockSampler s;
  s.scheme_ = Scheme::SingleCoordinate;
  s.dim_ = static_cast<int>(probabilities.size());
  s.n_groups_ = s.dim_;
  s.block_dim_ = 1;
  s.marginals_ = probabilities;
  s.cumulative_ = prefix_sums(probabilities);
  s.atom_probs_ = std::move(probabilities);
  return s;
}

BlockSampler BlockSampler::single_block(int groups, int block_dim, Vector group_probabilities) {
  if (groups < 1 || block_dim < 1) throw std::invalid_argument("single_block: bad shape");
  if (group_probabilities.size() != groups) {
    throw std::invalid_argument("single_block: group probability count mismatch");
  }
  require_distribution(group_probabilities, "single_block");
  BlockSampler s;
  s.scheme_ = Scheme::SingleBlock;
  s.dim_ = groups * block_dim;
  s.n_groups_ = groups;
  s.block_dim_ = block_dim;
  s.marginals_ = Vector(s.dim_);
  for (int j = 0; j < groups; ++j) {
    s.marginals_.segment(j * block_dim, block_dim).setConstant(group_probabilities[j]);
  }
  s.cumulative_ = prefix_sums(group_probabilities);
  s.atom_probs_ = std::move(group_probabilities);
  return s;
}

BlockSampler BlockSampler::independent(Vector inclusion_probabilities) {
  const int d = static_cast<int>(inclusion_probabilities.size());
  if (d < 1) throw std::invalid_argument("independent: empty distribution");
  if (d > 20) throw std::invalid_argument("independent: dimension too large to enumerate");
  for (int i = 0; i < d; ++i) {
    if (!(inclusion_probabilities[i] > 0) || inclusion_probabilities[i] > 1) {
      throw std::invalid_argument("independent: inclusion probabilities must lie in (0,1]");
    }
  }
  BlockSampler s;
  s.scheme_ = Scheme::Independent;
  s.dim_ = d;
  s.n_groups_ = d;
  s.block_dim_ = 1;
  s.marginals_ = inclusion_probabilities;
  s.atom_probs_ = std::move(inclusion_probabilities);
  return s;
}

double BlockSampler::expected_size() const { return marginals_.sum(); }

int BlockSampler::draw_atom(Rng& rng) const {
  const double u = rng.uniform();
  const double* begin = cumulative_.data();
  const double* end = begin + cumulative_.size();
  const double* it = std::upper_bound(begin, end, u);
  int idx = static_cast<int>(it - begin);
  if (idx >= cumulative_.size()) idx = static_cast<int>(cumulative_.size()) - 1;
  return idx;
}

SampleDraw BlockSampler::sample(Rng& rng) const {
  SampleDraw draw;
  switch (scheme_) {
    case Scheme::SingleCoordinate: {
      const int i = draw_atom(rng);
      draw.coords = {i};
      draw.group = i;
      break;
    }
    case Scheme::SingleBlock: {
      const int j = draw_atom(rng);
      draw.coords.resize(block_dim_);
      std::iota(draw.coords.begin(), draw.coords.end(), j * block_dim_);
      draw.group = j;
      break;
    }
    case Scheme::Independent: {
      for (int i = 0; i < dim_; ++i) {
        if (rng.uniform() < atom_probs_[i]) draw.coords.push_back(i);
      }
      break;
    }
  }
  return draw;
}

std::vector<SampleOutcome> BlockSampler::enumerate_outcomes() const {
  std::vector<SampleOutcome> outcomes;
  switch (scheme_) {
    case Scheme::SingleCoordinate:
      outcomes.reserve(dim_);
      for (int i = 0; i < dim_; ++i) {
        outcomes.push_back({atom_probs_[i], {i}, i});
      }
      break;
    case Scheme::SingleBlock:
      outcomes.reserve(n_groups_);
      for (int j = 0; j < n_groups_; ++j) {
        SampleOutcome out;
        out.prob = atom_probs_[j];
        out.group = j;
        out.coords.resize(block_dim_);
        std::iota(out.coords.begin(), out.coords.end(), j * block_dim_);
        outcomes.push_back(std::move(out));
      }
      break;
    case Scheme::Independent: {
      const int total = 1 << dim_;
      outcomes.reserve(total);
      for (int mask = 0; mask < total; ++mask) {
        SampleOutcome out;
        out.prob = 1.0;
        for (int i = 0; i < dim_; ++i) {
          if (mask & (1 << i)) {
            out.prob *= atom_probs_[i];
            out.coords.push_back(i);
          } else {
            out.prob *= 1.0 - atom_probs_[i];
          }
        }
        outcomes.push_back(std::move(out));
      }
      break;
    }
  }
  return outcomes;
}

Vector importance_probabilities(const Vector& m_diag, const Vector& w_diag) {
  if (m_diag.size() != w_diag.size() || m_diag.size() == 0) {
    throw std::invalid_argument("importance_probabilities: size mismatch");
  }
  Vector product(m_diag.size());
  for (int i = 0; i < m_diag.size(); ++i) {
    if (m_diag[i] < 0 || w_diag[i] < 0) {
      throw std::invalid_argument("importance_probabilities: entries must be nonnegative");
    }
    product[i] = m_diag[i] * w_diag[i];
  }
  const double total = product.sum();
  if (!(total > 0)) {
    throw std::invalid_argument("importance_probabilities: all products are zero");
  }
  return product / total;
}

bool coin(double rho, Rng& rng) {
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw std::invalid_argument("coin: rho must lie in (0,1)");
  }
  return rng.uniform() < rho;
}

}  // namespace vrcd
