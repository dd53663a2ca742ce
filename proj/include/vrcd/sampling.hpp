#pragma once

#include <vector>

#include "vrcd/linalg.hpp"
#include "vrcd/rng.hpp"

namespace vrcd {

struct SampleDraw {
  std::vector<int> coords;  // subset S, ascending
  int group = -1;           // component index driving the draw, when meaningful
};

struct SampleOutcome {
  double prob = 0;
  std::vector<int> coords;
  int group = -1;
};

// Random coordinate-subset sampler with declared marginals. Only schemes
// with finitely enumerable outcome sets are supported so expectations over
// S can be computed exactly. Descriptions are immutable; the Rng passed to
// sample() is owned by a single solver run.
class BlockSampler {
 public:
  // S = {i} with probability probabilities[i].
  static BlockSampler single_coordinate(Vector probabilities);
  // S = R_j (contiguous blocks of size block_dim) with probability
  // group_probabilities[j]; marginal p_i = group prob of i's block.
  static BlockSampler single_block(int groups, int block_dim, Vector group_probabilities);
  // Each coordinate included independently; enumerable up to dim <= 20.
  static BlockSampler independent(Vector inclusion_probabilities);

  int dimension() const { return dim_; }
  int groups() const { return n_groups_; }
  int block_dim() const { return block_dim_; }
  const Vector& marginals() const { return marginals_; }
  double expected_size() const;

  SampleDraw sample(Rng& rng) const;
  std::vector<SampleOutcome> enumerate_outcomes() const;

 private:
  enum class Scheme { SingleCoordinate, SingleBlock, Independent };
  Scheme scheme_ = Scheme::SingleCoordinate;
  int dim_ = 0;
  int n_groups_ = 0;
  int block_dim_ = 1;
  Vector atom_probs_;   // per-atom distribution (coordinate or group)
  Vector cumulative_;   // prefix sums of atom_probs_
  Vector marginals_;

  int draw_atom(Rng& rng) const;
};

// p_i = M_ii * W_ii / sum_j M_jj * W_jj
Vector importance_probabilities(const Vector& m_diag, const Vector& w_diag);

// Bernoulli(rho); rho must lie in (0,1).
bool coin(double rho, Rng& rng);

}  // namespace vrcd
