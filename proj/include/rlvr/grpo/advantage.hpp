#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace rlvr::grpo {

template <typename Scalar>
using ScoreVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// (S_i - mean) / std with the population std; all zeros when the scores are
/// constant. Two-pass mean and variance.
template <typename Scalar>
ScoreVector<Scalar> normalize_advantages(const ScoreVector<Scalar>& scores) {
  using std::sqrt;
  const auto g = scores.size();
  if (g < 2) throw std::invalid_argument("group normalization needs at least two scores");
  if ((scores.array() == scores(0)).all()) return ScoreVector<Scalar>::Zero(g);
  const Scalar mean = scores.mean();
  const ScoreVector<Scalar> centered = scores.array() - mean;
  const Scalar sd = sqrt(centered.squaredNorm() / static_cast<Scalar>(g));
  return centered / sd;
}

}  // namespace rlvr::grpo
