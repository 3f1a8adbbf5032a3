#pragma once

#include <anosovlab/core.hpp>

#include <cmath>
#include <random>

namespace testutil {

using anosovlab::MatR;
using anosovlab::MatC;

// Gaussian matrix rescaled to |det| = 1, sign of det fixed positive.
inline MatR random_sl(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  MatR g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = n01(rng);
  double det = g.determinant();
  if (det < 0) {
    g.row(0) *= -1.0;
    det = -det;
  }
  return g / std::pow(det, 1.0 / d);
}

inline MatC random_slc(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  MatC g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = {n01(rng), n01(rng)};
  const auto det = g.determinant();
  return g / std::pow(det, 1.0 / d);
}

inline MatR random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  MatR g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = n01(rng);
  Eigen::HouseholderQR<MatR> qr(g);
  return qr.householderQ() * MatR::Identity(d, d);
}

inline MatC random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  MatC g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = {n01(rng), n01(rng)};
  Eigen::HouseholderQR<MatC> qr(g);
  return qr.householderQ() * MatC::Identity(d, d);
}

}  // namespace testutil
