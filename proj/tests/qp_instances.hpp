#pragma once

#include <random>

#include "isqp/qp_solver.hpp"
#include "oracles.hpp"

namespace testing_support {

inline oracle::Mat rows(const isqp::Matrix& m) {
  oracle::Mat out(m.rows(), oracle::Vec(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

// Strictly convex QP with n <= 3, m <= 4 and b >= 0. Some right-hand sides
// are exactly zero so that degenerate vertices at d = 0 occur.
inline isqp::QpInstance random_qp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nd(1, 3), md(0, 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.0, 2.0), coin(0.0, 1.0);
  const int n = nd(rng), m = md(rng);
  isqp::Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = u(rng);
  isqp::Matrix h = g.transpose() * g;
  for (int i = 0; i < n; ++i) h(i, i) += 0.1 + pos(rng);
  isqp::QpInstance inst;
  inst.H = h;
  inst.grad.resize(n);
  for (auto& v : inst.grad) v = 3.0 * u(rng);
  inst.A = isqp::Matrix(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) inst.A(i, j) = u(rng);
  inst.b.resize(m);
  for (auto& v : inst.b) v = coin(rng) < 0.25 ? 0.0 : pos(rng);
  return inst;
}

}  // namespace testing_support
