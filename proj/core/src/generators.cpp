#include "orex/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace orex::gen {

namespace {

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  }
  return m;
}

}  // namespace

Matrix random_orthogonal(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix the sign convention so the result is deterministic.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix random_operator(Index rows, Index cols, std::uint64_t seed,
                       double smin, double smax) {
  const Index k = std::min(rows, cols);
  std::mt19937_64 rng(seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  std::uniform_real_distribution<double> unif(smin, smax);
  Vector sv(k);
  for (Index i = 0; i < k; ++i) sv(i) = unif(rng);
  const Matrix u = random_orthogonal(rows, seed + 1);
  const Matrix v = random_orthogonal(cols, seed + 2);
  return u.leftCols(k) * sv.asDiagonal() * v.leftCols(k).transpose();
}

MultiFidelityProblem digital_twin(const TwinConfig& cfg) {
  if (cfg.m1 > cfg.m0) {
    throw InvalidInputError("digital_twin: m1 must not exceed m0");
  }
  MultiFidelityProblem p;
  p.k0.op = random_operator(cfg.n, cfg.n, cfg.seed * 7 + 1);
  p.k0.radius = cfg.eps0;
  p.k1.op = random_operator(cfg.n, cfg.n, cfg.seed * 7 + 2);
  p.k1.radius = cfg.eps1;
  p.lambda0 = random_operator(cfg.m0, cfg.n, cfg.seed * 7 + 3);
  p.lambda1 = p.lambda0.topRows(cfg.m1);
  p.q = random_operator(cfg.z, cfg.n, cfg.seed * 7 + 4);
  return p;
}

MultiFidelityProblem graph_signal(const GraphConfig& cfg) {
  if (cfg.n < 2) {
    throw InvalidInputError("graph_signal: need at least 2 vertices");
  }
  Matrix lap = Matrix::Zero(cfg.n, cfg.n);
  for (Index i = 0; i + 1 < cfg.n; ++i) {
    lap(i, i) += 1.0;
    lap(i + 1, i + 1) += 1.0;
    lap(i, i + 1) -= 1.0;
    lap(i + 1, i) -= 1.0;
  }
  return graph_signal_from(lap, cfg);
}

MultiFidelityProblem graph_signal_from(const Matrix& laplacian,
                                       const GraphConfig& cfg) {
  const Index n = laplacian.rows();
  if (n < 2 || laplacian.cols() != n) {
    throw InvalidInputError("graph_signal: Laplacian must be square, n >= 2");
  }
  if (cfg.m0 > n || cfg.m1 > n) {
    throw InvalidInputError("graph_signal: more observations than vertices");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(laplacian);
  const Vector sqrt_ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix sqrt_lap =
      es.eigenvectors() * sqrt_ev.asDiagonal() * es.eigenvectors().transpose();

  std::mt19937_64 rng(cfg.seed ^ 0x5EEDF00DULL);
  std::vector<Index> vertices(static_cast<std::size_t>(n));
  std::iota(vertices.begin(), vertices.end(), Index{0});
  std::shuffle(vertices.begin(), vertices.end(), rng);

  MultiFidelityProblem p;
  p.k0.op = sqrt_lap;
  p.k0.radius = cfg.eps0;
  p.k1.op = Matrix::Identity(n, n);
  p.k1.radius = cfg.eps1;
  p.lambda0 = Matrix::Zero(cfg.m0, n);
  for (Index i = 0; i < cfg.m0; ++i) {
    p.lambda0(i, vertices[static_cast<std::size_t>(i)]) = 1.0;
  }
  std::shuffle(vertices.begin(), vertices.end(), rng);
  p.lambda1 = Matrix::Zero(cfg.m1, n);
  for (Index i = 0; i < cfg.m1; ++i) {
    p.lambda1(i, vertices[static_cast<std::size_t>(i)]) = 1.0;
  }
  p.q = Matrix::Identity(n, n);
  return p;
}

Observation consistent_data(const MultiFidelityProblem& p, std::uint64_t seed,
                            double margin) {
  if (!(margin > 0.0 && margin < 1.0)) {
    throw InvalidInputError("consistent_data: margin must lie in (0, 1)");
  }
  const Index n = p.k0.op.cols();
  std::mt19937_64 rng(seed ^ 0xDA7ADA7AULL);

  const auto draw_inside = [&](const Matrix& op, double radius) {
    Matrix g = gaussian_matrix(n, 1, rng);
    Vector v = g.col(0);
    const double norm = (op * v).norm();
    if (norm > 0.0) {
      std::uniform_real_distribution<double> unif(0.2, 1.0);
      v *= margin * radius * unif(rng) / norm;
    }
    return v;
  };

  const Vector f0 = draw_inside(p.k0.op, p.k0.radius);
  const Vector bias = draw_inside(p.k1.op, p.k1.radius);
  const Vector f1 = f0 - bias;

  Observation y;
  y.y0 = p.lambda0 * f0;
  y.y1 = p.lambda1 * f1;
  return y;
}

CompoundOperators random_compound(Index dim, Index rows_r, Index rows_s,
                                  Index rows_lambda, Index rows_q,
                                  std::uint64_t seed, bool q_identity) {
  const Matrix r = random_operator(rows_r, dim, seed * 11 + 1);
  const Matrix s = random_operator(rows_s, dim, seed * 11 + 2);
  const Matrix lambda = random_operator(rows_lambda, dim, seed * 11 + 3);
  const Matrix q = q_identity ? Matrix(Matrix::Identity(dim, dim))
                              : random_operator(rows_q, dim, seed * 11 + 4);
  return CompoundOperators(r, s, lambda, q);
}

Vector consistent_compound_data(const CompoundOperators& ops,
                                std::uint64_t seed, double margin) {
  std::mt19937_64 rng(seed ^ 0xC0FFEEULL);
  Matrix g = gaussian_matrix(ops.dim(), 1, rng);
  Vector f = g.col(0);
  const double reach =
      std::max((ops.r() * f).norm(), (ops.s() * f).norm());
  if (reach > 0.0) {
    std::uniform_real_distribution<double> unif(0.2, 1.0);
    f *= margin * unif(rng) / reach;
  }
  return ops.lambda() * f;
}

}  // namespace orex::gen
