#include "orex/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "orex/regpath.hpp"

namespace orex::oracle {

namespace {

constexpr double kStepCap = 1e6;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Per-sample generator: sample j depends only on (seed, j), which makes
// budgets nestable and the merge-by-max reduction order-free.
std::mt19937_64 stream(std::uint64_t seed, std::int64_t j) {
  return std::mt19937_64(
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(j) + 1)));
}

Vector gaussian_direction(std::mt19937_64& rng, Index dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector u(dim);
  for (Index i = 0; i < dim; ++i) u(i) = gauss(rng);
  const double norm = u.norm();
  return norm > 0.0 ? Vector(u / norm) : Vector(Vector::Unit(dim, 0));
}

// Largest t >= 0 with |base + t dir|^2 <= 1 for one quadratic constraint.
double max_step(const Vector& base, const Vector& dir) {
  const double a = dir.squaredNorm();
  const double b = 2.0 * base.dot(dir);
  const double c = base.squaredNorm() - 1.0;
  if (a <= 0.0) {
    if (b <= 0.0) return kStepCap;
    return std::max(0.0, -c / b);
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc <= 0.0) return 0.0;
  return std::max(0.0, (-b + std::sqrt(disc)) / (2.0 * a));
}

}  // namespace

std::vector<Vector> sample_feasible(const CompoundOperators& ops,
                                    const Vector& y,
                                    const SampleBudget& budget) {
  if (budget.count < 1) throw InvalidInputError("sample budget must be >= 1");

  const BalancedPoint anchor = balanced_regularizer(ops, y);
  const Vector r_anchor = ops.r() * anchor.f;
  const Vector s_anchor = ops.s() * anchor.f;
  const double margin = 1.0 + 1e-9;
  if (r_anchor.norm() > margin || s_anchor.norm() > margin) {
    return {};  // empty feasible set (within the anchor's reach)
  }

  const Index k = ops.kernel_dim();
  std::vector<Vector> samples;
  samples.reserve(static_cast<std::size_t>(budget.count));
  if (k == 0) {
    samples.assign(static_cast<std::size_t>(budget.count), anchor.f);
    return samples;
  }

  const double radial_exp = 1.0 / static_cast<double>(k);
  for (std::int64_t j = 0; j < budget.count; ++j) {
    auto rng = stream(budget.seed, j);
    const Vector u = gaussian_direction(rng, k);
    const Vector dir = ops.kernel_basis() * u;
    const double t_max = std::min({max_step(r_anchor, ops.r() * dir),
                                   max_step(s_anchor, ops.s() * dir),
                                   kStepCap});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double t = t_max * std::pow(unif(rng), radial_exp);
    samples.push_back(anchor.f + t * dir);
  }
  return samples;
}

double sampled_lwce(const CompoundOperators& ops, const Vector& y,
                    const Vector& z, const SampleBudget& budget) {
  double worst = 0.0;
  for (const Vector& f : sample_feasible(ops, y, budget)) {
    worst = std::max(worst, (ops.q_tilde() * f - z).norm());
  }
  return worst;
}

double sampled_gwce(const Matrix& map_matrix, const CompoundOperators& ops,
                    const SampleBudget& budget) {
  if (map_matrix.cols() != ops.data_dim() ||
      map_matrix.rows() != ops.out_dim()) {
    throw InvalidInputError("sampled_gwce: map dimensions mismatch");
  }
  const Index d = ops.dim();
  const double radial_exp = 1.0 / static_cast<double>(d);
  double worst = 0.0;
  for (std::int64_t j = 0; j < budget.count; ++j) {
    auto rng = stream(budget.seed, j);
    const Vector u = gaussian_direction(rng, d);
    const double rn = (ops.r() * u).norm();
    const double sn = (ops.s() * u).norm();
    double t_max = kStepCap;
    if (rn > 0.0) t_max = std::min(t_max, 1.0 / rn);
    if (sn > 0.0) t_max = std::min(t_max, 1.0 / sn);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Vector f = (t_max * std::pow(unif(rng), radial_exp)) * u;
    const double err =
        (ops.q_tilde() * f - map_matrix * (ops.lambda() * f)).norm();
    worst = std::max(worst, err);
  }
  return worst;
}

double sampled_half_diameter(const CompoundOperators& ops, const Vector& y,
                             const SampleBudget& budget) {
  const std::vector<Vector> samples = sample_feasible(ops, y, budget);
  if (samples.empty()) return 0.0;

  std::vector<Vector> images;
  images.reserve(samples.size());
  Vector mean = Vector::Zero(ops.out_dim());
  for (const Vector& f : samples) {
    images.push_back(ops.q_tilde() * f);
    mean += images.back();
  }
  mean /= static_cast<double>(images.size());

  // Farthest-point passes give a valid diameter lower bound.
  Vector pivot = mean;
  double best = 0.0;
  for (int pass = 0; pass < 3; ++pass) {
    double far_dist = -1.0;
    const Vector* far = &images.front();
    for (const Vector& img : images) {
      const double d = (img - pivot).norm();
      if (d > far_dist) {
        far_dist = d;
        far = &img;
      }
    }
    if (pass > 0) best = std::max(best, far_dist);
    pivot = *far;
  }
  return 0.5 * best;
}

}  // namespace orex::oracle
