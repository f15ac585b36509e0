#include <cmath>

#include <Eigen/Eigenvalues>

#include "ctaylor/operators.hpp"

namespace ctaylor {

DirectionSet DirectionSet::basis(std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("basis needs dimension >= 1");
  Tensor v = Tensor::zeros({dim, dim});
  for (std::size_t d = 0; d < dim; ++d) v.at({d, d}) = 1.0;
  return {std::move(v), 1.0};
}

DirectionSet DirectionSet::columns(const Tensor& sigma) {
  if (sigma.rank() != 2) throw ShapeError("sigma must be a (D, R) matrix, got " + to_string(sigma.shape()));
  const std::size_t D = sigma.dim(0);
  const std::size_t R = sigma.dim(1);
  Tensor v = Tensor::zeros({R, D});
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t d = 0; d < D; ++d) v.at({r, d}) = sigma.at({d, r});
  return {std::move(v), 1.0};
}

DirectionSet DirectionSet::sampled(Distribution dist, std::size_t samples, std::size_t dim, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  return {sample_directions(dist, samples, dim, seed), 1.0 / static_cast<double>(samples)};
}

DirectionSet DirectionSet::sampled_through(const Tensor& sigma, Distribution dist, std::size_t samples,
                                           std::uint64_t seed) {
  if (sigma.rank() != 2) throw ShapeError("sigma must be a (D, R) matrix, got " + to_string(sigma.shape()));
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  Tensor v = sample_directions(dist, samples, sigma.dim(1), seed);
  return {linear(v, sigma), 1.0 / static_cast<double>(samples)};
}

Tensor factor_weighting(const Tensor& weighting, double tol) {
  if (weighting.rank() != 2 || weighting.dim(0) != weighting.dim(1))
    throw ShapeError("weighting must be square, got " + to_string(weighting.shape()));
  const auto D = static_cast<Eigen::Index>(weighting.dim(0));
  Eigen::MatrixXd m(D, D);
  for (Eigen::Index a = 0; a < D; ++a)
    for (Eigen::Index b = 0; b < D; ++b) {
      m(a, b) = weighting.at({static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
    }
  if (!m.isApprox(m.transpose(), 1e-12)) throw std::invalid_argument("weighting matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < D; ++k) {
    if (lambda(k) < -tol * scale) throw std::invalid_argument("weighting matrix is indefinite");
    if (lambda(k) > tol * scale) keep.push_back(k);
  }
  Tensor sigma = Tensor::zeros({static_cast<std::size_t>(D), keep.size()});
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const double s = std::sqrt(lambda(keep[r]));
    for (Eigen::Index a = 0; a < D; ++a) sigma.at({static_cast<std::size_t>(a), r}) = s * eig.eigenvectors()(a, keep[r]);
  }
  return sigma;
}

}  // namespace ctaylor
