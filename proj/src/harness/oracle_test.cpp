#include "ctaylor/oracle.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "ctaylor/jet.hpp"
#include "test_util.hpp"

namespace ctaylor {
namespace {

Program scalar_fn(UnaryFn fn) {
  Program p;
  p.set_output(p.unary(fn, p.input()));
  return p;
}

TEST(Oracle, HalfSquareNormHessianIsIdentity) {
  Tensor h = oracle_derivative(testing::half_square_norm(3), testing::random_point(3, 1), 2);
  ASSERT_EQ(h.shape(), (Shape{1, 3, 3}));
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) EXPECT_DOUBLE_EQ(h.at({0, a, b}), a == b ? 1.0 : 0.0);
}

TEST(Oracle, BilinearHessian) {
  Tensor h = oracle_derivative(testing::monomial({1, 1}), Tensor::vector({0.3, 2.0}), 2);
  EXPECT_TRUE(h.identical(Tensor({1, 2, 2}, {0, 1, 1, 0})));
}

TEST(Oracle, MixedPartialsAreSymmetric) {
  const std::size_t D = 3;
  Program mlp = testing::random_tanh_mlp(D, 31);
  Tensor x = testing::random_point(D, 2);
  Tensor a = oracle_entry(mlp, x, {0, 1, 2, 2});
  for (const std::vector<std::size_t>& idx : std::vector<std::vector<std::size_t>>{{2, 1, 0, 2}, {2, 2, 1, 0}})
    EXPECT_LT(relative_error(oracle_entry(mlp, x, idx), a), 1e-8);
}

TEST(Oracle, FourthDerivativeAgreesWithFiniteDifferences) {
  const std::size_t D = 3;
  Program mlp = testing::random_tanh_mlp(D, 32);
  Tensor x = testing::random_point(D, 3);
  Tensor v = testing::random_point(D, 4);
  for (int k = 1; k <= 4; ++k) {
    Tensor exact = inner(oracle_derivative(mlp, x, k), outer_power(v, k));
    EXPECT_LT(relative_error(finite_difference(mlp, x, v, k), exact), 1e-4) << k;
  }
}

TEST(FiniteDifference, ScalarFunctions) {
  EXPECT_NEAR(finite_difference(scalar_fn(UnaryFn::Sin), Tensor::vector({0}), Tensor::vector({1}), 1)[0], 1.0, 1e-8);
  EXPECT_NEAR(finite_difference(scalar_fn(UnaryFn::Exp), Tensor::vector({0}), Tensor::vector({1}), 4)[0], 1.0, 1e-4);
}

TEST(FiniteDifference, MatchesJetTopCoefficient) {
  const std::size_t D = 4;
  Program mlp = testing::random_tanh_mlp(D, 33);
  Tensor x = testing::random_point(D, 5);
  Tensor v = testing::random_point(D, 6);
  Jet out = jet_eval(mlp, directional_jet(x, stack(std::vector<Tensor>{v}), 3));
  EXPECT_LT(relative_error(finite_difference(mlp, x, v, 3), out.coeff(3).row(0)), 1e-4);
}

TEST(Oracle, PrimalAndErrors) {
  Program mlp = testing::random_tanh_mlp(3, 1);
  Tensor x = testing::random_point(3, 1);
  Jet out = jet_eval(mlp, directional_jet(x, stack(std::vector<Tensor>{x}), 1));
  EXPECT_LT(relative_error(evaluate_program(mlp, x), out.primal), 1e-14);
  EXPECT_THROW(oracle_derivative(mlp, x, 0), std::out_of_range);
  EXPECT_THROW(oracle_derivative(mlp, x, 5), std::out_of_range);
  EXPECT_THROW(oracle_derivative(mlp, Tensor::matrix(1, 3, {1, 2, 3}), 2), ShapeError);
  EXPECT_THROW(oracle_entry(mlp, x, {0, 3}), std::out_of_range);
  EXPECT_THROW(finite_difference(mlp, x, Tensor::vector({1}), 2), ShapeError);
}

}  // namespace
}  // namespace ctaylor
