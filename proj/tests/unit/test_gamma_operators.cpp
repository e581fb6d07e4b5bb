#include "mildito/errors.hpp"
#include "mildito/gamma_operators.hpp"
#include "mildito/nemytskii.hpp"
#include "mildito/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mildito;

namespace {

Matrix gaussian_matrix(int rows, int cols, std::uint64_t index) {
    NormalStream s(99, StreamTag::instances, index);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = s.normal();
    return m;
}

}  // namespace

TEST(GammaNorm, ExactSmoothingOperatorInH) {
    // (-A)^{-0.3} truncated to 50 modes, as an operator into H.
    const Matrix cols = fractional_multipliers(FractionalIndex(-0.3), 50).asDiagonal();
    const FiniteRankGammaOperator op(cols, HilbertScale{0.0});
    EXPECT_NEAR(gamma_norm_exact(op), 0.91537408656804125, 1e-13);
}

TEST(GammaNorm, ZeroAndIdentity) {
    EXPECT_EQ(gamma_norm_exact(FiniteRankGammaOperator::zero(5, 3, HilbertScale{0.0})), 0.0);
    EXPECT_NEAR(gamma_norm_exact(FiniteRankGammaOperator::truncated_identity(10, 7)), std::sqrt(7.0), 1e-15);
    const McEstimate z = gamma_norm_mc(FiniteRankGammaOperator::zero(5, 3, LpGrid{4.0}), 100, 1);
    EXPECT_EQ(z.estimate, 0.0);
    EXPECT_EQ(z.stderr_estimate, 0.0);
}

TEST(GammaNorm, ExactNeedsHilbertCodomain) {
    EXPECT_THROW(gamma_norm_exact(FiniteRankGammaOperator::zero(8, 2, LpGrid{4.0})), UnsupportedCodomainError);
    EXPECT_NO_THROW(gamma_norm_exact(FiniteRankGammaOperator::zero(8, 2, SobolevLp{0.1, 2.0, 16})));
}

TEST(GammaNorm, MonteCarloAgreesWithExact) {
    for (int i = 0; i < 5; ++i) {
        const FiniteRankGammaOperator op(gaussian_matrix(12, 6, i), HilbertScale{-0.25 * i});
        const McEstimate mc = gamma_norm_mc(op, 10000, 5 + i);
        EXPECT_LE(std::fabs(mc.estimate - gamma_norm_exact(op)), 3.0 * mc.stderr_estimate) << i;
    }
}

TEST(GammaNorm, MonteCarloIndependentOfWorkers) {
    const FiniteRankGammaOperator op(gaussian_matrix(16, 8, 11), SobolevLp{-0.5, 4.0, 64});
    const McEstimate a = gamma_norm_mc(op, 3000, 3, 1);
    const McEstimate b = gamma_norm_mc(op, 3000, 3, 3);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.stderr_estimate, b.stderr_estimate);
}

TEST(GammaNorm, LpOfSingleColumnIsMomentTimesNorm) {
    // One column: ||g f||_{L^p(Omega; L^p)} = (E|g|^p)^{1/p} ||f||_p, but the
    // gamma-norm is the L^2(Omega) one, which equals ||f||_p exactly.
    Matrix col(64, 1);
    for (int j = 0; j < 64; ++j) col(j, 0) = std::sin(0.3 * j) + 0.5;
    const FiniteRankGammaOperator op(col, LpGrid{4.0});
    const McEstimate mc = gamma_norm_mc(op, 20000, 2);
    const double exact = lp_norm(std::span<const double>(col.data(), 64), 4.0);
    EXPECT_LE(std::fabs(mc.estimate - exact), 3.0 * mc.stderr_estimate);
}

TEST(GaussianMoment, KnownRoots) {
    EXPECT_NEAR(gaussian_abs_moment_root(2.0), 1.0, 1e-14);
    EXPECT_NEAR(gaussian_abs_moment_root(4.0), std::pow(3.0, 0.25), 1e-14);
    EXPECT_NEAR(gaussian_abs_moment_root(8.0), std::pow(105.0, 0.125), 1e-14);
    EXPECT_NEAR(gaussian_abs_moment_root(1.0), std::sqrt(2.0 / std::numbers::pi), 1e-14);
}

TEST(Ideal, IdentitySaturates) {
    const FiniteRankGammaOperator mid(gaussian_matrix(6, 4, 21), HilbertScale{0.0});
    const auto c = ideal_compose(BoundedOperator{Matrix::Identity(6, 6), 1.0}, mid, Matrix::Identity(4, 4));
    EXPECT_EQ(c.op.columns(), mid.columns());
    EXPECT_NEAR(c.check.lhs, c.check.rhs, 1e-12);
    EXPECT_TRUE(c.check.holds());
}

TEST(Ideal, RandomInstancesHold) {
    for (int i = 0; i < 20; ++i) {
        const FiniteRankGammaOperator mid(gaussian_matrix(8, 5, 30 + i), HilbertScale{0.2});
        const auto left = BoundedOperator::on_hilbert_scale(gaussian_matrix(8, 8, 60 + i), 0.2);
        const auto c = ideal_compose(left, mid, gaussian_matrix(5, 5, 90 + i));
        EXPECT_TRUE(c.check.holds()) << i;
    }
}

TEST(Ideal, ShapeErrors) {
    const FiniteRankGammaOperator mid(gaussian_matrix(4, 3, 1), HilbertScale{0.0});
    EXPECT_THROW(ideal_compose(BoundedOperator{Matrix::Identity(5, 5), 1.0}, mid, Matrix::Identity(3, 3)),
                 DomainError);
    EXPECT_THROW(ideal_compose(BoundedOperator{Matrix::Identity(4, 4), 1.0}, mid, Matrix::Identity(2, 2)),
                 DomainError);
}

TEST(Bilinear, InnerProductGivesHilbertSchmidtSquare) {
    const FiniteRankGammaOperator op(gaussian_matrix(7, 5, 40), HilbertScale{0.0});
    const auto s = bilinear_sum(BilinearForm::inner_product(), op, op);
    EXPECT_NEAR(s.value[0], op.columns().squaredNorm(), 1e-12);
    const auto z = bilinear_sum(BilinearForm::inner_product(), op, op.scaled(0.0));
    EXPECT_EQ(z.value[0], 0.0);
}

TEST(Bilinear, RotationInvariance) {
    const FiniteRankGammaOperator a(gaussian_matrix(6, 4, 41), HilbertScale{0.0});
    const FiniteRankGammaOperator b(gaussian_matrix(6, 4, 42), HilbertScale{0.0});
    const auto beta = BilinearForm::from_matrices({gaussian_matrix(6, 6, 43), gaussian_matrix(6, 6, 44)});
    Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(4, 4, 45));
    const Matrix q = qr.householderQ();
    const auto s1 = bilinear_sum(beta, a, b);
    const auto s2 = bilinear_sum(beta, FiniteRankGammaOperator(a.columns() * q, a.codomain()),
                                 FiniteRankGammaOperator(b.columns() * q, b.codomain()));
    EXPECT_LT((s1.value - s2.value).norm(), 1e-10);
    EXPECT_TRUE(s1.check.holds());
}

TEST(Smoothing, BoundHoldsForCriterionPairs) {
    for (double r : {0.3, 0.5})
        for (double p : {2.0, 4.0}) {
            const auto s = smoothing_gamma_bound(FractionalIndex(r), p, 50, 4000, 7);
            EXPECT_TRUE(s.holds()) << r << " " << p;
        }
}

TEST(Smoothing, DivergentExponent) {
    EXPECT_THROW(smoothing_gamma_bound(FractionalIndex(0.25), 2.0, 10, 10, 1), DivergenceError);
    EXPECT_THROW(smoothing_gamma_bound(FractionalIndex(0.3), 1.5, 10, 10, 1), DomainError);
}

TEST(Embedding, BoundaryExcluded) {
    EXPECT_THROW(iota_embedding(FractionalIndex(0.0), FractionalIndex(-0.25), 4.0, 10), DivergenceError);
    try {
        iota_embedding(FractionalIndex(0.05), FractionalIndex(-0.2), 4.0, 10);
        FAIL();
    } catch (const DivergenceError& e) {
        EXPECT_NE(std::string(e.what()).find("β + ε < −¼"), std::string::npos);
    }
}

TEST(Embedding, BoundHolds) {
    for (auto [eps, beta] : {std::pair{0.0, -0.5}, std::pair{0.05, -0.35}}) {
        const auto e = iota_embedding(FractionalIndex(eps), FractionalIndex(beta), 4.0, 50);
        EXPECT_TRUE(e.check({4000, 3, 1}).holds()) << eps;
    }
}

TEST(Embedding, HilbertCaseIsExact) {
    const auto e = iota_embedding(FractionalIndex(0.0), FractionalIndex(-0.5), 2.0, 20);
    const BoundCheck c = e.check({});
    // ||(-A)^{-1/2}||_HS = pi^{-1} sqrt(sum n^{-2}) over the first 20 modes.
    double sum = 0.0;
    for (int n = 1; n <= 20; ++n) sum += 1.0 / (n * n);
    EXPECT_NEAR(c.lhs, std::sqrt(sum) / std::numbers::pi, 1e-13);
    EXPECT_EQ(c.stderr_lhs, 0.0);
}

TEST(Multiplication, ConstantOneIsIdentity) {
    const auto M = multiplication_operator(GridFunction::constant(1.0, 128), FractionalIndex(-0.5), 4.0, 16);
    Vector c = Vector::LinSpaced(16, 1.0, -1.0);
    const SineBasisVector u(c);
    EXPECT_LT((M.apply(u).coeffs() - c).norm(), 1e-12);
    EXPECT_LE(hr_norm(M.apply(u), FractionalIndex(-0.5)), hr_norm(u, FractionalIndex(0.0)));
    const auto Z = multiplication_operator(GridFunction::constant(0.0, 128), FractionalIndex(-0.5), 4.0, 16);
    EXPECT_EQ(Z.apply(u).coeffs().norm(), 0.0);
}

TEST(Multiplication, BoundWithEstimatedConstant) {
    const GridFunction v = random_grid_function(128, 5, 1, 1.0);
    const auto M = multiplication_operator(v, FractionalIndex(-0.5), 4.0, 16);
    const double C = M.sobolev_constant(2000, 1);
    for (int i = 0; i < 5; ++i) {
        const SineBasisVector u(gaussian_matrix(16, 1, 70 + i).col(0));
        EXPECT_TRUE(M.check(u, C).holds());
    }
}

TEST(Multiplication, Hypotheses) {
    EXPECT_THROW(multiplication_operator(GridFunction::constant(1.0, 8), FractionalIndex(-0.5), 2.0, 4),
                 DomainError);
    EXPECT_THROW(multiplication_operator(GridFunction::constant(1.0, 8), FractionalIndex(-0.1), 4.0, 4),
                 DomainError);
}

TEST(Sobolev, ConstantIsAtLeastUnitRatios) {
    // For e_1 the ratio is ||e_1||_q / rho_1^s exactly.
    const double C = estimate_sobolev_constant(0.5, 4.0, 8, 256, 0, 1);
    const double e1 = 1.1066819197003216 / std::pow(std::numbers::pi * std::numbers::pi, 0.5);
    EXPECT_GE(C, e1 - 1e-12);
}
