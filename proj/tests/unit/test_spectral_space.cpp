#include "mildito/errors.hpp"
#include "mildito/spectral_space.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace mildito;
using std::numbers::pi;

TEST(Eigen, Values) {
    EXPECT_NEAR(eigenvalue(1), 9.8696044010893586, 1e-14);
    EXPECT_NEAR(eigenvalue(2), 4.0 * pi * pi, 1e-13);
    EXPECT_THROW(eigenvalue(0), DomainError);
}

TEST(Eigen, FunctionValues) {
    EXPECT_NEAR(eigenfunction_value(1, 0.5), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(eigenfunction_value(1, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(eigenfunction_value(2, 0.25), std::sqrt(2.0), 1e-15);
    EXPECT_THROW(eigenfunction_value(0, 0.5), DomainError);
    EXPECT_THROW(eigenfunction_value(1, 1.5), DomainError);
}

TEST(Transform, SynthesizeFirstMode) {
    const GridFunction g = synthesize(SineBasisVector::unit(1, 3), 4);
    const double x[] = {0.125, 0.375, 0.625, 0.875};
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(g[j], std::sqrt(2.0) * std::sin(pi * x[j]), 1e-15);
}

TEST(Transform, SynthesizeZeroAndLinearity) {
    const GridFunction z = synthesize(SineBasisVector::zero(5), 16);
    EXPECT_EQ(z.values().cwiseAbs().maxCoeff(), 0.0);
    const auto e1 = SineBasisVector::unit(1, 5), e2 = SineBasisVector::unit(2, 5);
    const GridFunction sum = synthesize(e1 + e2, 16);
    const GridFunction parts = synthesize(e1, 16) + synthesize(e2, 16);
    EXPECT_LT((sum.values() - parts.values()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Transform, AnalyzeInvertsSynthesize) {
    const SineBasisVector c = analyze(synthesize(SineBasisVector::unit(1, 8), 256), 8);
    EXPECT_NEAR(c[0], 1.0, 1e-10);
    for (int i = 1; i < 8; ++i) EXPECT_LE(std::fabs(c[i]), 1e-10);
    const SineBasisVector zero = analyze(GridFunction::constant(0.0, 64), 8);
    EXPECT_EQ(zero.coeffs().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Transform, RoundTripRandomCoefficients) {
    Vector c(20);
    for (int i = 0; i < 20; ++i) c[i] = std::cos(1.7 * i) / (1 + i);
    const SineTransform t(20, 64);
    const SineBasisVector back = t.analyze(t.synthesize(SineBasisVector(c)));
    EXPECT_LT((back.coeffs() - c).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Norms, Lp) {
    EXPECT_NEAR(lp_norm(GridFunction::constant(1.0, 33), 3.0), 1.0, 1e-15);
    const GridFunction g = synthesize(SineBasisVector::unit(1, 1), 256);
    EXPECT_NEAR(lp_norm(g, 2.0), 1.0, 1e-10);
    EXPECT_NEAR(lp_norm(g, 4.0), 1.1066819197003216, 1e-10);
    EXPECT_THROW(lp_norm(g, 0.5), DomainError);
}

TEST(Norms, Hr) {
    for (double r : {-0.7, 0.0, 0.3, 1.0}) {
        EXPECT_NEAR(hr_norm(SineBasisVector::unit(3, 4), FractionalIndex(r)), std::pow(9.0 * pi * pi, r), 1e-12);
    }
    Vector c(3);
    c << 3.0, 4.0, 0.0;
    EXPECT_NEAR(hr_norm(SineBasisVector(c), FractionalIndex(0.0)), 5.0, 1e-15);
    const auto v = SineBasisVector::unit(1, 2) + SineBasisVector::unit(2, 2);
    EXPECT_NEAR(hr_norm(v, FractionalIndex(0.5)), 7.0248147310407264, 1e-12);
}

TEST(Fractional, Powers) {
    const auto v = SineBasisVector::unit(1, 3) * 2.0;
    EXPECT_EQ(apply_fractional(FractionalIndex(0.0), v).coeffs(), v.coeffs());
    EXPECT_NEAR(apply_fractional(FractionalIndex(-1.0), SineBasisVector::unit(1, 3))[0], 0.10132118364233778, 1e-15);
    // (-A)^a (-A)^b = (-A)^{a+b}
    Vector c = Vector::LinSpaced(6, 1.0, -0.5);
    const SineBasisVector x(c);
    const auto lhs = apply_fractional(FractionalIndex(0.3), apply_fractional(FractionalIndex(-0.8), x));
    const auto rhs = apply_fractional(FractionalIndex(-0.5), x);
    EXPECT_LT((lhs.coeffs() - rhs.coeffs()).norm(), 1e-14);
}

TEST(Semigroup, Basics) {
    const auto v = SineBasisVector::unit(2, 4);
    EXPECT_EQ(apply_semigroup(0.0, v).coeffs(), v.coeffs());
    EXPECT_NEAR(semigroup_multiplier(1, 1.0), 5.1723186203812306e-05, 1e-18);
    EXPECT_THROW(apply_semigroup(-0.1, v), DomainError);
}

TEST(Evolution, IdentityAndHeat) {
    const SineBasisVector v(Vector::LinSpaced(5, 1.0, 2.0));
    const EvolutionFamily id(EvolutionKind::identity, 5, 0.0, 1.0);
    EXPECT_EQ(ef_apply(id, 0.2, 0.7, v).coeffs(), v.coeffs());
    const EvolutionFamily heat(EvolutionKind::heat_semigroup, 1, 0.0, 1.0);
    EXPECT_NEAR(ef_apply(heat, 0.0, 1.0, SineBasisVector::unit(1, 1))[0], 5.1723186203812306e-05, 1e-18);
}

TEST(Evolution, CompositionLaw) {
    const EvolutionFamily heat(EvolutionKind::heat_semigroup, 16, 0.0, 0.5);
    const SineBasisVector v(Vector::LinSpaced(16, 1.0, -1.0));
    EXPECT_LT(composition_residual(heat, 0.0, 0.013, 0.4, v), 1e-14);
    EXPECT_THROW(ef_apply(heat, 0.3, 0.1, v), DomainError);
    EXPECT_THROW(ef_apply(heat, 0.0, 0.9, v), DomainError);
}

TEST(Evolution, AveragedMultipliers) {
    const EvolutionFamily heat(EvolutionKind::heat_semigroup, 3, 0.0, 1.0);
    const double s = 0.1, t = 0.15;
    const Vector avg = heat.averaged_multipliers(s, t);
    const Vector rms = heat.rms_multipliers(s, t);
    for (int n = 1; n <= 3; ++n) {
        const double a = eigenvalue(n) * (t - s);
        EXPECT_NEAR(avg[n - 1], -std::expm1(-a) / a, 1e-14);
        EXPECT_NEAR(rms[n - 1], std::sqrt(-std::expm1(-2 * a) / (2 * a)), 1e-14);
    }
}
