#include "mildito/errors.hpp"
#include "mildito/mild_calculus.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace mildito;

namespace {

constexpr double kOuSecondMoment = 0.074732632675525755;  // sum_{n<=32} (1 - e^{-2 rho_n T}) / (2 rho_n), T = 0.1

MildItoProcessSpec deterministic(EvolutionKind kind, int N) {
    Vector x0 = Vector::LinSpaced(N, 1.0, 0.2);
    return MildItoProcessSpec{EvolutionFamily(kind, N, 0.0, 0.1), SineBasisVector(x0), DriftMap::zero(),
                              DiffusionMap::zero(), 2};
}

MildItoProcessSpec nemytskii_drift(int N) {
    auto spec = ou_spec(N, N, 0.0, 0.1);
    spec.drift = DriftMap::nemytskii(field_by_name("tanh"), N, 64);
    Vector x0 = Vector::Zero(N);
    x0[0] = 1.0;
    spec.initial = SineBasisVector(x0);
    return spec;
}

}  // namespace

TEST(TestFunctions, DerivativesMatchFiniteDifferences) {
    const int N = 6;
    const Vector x = Vector::LinSpaced(N, 0.4, -0.3);
    const Vector h1 = Vector::LinSpaced(N, 0.1, 0.7);
    const Vector h2 = Vector::LinSpaced(N, -0.5, 0.2);
    const double e = 1e-5;
    for (const auto& name : test_function_names()) {
        const auto phi = test_function_by_name(name, N, "tanh", 64);
        const Vector fd1 = (phi->value(x + e * h1) - phi->value(x - e * h1)) / (2 * e);
        EXPECT_LT((fd1 - phi->first(x, h1)).norm(), 1e-7) << name;
        const Vector fd2 = (phi->first(x + e * h2, h1) - phi->first(x - e * h2, h1)) / (2 * e);
        EXPECT_LT((fd2 - phi->second(x, h1, h2)).norm(), 1e-7) << name;
    }
    EXPECT_THROW(test_function_by_name("cubic", N), DomainError);
}

TEST(TestFunctions, TraceIsSumOverColumns) {
    const auto phi = smoothed_norm();
    const Vector x = Vector::LinSpaced(4, 1.0, 2.0);
    Matrix z(4, 3);
    z.setRandom();
    Vector expected = Vector::Zero(1);
    for (int k = 0; k < 3; ++k) expected += phi->second(x, z.col(k), z.col(k));
    EXPECT_LT((phi->trace(x, z) - expected).norm(), 1e-13);
}

TEST(Stopping, Rules) {
    const auto spec = ou_spec(4, 4, 0.0, 0.1);
    const TimeGrid g(0.0, 0.1, 10);
    SamplePath path = simulate(spec, g, wiener_sample(g, 4, 1, 0));
    regularize(spec, g, path);
    EXPECT_EQ(stopping_sample(StoppingRule::terminal(), path), 10);
    EXPECT_EQ(stopping_sample(StoppingRule::hitting(0.0), path), 0);
    EXPECT_EQ(stopping_sample(StoppingRule::hitting(std::numeric_limits<double>::infinity()), path), 10);
    EXPECT_THROW(StoppingRule::hitting(-1.0), DomainError);
}

TEST(Kolmogorov, LinearAndQuadraticStructure) {
    const EvolutionFamily heat(EvolutionKind::heat_semigroup, 4, 0.0, 0.1);
    const Vector x = Vector::LinSpaced(4, 1.0, 0.5), y = Vector::LinSpaced(4, -1.0, 1.0);
    Matrix z(4, 2);
    z.setRandom();
    const auto sq = squared_norm();
    const Vector no_noise = kolmogorov_apply(heat, 0.02, 0.1, *sq, x, y, Matrix::Zero(4, 2));
    const Vector base = kolmogorov_apply(heat, 0.02, 0.1, *sq, x, y, z);
    const Vector scaled = kolmogorov_apply(heat, 0.02, 0.1, *sq, x, y, 3.0 * z);
    EXPECT_NEAR((scaled - no_noise)[0], 9.0 * (base - no_noise)[0], 1e-12);
    const Vector doubled_y = kolmogorov_apply(heat, 0.02, 0.1, *sq, x, 2.0 * y, Matrix::Zero(4, 2));
    const Vector drift_only = kolmogorov_apply(heat, 0.02, 0.1, *sq, x, Vector::Zero(4), Matrix::Zero(4, 2));
    EXPECT_NEAR((doubled_y - drift_only)[0], 2.0 * (no_noise - drift_only)[0], 1e-12);

    const auto lin = coordinate_functional({1});
    const Vector a = kolmogorov_apply(heat, 0.02, 0.1, *lin, x, y, z);
    const Vector b = kolmogorov_apply(heat, 0.02, 0.1, *lin, x, y, Matrix::Zero(4, 2));
    EXPECT_EQ(a, b);
    EXPECT_THROW(kolmogorov_apply(heat, 0.1, 0.1, *lin, x, y, z), DomainError);
}

TEST(ItoResidual, DeterministicIsZero) {
    const TimeGrid g(0.0, 0.1, 50);
    for (auto kind : {EvolutionKind::heat_semigroup, EvolutionKind::identity}) {
        const auto spec = deterministic(kind, 5);
        for (const auto& name : test_function_names()) {
            const auto phi = test_function_by_name(name, 5, "tanh", 64);
            EXPECT_LT(ito_residual(*phi, spec, g, wiener_sample(g, 2, 1, 0)).cwiseAbs().maxCoeff(), 1e-10) << name;
        }
    }
}

TEST(ItoResidual, LinearIsZero) {
    const TimeGrid g(0.0, 0.1, 40);
    const auto lin = coordinate_functional({1, 3});
    for (const auto& spec : {ou_spec(8, 8, 0.0, 0.1), nemytskii_drift(8)}) {
        for (std::uint64_t p = 0; p < 3; ++p)
            EXPECT_LT(ito_residual(*lin, spec, g, wiener_sample(g, 8, 1, p)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(ItoResidual, SelfConvergence) {
    const TimeGrid g(0.0, 0.1, 400);
    const auto sq = squared_norm();
    for (const auto& spec : {ou_spec(32, 32, 0.0, 0.1), nemytskii_drift(32)}) {
        const auto c = ito_self_convergence(*sq, spec, g, {100, 200, 400}, MonteCarlo{200, 1, 1});
        EXPECT_GE(c.order, 0.4);
        EXPECT_GT(c.rms[0], c.rms[2]);
    }
}

TEST(StandardIto, TimeAndLinear) {
    const TimeGrid g(0.0, 0.1, 30);
    auto spec = nemytskii_drift(6);
    spec.family = EvolutionFamily(EvolutionKind::identity, 6, 0.0, 0.1);
    const WienerPath w = wiener_sample(g, 6, 2, 0);
    EXPECT_LT(std::fabs(standard_ito_residual(*time_identity(), spec, g, w)[0]), 1e-12);
    EXPECT_LT(std::fabs(standard_ito_residual(*from_autonomous(coordinate_functional({1})), spec, g, w)[0]), 1e-10);
    EXPECT_THROW(standard_ito_residual(*time_identity(), ou_spec(6, 6, 0.0, 0.1), g, w), DomainError);
}

TEST(Dynkin, DeterministicExact) {
    const TimeGrid g(0.0, 0.1, 20);
    const auto spec = deterministic(EvolutionKind::heat_semigroup, 4);
    const auto sq = squared_norm();
    const auto d = dynkin_gap(*sq, spec, g, StoppingRule::terminal(), MonteCarlo{4, 1, 1});
    const double exact = EvolutionFamily(EvolutionKind::heat_semigroup, 4, 0.0, 0.1)
                             .multipliers(0.0, 0.1)
                             .cwiseProduct(spec.initial.coeffs())
                             .squaredNorm();
    EXPECT_NEAR(d.lhs[0], exact, 1e-14);
    EXPECT_NEAR(d.rhs[0], exact, 1e-14);
}

TEST(Dynkin, OuSecondMoment) {
    const TimeGrid g(0.0, 0.1, 100);
    const auto sq = squared_norm();
    const auto d = dynkin_gap(*sq, ou_spec(32, 32, 0.0, 0.1), g, StoppingRule::terminal(), MonteCarlo{4000, 1, 1});
    // The quadrature makes the right side exactly the closed form.
    EXPECT_NEAR(d.rhs[0], kOuSecondMoment, 1e-12);
    EXPECT_LE(std::fabs(d.lhs[0] - kOuSecondMoment), std::max(3.0 * d.stderr_lhs[0], 0.01 * kOuSecondMoment));
    EXPECT_TRUE(d.holds());
    EXPECT_TRUE(d.martingale_holds());
}

TEST(Dynkin, WorkerCountDoesNotMatter) {
    const TimeGrid g(0.0, 0.1, 40);
    const auto sq = squared_norm();
    const auto spec = nemytskii_drift(8);
    const auto a = dynkin_gap(*sq, spec, g, StoppingRule::hitting(0.8), MonteCarlo{50, 3, 1});
    const auto b = dynkin_gap(*sq, spec, g, StoppingRule::hitting(0.8), MonteCarlo{50, 3, 4});
    EXPECT_EQ(a.lhs, b.lhs);
    EXPECT_EQ(a.rhs, b.rhs);
    EXPECT_EQ(a.stderr_gap, b.stderr_gap);
    EXPECT_EQ(a.tolerance_factor, 5.0);
}

TEST(Weak, DeterministicEquality) {
    const TimeGrid g(0.0, 0.1, 20);
    const auto e = weak_estimate_gap(*squared_norm(), deterministic(EvolutionKind::heat_semigroup, 4), g,
                                     MonteCarlo{2, 1, 1});
    EXPECT_NEAR(e.slack, 0.0, 1e-12);
}

TEST(Weak, SlackNonNegative) {
    const TimeGrid g(0.0, 0.1, 40);
    const auto ou = weak_estimate_gap(*squared_norm(), ou_spec(16, 16, 0.0, 0.1), g, MonteCarlo{500, 1, 1});
    EXPECT_TRUE(ou.holds());
    EXPECT_LE(std::fabs(ou.slack), 3.0 * ou.stderr_slack + 1e-12);
    const auto lin = weak_estimate_gap(*coordinate_functional({1}), nemytskii_drift(8), g, MonteCarlo{500, 1, 1});
    EXPECT_TRUE(lin.holds());
    EXPECT_TRUE(lin.moments.finite());
}
