#include "mildito/errors.hpp"
#include "mildito/mild_process.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace mildito;

namespace {

MildItoProcessSpec process(EvolutionKind kind, int N, int K, DriftMap y, DiffusionMap z, double x1 = 0.0) {
    Vector x0 = Vector::Zero(N);
    x0[0] = x1;
    return MildItoProcessSpec{EvolutionFamily(kind, N, 0.0, 0.1), SineBasisVector(x0), std::move(y), std::move(z), K};
}

}  // namespace

TEST(TimeGrid, NodesAndCoarsening) {
    const TimeGrid g(0.0, 0.1, 400);
    EXPECT_EQ(g.node(0), 0.0);
    EXPECT_EQ(g.node(400), 0.1);
    EXPECT_NEAR(g.dt(), 2.5e-4, 1e-18);
    EXPECT_EQ(g.coarsened(4).steps(), 100);
    EXPECT_THROW(g.coarsened(3), DomainError);
    EXPECT_THROW(TimeGrid(0.2, 0.1, 4), DomainError);
    EXPECT_THROW(g.node(401), DomainError);
}

TEST(Wiener, Moments) {
    const TimeGrid g(0.0, 1.0, 1000);
    double sum = 0.0, sq = 0.0;
    for (std::uint64_t p = 0; p < 100; ++p) {
        const WienerPath w = wiener_sample(g, 1, 3, p);
        sum += w.increments().sum();
        sq += w.increments().squaredNorm();
    }
    const double n = 1e5, dt = g.dt();
    EXPECT_LE(std::fabs(sum / n), 3.0 * std::sqrt(dt / n));
    EXPECT_LE(std::fabs(sq / n - dt), 3.0 * dt * std::sqrt(2.0 / n));
}

TEST(Wiener, Deterministic) {
    const TimeGrid g(0.0, 0.1, 20);
    const WienerPath a = wiener_sample(g, 7, 5, 12), b = wiener_sample(g, 7, 5, 12), c = wiener_sample(g, 7, 5, 13);
    EXPECT_EQ(a.increments(), b.increments());
    EXPECT_NE(a.increments(), c.increments());
}

TEST(Wiener, PrefixStableInK) {
    // Adding noise modes does not change the existing ones.
    const TimeGrid g(0.0, 0.1, 10);
    const WienerPath a = wiener_sample(g, 5, 1, 0), b = wiener_sample(g, 9, 1, 0);
    EXPECT_EQ(a.increments(), b.increments().topRows(5));
}

TEST(Wiener, CoarsenSumsIncrements) {
    const TimeGrid g(0.0, 0.1, 8);
    const WienerPath w = wiener_sample(g, 3, 1, 0);
    const WienerPath c = w.coarsen(4);
    EXPECT_EQ(c.steps(), 2);
    EXPECT_NEAR(c.increment(1, 2), w.increments().row(2).tail(4).sum(), 1e-15);
    EXPECT_DOUBLE_EQ(c.dt(), 4 * w.dt());
}

TEST(Simulate, DeterministicFlow) {
    const auto spec = process(EvolutionKind::heat_semigroup, 4, 2, DriftMap::zero(), DiffusionMap::zero(), 1.0);
    const TimeGrid g(0.0, 0.1, 10);
    const SamplePath path = simulate(spec, g, wiener_sample(g, 2, 1, 0));
    for (int m = 0; m <= 10; ++m) EXPECT_NEAR(path.states(0, m), std::exp(-eigenvalue(1) * g.node(m)), 1e-14);
    EXPECT_EQ(path.states.bottomRows(3).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Simulate, IdentityFamilyTelescopes) {
    Matrix z(3, 2);
    z << 1.0, 0.5, -0.2, 0.0, 0.3, 2.0;
    const auto spec = process(EvolutionKind::identity, 3, 2, DriftMap::zero(), DiffusionMap::constant(z), 0.7);
    const TimeGrid g(0.0, 0.1, 50);
    const WienerPath w = wiener_sample(g, 2, 1, 4);
    const SamplePath path = simulate(spec, g, w);
    Vector expected = spec.initial.coeffs() + z * w.increments().rowwise().sum();
    EXPECT_LT((path.states.col(50) - expected).cwiseAbs().maxCoeff(), 1e-12);
    const SamplePath direct = simulate_by_sum(spec, g, w);
    EXPECT_LT((direct.states - path.states).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Simulate, RecursionMatchesSumForHeat) {
    const auto spec = process(EvolutionKind::heat_semigroup, 8, 8, DriftMap::nemytskii(field_by_name("tanh"), 8, 64),
                              DiffusionMap::truncated_identity(8, 8), 0.5);
    const TimeGrid g(0.0, 0.1, 40);
    const WienerPath w = wiener_sample(g, 8, 2, 1);
    const SamplePath a = simulate(spec, g, w), b = simulate_by_sum(spec, g, w);
    EXPECT_LT((a.states - b.states).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Simulate, ShapeErrors) {
    const auto spec = process(EvolutionKind::heat_semigroup, 4, 2, DriftMap::zero(), DiffusionMap::zero());
    const TimeGrid g(0.0, 0.1, 10);
    EXPECT_THROW(simulate(spec, g, wiener_sample(g, 3, 1, 0)), DomainError);
    EXPECT_THROW(simulate(spec, g, wiener_sample(TimeGrid(0.0, 0.1, 11), 2, 1, 0)), DomainError);
}

TEST(Simulate, BlowUpReportsPathIndex) {
    const auto spec = process(EvolutionKind::identity, 2, 1, DriftMap::function([](double, const Vector& x) {
                                  return Vector(x.array() * std::numeric_limits<double>::max() * 10.0);
                              }),
                              DiffusionMap::zero(), 1.0);
    const TimeGrid g(0.0, 0.1, 5);
    try {
        simulate(spec, g, wiener_sample(g, 1, 1, 17));
        FAIL();
    } catch (const BlowUpError& e) {
        EXPECT_EQ(e.path(), 17u);
        EXPECT_EQ(e.step(), 1);
    }
}

TEST(Regularize, IdentityLeavesPath) {
    const auto spec = process(EvolutionKind::identity, 3, 3, DriftMap::zero(), DiffusionMap::truncated_identity(3, 3));
    const TimeGrid g(0.0, 0.1, 10);
    SamplePath path = simulate(spec, g, wiener_sample(g, 3, 1, 0));
    regularize(spec, g, path);
    EXPECT_EQ(path.regularized, path.states);
}

TEST(Regularize, DeterministicIsConstant) {
    const auto spec = process(EvolutionKind::heat_semigroup, 3, 1, DriftMap::zero(), DiffusionMap::zero(), 2.0);
    const TimeGrid g(0.0, 0.1, 10);
    SamplePath path = simulate(spec, g, wiener_sample(g, 1, 1, 0));
    regularize(spec, g, path);
    const double target = 2.0 * std::exp(-eigenvalue(1) * 0.1);
    for (int j = 0; j <= 10; ++j) EXPECT_NEAR(path.regularized(0, j), target, 1e-14);
}

TEST(Integrability, ZeroAndClosedForm) {
    const TimeGrid g(0.0, 0.1, 20);
    const auto zero = process(EvolutionKind::heat_semigroup, 3, 1, DriftMap::zero(), DiffusionMap::zero(), 1.0);
    const auto r0 = integrability_report(zero, g, simulate(zero, g, wiener_sample(g, 1, 1, 0)));
    EXPECT_EQ(r0.drift_integral, 0.0);
    EXPECT_EQ(r0.diffusion_integral, 0.0);

    const auto ou = ou_spec(32, 32, 0.0, 0.1);
    const auto r = integrability_report(ou, g, simulate(ou, g, wiener_sample(g, 32, 1, 0)));
    EXPECT_NEAR(r.diffusion_integral, 0.074732632675525755, 1e-12);
    EXPECT_TRUE(r.finite);
}

TEST(Integrability, ConstantDriftQuadrature) {
    // int_0^T e^{-rho_1 (T-s)} ds for Y = e_1.
    const TimeGrid g(0.0, 0.1, 10);
    Vector y = Vector::Zero(2);
    y[0] = 1.0;
    const auto spec = process(EvolutionKind::heat_semigroup, 2, 1, DriftMap::constant(y), DiffusionMap::zero());
    const auto r = integrability_report(spec, g, simulate(spec, g, wiener_sample(g, 1, 1, 0)));
    const double rho = eigenvalue(1);
    EXPECT_NEAR(r.drift_integral, -std::expm1(-rho * 0.1) / rho, 1e-10);
}

TEST(Spec, Validation) {
    const auto bad = MildItoProcessSpec{EvolutionFamily(EvolutionKind::identity, 3, 0.0, 0.1),
                                        SineBasisVector::zero(2), DriftMap::zero(), DiffusionMap::zero(), 1};
    EXPECT_THROW(bad.validate(TimeGrid(0.0, 0.1, 4)), DomainError);
    const auto ok = ou_spec(4, 4, 0.0, 0.1);
    EXPECT_THROW(ok.validate(TimeGrid(0.0, 0.2, 4)), DomainError);
}
