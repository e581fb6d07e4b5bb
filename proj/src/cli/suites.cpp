#include "mildito/cli/suites.hpp"

#include "mildito/errors.hpp"
#include "mildito/parallel.hpp"
#include "mildito/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace mildito::cli {

namespace {

using Clock = std::chrono::steady_clock;

// Instance streams for the suites start here so they never meet the
// streams used by library-level sampling helpers.
constexpr std::uint64_t kSuiteStreamBase = 1u << 20;

std::string label(const std::string& name, double value) {
    std::ostringstream os;
    os << name << value;
    return os.str();
}

Matrix random_matrix(int rows, int cols, std::uint64_t seed, std::uint64_t index) {
    NormalStream stream(seed, StreamTag::instances, kSuiteStreamBase + index);
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = stream.normal();
    return m;
}

Matrix random_orthogonal(int n, std::uint64_t seed, std::uint64_t index) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, seed, index));
    return qr.householderQ() * Matrix::Identity(n, n);
}

/// Collects rows and stamps each group with the wall time it took.
class Rows {
public:
    explicit Rows(std::string suite) : suite_(std::move(suite)) {}

    template <class F>
    void group(F&& body) {
        const auto start = Clock::now();
        const std::size_t first = rows_.size();
        body();
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        const std::size_t count = rows_.size() - first;
        for (std::size_t i = first; i < rows_.size(); ++i) rows_[i].wall_seconds = seconds / static_cast<double>(count);
    }

    void add(std::string check, Relation rel, double lhs, double rhs, double stderr_value, double tolerance) {
        rows_.push_back(make_row(suite_, std::move(check), rel, lhs, rhs, stderr_value, tolerance));
    }

    void add(std::string check, const BoundCheck& b) {
        add(std::move(check), Relation::le, b.lhs, b.rhs, b.stderr_lhs, b.tolerance);
    }

    std::vector<ReportRow> take() { return std::move(rows_); }

private:
    std::string suite_;
    std::vector<ReportRow> rows_;
};

McOptions mc_options(const ExperimentConfig& c, std::uint64_t offset) {
    McOptions mc;
    mc.samples = c.mc_samples;
    mc.seed = c.seed + offset;
    mc.workers = c.workers;
    return mc;
}

MonteCarlo monte_carlo(const ExperimentConfig& c, int paths) {
    return MonteCarlo{paths, c.seed, c.workers};
}

bool closed_form_applies(const ExperimentConfig& c) {
    return c.drift == "zero" && c.diffusion != "coefficient";
}

Matrix constant_diffusion(const ExperimentConfig& c, const MildItoProcessSpec& spec) {
    return spec.diffusion.evaluate(c.t0, Vector::Zero(c.modes), c.modes, c.noise_modes);
}

}  // namespace

double second_moment_closed_form(const MildItoProcessSpec& spec, const Matrix& z, double t0, double terminal) {
    const int N = spec.modes();
    double total = spec.family.multipliers(t0, terminal).cwiseProduct(spec.initial.coeffs()).squaredNorm();
    const Vector diag = z.rowwise().squaredNorm();
    for (int n = 1; n <= N; ++n) {
        double integral = terminal - t0;
        if (spec.family.kind() == EvolutionKind::heat_semigroup) {
            const double rho = eigenvalue(n);
            integral = -std::expm1(-2.0 * rho * (terminal - t0)) / (2.0 * rho);
        }
        total += diag[n - 1] * integral;
    }
    return total;
}

// ---------------------------------------------------------------------------

std::vector<ReportRow> gamma_suite(const ExperimentConfig& c) {
    Rows rows("gamma");
    const int N = c.modes;
    const int K = c.noise_modes;

    rows.group([&] {
        // Monte-Carlo gamma-norm against the exact Hilbert-Schmidt norm.
        for (int i = 0; i < 20; ++i) {
            const double r = (i % 3 == 0) ? 0.0 : (i % 3 == 1 ? -0.25 : 0.25);
            const Matrix cols = random_matrix(std::min(N, 8 + i), std::min(K, 4 + i), c.seed, 100 + i);
            const FiniteRankGammaOperator op(cols, HilbertScale{r});
            const McEstimate mc = gamma_norm_mc(op, c.mc_samples, c.seed + 100 + i, c.workers);
            rows.add("mc_vs_exact_" + std::to_string(i), Relation::eq, mc.estimate, gamma_norm_exact(op),
                     mc.stderr_estimate, 3.0 * mc.stderr_estimate);
        }
    });

    rows.group([&] {
        const auto s = smoothing_gamma_bound(FractionalIndex(c.r), c.p, N, c.mc_samples, c.seed + 1, c.resolution,
                                             c.workers);
        rows.add(label("smoothing_r", c.r) + label("_p", c.p), Relation::le, s.mc.estimate, s.bound,
                 s.mc.stderr_estimate, 3.0 * s.mc.stderr_estimate);
    });

    rows.group([&] {
        const auto e = iota_embedding(FractionalIndex(c.eps), FractionalIndex(c.beta), c.p, N, c.resolution);
        rows.add(label("embedding_eps", c.eps) + label("_beta", c.beta) + label("_p", c.p), e.check(mc_options(c, 2)));
    });

    rows.group([&] {
        // Ideal property with exact norms (H_r codomain) and with L^p codomains.
        for (int i = 0; i < 10; ++i) {
            const int n = std::min(N, 12);
            const double r = 0.1 * (i % 4);
            const FiniteRankGammaOperator mid(random_matrix(n, K, c.seed, 200 + i), HilbertScale{r});
            const auto left = BoundedOperator::on_hilbert_scale(random_matrix(n, n, c.seed, 300 + i), r);
            const Matrix right = random_matrix(K, K, c.seed, 400 + i);
            rows.add("ideal_exact_" + std::to_string(i), ideal_compose(left, mid, right, mc_options(c, 3)).check);
        }
        for (int i = 0; i < 3; ++i) {
            const int n = std::min(N, 12);
            const FiniteRankGammaOperator mid(random_matrix(n, K, c.seed, 500 + i), SobolevLp{0.0, c.p, c.resolution});
            // A scalar multiple of the identity has the same norm on every codomain.
            const BoundedOperator left{0.7 * Matrix::Identity(n, n), 0.7};
            const Matrix right = random_orthogonal(K, c.seed, 700 + i) * 0.5;
            const auto comp = ideal_compose(left, mid, right, mc_options(c, 4));
            rows.add("ideal_lp_" + std::to_string(i), comp.check);
        }
    });

    rows.group([&] {
        for (int i = 0; i < 10; ++i) {
            const int n = std::min(N, 10);
            std::vector<Matrix> blocks;
            for (int b = 0; b < 2; ++b) blocks.push_back(random_matrix(n, n, c.seed, 800 + 4 * i + b));
            const auto beta = i % 2 == 0 ? BilinearForm::inner_product() : BilinearForm::from_matrices(blocks);
            const FiniteRankGammaOperator a1(random_matrix(n, K, c.seed, 900 + i), HilbertScale{0.0});
            const FiniteRankGammaOperator a2(random_matrix(n, K, c.seed, 1000 + i), HilbertScale{0.0});
            const auto sum = bilinear_sum(beta, a1, a2, mc_options(c, 5));
            rows.add("bilinear_bound_" + std::to_string(i), sum.check);

            const Matrix rot = random_orthogonal(K, c.seed, 1100 + i);
            const FiniteRankGammaOperator b1(a1.columns() * rot, a1.codomain());
            const FiniteRankGammaOperator b2(a2.columns() * rot, a2.codomain());
            const auto rotated = bilinear_sum(beta, b1, b2, mc_options(c, 5));
            const double scale = std::max(1.0, sum.value.norm());
            rows.add("bilinear_rotation_" + std::to_string(i), Relation::eq, (rotated.value - sum.value).norm(), 0.0,
                     0.0, 1e-10 * scale);
        }
    });

    rows.group([&] {
        // Multiplication lemma with an estimated Sobolev constant (x2 safety).
        const int n = std::min(N, 32);
        const GridFunction v0 = random_grid_function(c.resolution, c.seed, kSuiteStreamBase + 1200);
        const auto M = multiplication_operator(v0, FractionalIndex(c.beta), c.p, n);
        const double C = M.sobolev_constant(c.mc_samples, c.seed);
        for (int i = 0; i < 5; ++i) {
            const Matrix u = random_matrix(n, 1, c.seed, 1300 + i);
            const GridFunction v = random_grid_function(c.resolution, c.seed, kSuiteStreamBase + 1400 + i);
            const auto Mi = multiplication_operator(v, FractionalIndex(c.beta), c.p, n);
            rows.add("multiplication_" + std::to_string(i), Mi.check(SineBasisVector(u.col(0)), C, 2.0));
        }
    });
    return rows.take();
}

// ---------------------------------------------------------------------------

std::vector<ReportRow> nemytskii_suite(const ExperimentConfig& c) {
    Rows rows("nemytskii");
    const ScalarField& f = field_by_name(c.field);
    const NemytskiiOperator F(f, 2, c.p, c.q);
    const int J = c.resolution;
    constexpr int kSamples = 100;

    rows.group([&] {
        // Central differences at step 1e-4 against the closed-form derivatives.
        const double h = 1e-4;
        double worst1 = 0.0, worst2 = 0.0;
        for (int i = 0; i < 10; ++i) {
            const auto base = kSuiteStreamBase + 2000 + 8 * static_cast<std::uint64_t>(i);
            const GridFunction v = random_grid_function(J, c.seed, base, 2.0);
            const GridFunction u1 = random_grid_function(J, c.seed, base + 1);
            const GridFunction u2 = random_grid_function(J, c.seed, base + 2);
            const GridFunction d1 = nemytskii_derivative(F, 1, v, std::vector{u1});
            const GridFunction fd1 = (nemytskii_apply(F, v + u1 * h) - nemytskii_apply(F, v - u1 * h)) * (0.5 / h);
            worst1 = std::max(worst1, lp_norm(fd1 - d1, c.p) / lp_norm(d1, c.p));
            const GridFunction d2 = nemytskii_derivative(F, 2, v, std::vector{u1, u2});
            const GridFunction fd2 = (nemytskii_derivative(F, 1, v + u2 * h, std::vector{u1}) -
                                      nemytskii_derivative(F, 1, v - u2 * h, std::vector{u1})) *
                                     (0.5 / h);
            worst2 = std::max(worst2, lp_norm(fd2 - d2, c.p) / lp_norm(d2, c.p));
        }
        rows.add("finite_difference_m1", Relation::le, worst1, 1e-5, 0.0, 0.0);
        rows.add("finite_difference_m2", Relation::le, worst2, 1e-5, 0.0, 0.0);
    });

    rows.group([&] {
        for (int m = 0; m <= 2; ++m) {
            const double r = std::max(1, m) * c.p;
            const auto b = check_holder_iii(F, m, r, kSamples, J, c.seed + 10 + m);
            rows.add("holder_m" + std::to_string(m), Relation::le, b.lhs_sup, b.rhs, 0.0, 1e-10 * b.rhs);
        }
    });

    rows.group([&] {
        // Worst ratio lhs/rhs over 100 random (v, w, u) draws.
        for (int m = 0; m <= 2; ++m) {
            for (int item = 0; item < 2; ++item) {
                const double r = item == 0 ? (m == 0 ? c.p : 2.0 * c.p) : (m + 1) * c.p;
                const double s = item == 0 ? (m == 0 ? c.p : 2.0 * m * c.p) : r;
                double worst = 0.0;
                for (int i = 0; i < kSamples; ++i) {
                    const auto base = kSuiteStreamBase + 3000 + 1000 * static_cast<std::uint64_t>(m) + 2 * i;
                    const GridFunction v = random_grid_function(J, c.seed, base, 2.0);
                    const GridFunction w = random_grid_function(J, c.seed, base + 1, 2.0);
                    const auto b = item == 0 ? lipschitz_bound_iv(F, m, r, s, v, w, 1, c.seed + i)
                                             : lipschitz_bound_v(F, m, r, v, w, 1, c.seed + i);
                    worst = std::max(worst, b.lhs_sup / b.rhs);
                }
                rows.add(std::string(item == 0 ? "lipschitz_rs_m" : "lipschitz_rr_m") + std::to_string(m),
                         Relation::le, worst, 1.0, 0.0, 1e-10);
            }
        }
    });

    rows.group([&] {
        const DiffusionCoefficient B = build_diffusion(c);
        const McOptions mc = mc_options(c, 20);
        const double C = diffusion_sobolev_constant(B, c.mc_samples, c.seed);
        const GridFunction v = random_grid_function(J, c.seed, kSuiteStreamBase + 5000);
        const GridFunction w = random_grid_function(J, c.seed, kSuiteStreamBase + 5001);
        const GridFunction v1 = random_grid_function(J, c.seed, kSuiteStreamBase + 5002);
        for (int k = 0; k <= B.order; ++k) {
            std::vector<GridFunction> dirs(static_cast<std::size_t>(k), v1);
            rows.add("diffusion_size_k" + std::to_string(k), diffusion_check_iv(B, k, v, dirs, C, mc));
            const double r = diffusion_lipschitz_min_r(B, k);
            rows.add("diffusion_lipschitz_k" + std::to_string(k), diffusion_check_v(B, k, r, v, w, dirs, C, mc));
        }

        // One-sided difference quotient error of B' in gamma-norm: O(eps), so halving eps halves it.
        auto fd_error = [&](double eps) {
            const auto Bp = diffusion_apply(B, v + v1 * eps);
            const auto B0 = diffusion_apply(B, v);
            const auto D = diffusion_derivative(B, 1, v, std::vector{v1});
            const FiniteRankGammaOperator e((Bp.columns() - B0.columns()) / eps - D.columns(), D.codomain());
            return gamma_norm(e, c.mc_samples, c.seed + 30, c.workers).estimate;
        };
        const double e1 = fd_error(1e-2);
        const double e2 = fd_error(5e-3);
        rows.add("diffusion_fd_order", Relation::ge, std::log2(e1 / e2), 0.9, 0.0, 0.0);
    });
    return rows.take();
}

// ---------------------------------------------------------------------------

std::vector<ReportRow> simulate_suite(const ExperimentConfig& c) {
    Rows rows("simulate");
    const auto spec = build_process(c);
    const TimeGrid grid(c.t0, c.terminal, c.steps);
    const StepTable table(spec, grid);

    rows.group([&] {
        // Increment statistics over all paths, steps and modes.
        const std::size_t P = static_cast<std::size_t>(c.paths);
        std::vector<double> sums(P), squares(P), fourth(P);
        parallel_for(P, c.workers, [&](std::size_t p) {
            const WienerPath w = wiener_sample(grid, c.noise_modes, c.seed, p);
            const auto a = w.increments().array();
            sums[p] = a.sum();
            squares[p] = a.square().sum();
            fourth[p] = a.square().square().sum();
        });
        const double n = static_cast<double>(P) * c.steps * c.noise_modes;
        const double mean = pairwise_sum(sums) / n;
        const double second = pairwise_sum(squares) / n;
        const double fourth_moment = pairwise_sum(fourth) / n;
        const double dt = grid.dt();
        rows.add("wiener_mean", Relation::eq, mean, 0.0, std::sqrt(second / n), 3.0 * std::sqrt(second / n));
        const double se_var = std::sqrt(std::max(fourth_moment - second * second, 0.0) / n);
        rows.add("wiener_variance", Relation::eq, second, dt, se_var, 3.0 * se_var);
    });

    rows.group([&] {
        double worst = 0.0, scale = 1.0, terminal_gap = 0.0;
        for (std::uint64_t p = 0; p < 3; ++p) {
            const WienerPath w = wiener_sample(grid, c.noise_modes, c.seed, p);
            SamplePath a = simulate(spec, table, w);
            const SamplePath b = simulate_by_sum(spec, grid, w);
            worst = std::max(worst, (a.states - b.states).cwiseAbs().maxCoeff());
            scale = std::max(scale, a.states.cwiseAbs().maxCoeff());
            regularize(spec, grid, a);
            terminal_gap = std::max(terminal_gap, (a.regularized.col(c.steps) - a.states.col(c.steps)).cwiseAbs().maxCoeff());
        }
        rows.add("recursion_vs_sum", Relation::eq, worst, 0.0, 0.0, 1e-10 * scale);
        rows.add("regularized_terminal", Relation::eq, terminal_gap, 0.0, 0.0, 1e-10 * scale);
    });

    if (closed_form_applies(c)) {
        rows.group([&] {
            const Matrix z = constant_diffusion(c, spec);
            const double closed = second_moment_closed_form(spec, z, c.t0, c.terminal);
            const std::size_t P = static_cast<std::size_t>(c.paths);
            std::vector<double> sq(P);
            parallel_for(P, c.workers, [&](std::size_t p) {
                const SamplePath path = simulate(spec, table, wiener_sample(grid, c.noise_modes, c.seed, p));
                sq[p] = path.states.col(c.steps).squaredNorm();
            });
            const SampleStats s = sample_stats(sq);
            rows.add("second_moment", Relation::eq, s.mean, closed, s.stderr_mean,
                     3.0 * s.stderr_mean + 1e-10 * std::max(1.0, closed));

            const SamplePath path = simulate(spec, table, wiener_sample(grid, c.noise_modes, c.seed, 0));
            const auto report = integrability_report(spec, grid, path);
            const double closed_z = closed - spec.family.multipliers(c.t0, c.terminal)
                                                 .cwiseProduct(spec.initial.coeffs())
                                                 .squaredNorm();
            rows.add("integrability_diffusion", Relation::eq, report.diffusion_integral, closed_z, 0.0,
                     1e-3 * std::max(closed_z, 1e-300));
        });
    }
    return rows.take();
}

// ---------------------------------------------------------------------------

std::vector<ReportRow> ito_suite(const ExperimentConfig& c) {
    Rows rows("ito");
    const auto spec = build_process(c);
    const TimeGrid grid(c.t0, c.terminal, c.steps);
    const auto phi = test_function_by_name(c.phi, c.modes, c.field, c.resolution);
    const int residual_paths = std::min(c.paths, 20);

    rows.group([&] {
        const auto linear = coordinate_functional({1, 2});
        const CalculusTable table(*linear, spec, grid);
        double worst = 0.0;
        for (int p = 0; p < residual_paths; ++p) {
            const WienerPath w = wiener_sample(grid, c.noise_modes, c.seed, static_cast<std::uint64_t>(p));
            worst = std::max(worst, decompose_path(*linear, spec, table, w).residual().cwiseAbs().maxCoeff());
        }
        rows.add("residual_linear", Relation::eq, worst, 0.0, 0.0, 1e-10);
    });

    rows.group([&] {
        // The deterministic flow of the same family from X_0 = e_1.
        Vector x0 = spec.initial.coeffs();
        if (x0.cwiseAbs().maxCoeff() == 0.0) x0[0] = 1.0;
        const MildItoProcessSpec flow{spec.family, SineBasisVector(x0), DriftMap::zero(), DiffusionMap::zero(),
                                      spec.noise_modes};
        const WienerPath w = wiener_sample(grid, c.noise_modes, c.seed, 0);
        const double res = ito_residual(*phi, flow, grid, w).cwiseAbs().maxCoeff();
        rows.add("residual_deterministic", Relation::eq, res, 0.0, 0.0, 1e-10);
    });

    rows.group([&] {
        const auto conv = ito_self_convergence(*phi, spec, grid, {c.steps / 4, c.steps / 2, c.steps},
                                               monte_carlo(c, std::min(c.paths, 1000)));
        // With Y = Z = 0 or linear phi the residual vanishes identically and
        // a slope through round-off would be meaningless.
        const double coarsest = *std::max_element(conv.rms.begin(), conv.rms.end());
        if (coarsest <= 1e-10)
            rows.add("self_convergence_rms", Relation::le, coarsest, 0.0, 0.0, 1e-10);
        else
            rows.add("self_convergence_order", Relation::ge, conv.order, 0.4, 0.0, 0.0);
    });

    rows.group([&] {
        const auto d = dynkin_gap(*phi, spec, grid, StoppingRule::terminal(), monte_carlo(c, c.paths));
        for (Eigen::Index i = 0; i < d.martingale_mean.size(); ++i)
            rows.add("martingale_mean_" + std::to_string(i), Relation::eq, d.martingale_mean[i], 0.0,
                     d.martingale_stderr[i], 3.0 * d.martingale_stderr[i] + 1e-10);
    });

    rows.group([&] {
        // Standard Ito formula on the S-free version of the process.
        const MildItoProcessSpec plain{EvolutionFamily(EvolutionKind::identity, c.modes, c.t0, c.terminal),
                                       spec.initial, spec.drift, spec.diffusion, spec.noise_modes};
        const auto time_phi = time_identity();
        const auto linear = from_autonomous(coordinate_functional({1}));
        double worst_time = 0.0, worst_linear = 0.0;
        for (int p = 0; p < residual_paths; ++p) {
            const WienerPath w = wiener_sample(grid, c.noise_modes, c.seed, static_cast<std::uint64_t>(p));
            worst_time = std::max(worst_time, std::fabs(standard_ito_residual(*time_phi, plain, grid, w)[0]));
            worst_linear = std::max(worst_linear, std::fabs(standard_ito_residual(*linear, plain, grid, w)[0]));
        }
        rows.add("standard_residual_time", Relation::eq, worst_time, 0.0, 0.0, 1e-12);
        rows.add("standard_residual_linear", Relation::eq, worst_linear, 0.0, 0.0, 1e-10);
    });
    return rows.take();
}

// ---------------------------------------------------------------------------

std::vector<ReportRow> dynkin_suite(const ExperimentConfig& c) {
    Rows rows("dynkin");
    const auto spec = build_process(c);
    const TimeGrid grid(c.t0, c.terminal, c.steps);
    const auto phi = test_function_by_name(c.phi, c.modes, c.field, c.resolution);
    const StoppingRule rule = build_stopping(c);

    rows.group([&] {
        const auto d = dynkin_gap(*phi, spec, grid, rule, monte_carlo(c, c.paths));
        for (Eigen::Index i = 0; i < d.gap.size(); ++i) {
            const std::string sfx = d.gap.size() > 1 ? "_" + std::to_string(i) : "";
            rows.add("gap" + sfx, Relation::eq, d.lhs[i], d.rhs[i], d.stderr_gap[i],
                     d.tolerance_factor * d.stderr_gap[i] + 1e-10 * std::max(1.0, std::fabs(d.rhs[i])));
            rows.add("martingale_mean" + sfx, Relation::eq, d.martingale_mean[i], 0.0, d.martingale_stderr[i],
                     3.0 * d.martingale_stderr[i] + 1e-10);
        }
        if (closed_form_applies(c) && c.phi == "squared_norm" && rule.kind == StoppingRule::Kind::terminal) {
            const double closed = second_moment_closed_form(spec, constant_diffusion(c, spec), c.t0, c.terminal);
            rows.add("second_moment_lhs", Relation::eq, d.lhs[0], closed, d.stderr_lhs[0],
                     std::max(3.0 * d.stderr_lhs[0], 0.01 * closed));
            rows.add("second_moment_rhs", Relation::eq, d.rhs[0], closed, d.stderr_rhs[0],
                     std::max(3.0 * d.stderr_rhs[0], 0.01 * closed));
        }
    });
    return rows.take();
}

// ---------------------------------------------------------------------------

std::vector<ReportRow> weak_suite(const ExperimentConfig& c) {
    Rows rows("weak");
    const auto spec = build_process(c);
    const TimeGrid grid(c.t0, c.terminal, c.steps);
    const auto phi = test_function_by_name(c.phi, c.modes, c.field, c.resolution);

    rows.group([&] {
        const auto e = weak_estimate_gap(*phi, spec, grid, monte_carlo(c, c.paths));
        rows.add("slack", Relation::ge, e.rhs, e.lhs, e.stderr_slack,
                 3.0 * e.stderr_slack + 1e-10 * std::max(1.0, std::fabs(e.rhs)));
    });

    rows.group([&] {
        Vector x0 = spec.initial.coeffs();
        if (x0.cwiseAbs().maxCoeff() == 0.0) x0[0] = 1.0;
        const MildItoProcessSpec flow{spec.family, SineBasisVector(x0), DriftMap::zero(), DiffusionMap::zero(),
                                      spec.noise_modes};
        const auto e = weak_estimate_gap(*phi, flow, grid, monte_carlo(c, 2));
        rows.add("deterministic_equality", Relation::eq, e.rhs, e.lhs, 0.0, 1e-10);
    });
    return rows.take();
}

std::vector<ReportRow> run_suite(const std::string& name, const ExperimentConfig& c) {
    if (name == "gamma") return gamma_suite(c);
    if (name == "nemytskii") return nemytskii_suite(c);
    if (name == "simulate") return simulate_suite(c);
    if (name == "ito") return ito_suite(c);
    if (name == "dynkin") return dynkin_suite(c);
    if (name == "weak") return weak_suite(c);
    throw ConfigError("unknown suite '" + name + "'");
}

}  // namespace mildito::cli
