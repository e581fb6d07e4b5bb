#include "mildito/mild_process.hpp"

#include "mildito/errors.hpp"
#include "mildito/random.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace mildito {

namespace {

// Noise draws for step j use counter indices j * 2^24 + k/4, four modes per block.
constexpr int kWienerStepShift = 24;

// Density below which a constant diffusion matrix is applied in sparse form.
constexpr double kSparseDensity = 0.25;

}  // namespace

TimeGrid::TimeGrid(double t0, double terminal, int steps) : t0_(t0), terminal_(terminal), steps_(steps) {
    if (!(t0 >= 0.0)) throw DomainError("time grid requires t0 >= 0");
    if (!(terminal > t0)) throw DomainError("time grid requires T > t0");
    if (steps < 1) throw DomainError("time grid requires M_t >= 1");
}

double TimeGrid::node(int j) const {
    if (j < 0 || j > steps_) throw DomainError("time grid node out of range");
    if (j == steps_) return terminal_;
    return t0_ + static_cast<double>(j) * dt();
}

TimeGrid TimeGrid::coarsened(int factor) const {
    if (factor < 1 || steps_ % factor != 0) throw DomainError("coarsening factor must divide M_t");
    return TimeGrid(t0_, terminal_, steps_ / factor);
}

// ---------------------------------------------------------------------------

WienerPath::WienerPath(Matrix increments, double dt, std::uint64_t seed, std::uint64_t path_index)
    : increments_(std::move(increments)), dt_(dt), seed_(seed), path_index_(path_index) {
    if (!increments_.allFinite()) throw DomainError("Wiener increments must be finite");
}

WienerPath WienerPath::coarsen(int factor) const {
    if (factor < 1 || steps() % factor != 0) throw DomainError("coarsening factor must divide the step count");
    const int coarse = steps() / factor;
    Matrix out = Matrix::Zero(noise_modes(), coarse);
    for (int j = 0; j < coarse; ++j)
        for (int i = 0; i < factor; ++i) out.col(j) += increments_.col(j * factor + i);
    return WienerPath(std::move(out), dt_ * factor, seed_, path_index_);
}

WienerPath wiener_sample(const TimeGrid& grid, int noise_modes, std::uint64_t seed, std::uint64_t path_index) {
    if (noise_modes < 1) throw DomainError("Wiener sample requires K >= 1");
    const int M = grid.steps();
    const double scale = std::sqrt(grid.dt());
    Matrix inc(noise_modes, M);
    for (int j = 0; j < M; ++j) {
        const std::uint64_t base = static_cast<std::uint64_t>(j) << kWienerStepShift;
        normal_fill(seed, StreamTag::wiener, path_index, base,
                    std::span<double>(inc.col(j).data(), static_cast<std::size_t>(noise_modes)));
    }
    inc *= scale;
    return WienerPath(std::move(inc), grid.dt(), seed, path_index);
}

// ---------------------------------------------------------------------------

DriftMap DriftMap::zero() { return DriftMap(); }

DriftMap DriftMap::constant(Vector y) {
    if (!y.allFinite()) throw DomainError("constant drift must be finite");
    DriftMap d;
    d.kind_ = Kind::constant;
    d.value_ = std::move(y);
    return d;
}

DriftMap DriftMap::function(Function f) {
    DriftMap d;
    d.kind_ = Kind::function;
    d.function_ = std::move(f);
    return d;
}

DriftMap DriftMap::nemytskii(const ScalarField& f, int modes, int resolution) {
    auto transform = std::make_shared<const SineTransform>(modes, resolution);
    const ScalarField* field = &f;
    return function([transform, field](double, const Vector& x) {
        Vector values(transform->resolution());
        transform->synthesize_into(x, values);
        for (Eigen::Index j = 0; j < values.size(); ++j) values[j] = (*field)(values[j]);
        Vector coeffs(transform->modes());
        transform->analyze_into(values, coeffs);
        return coeffs;
    });
}

DriftMap DriftMap::linear(double c) {
    return function([c](double, const Vector& x) { return Vector(-c * x); });
}

void DriftMap::evaluate(double t, const Vector& x, Vector& out) const {
    switch (kind_) {
        case Kind::zero:
            out.setZero(x.size());
            return;
        case Kind::constant:
            if (value_.size() != x.size()) throw DomainError("constant drift: truncation mismatch");
            out = value_;
            return;
        case Kind::function:
            out = function_(t, x);
            if (out.size() != x.size()) throw DomainError("drift map returned the wrong number of modes");
            return;
    }
}

DiffusionMap DiffusionMap::zero() { return DiffusionMap(); }

DiffusionMap DiffusionMap::constant(Matrix z) {
    if (!z.allFinite()) throw DomainError("constant diffusion must be finite");
    DiffusionMap d;
    d.kind_ = Kind::constant;
    const double nonzeros = static_cast<double>((z.array() != 0.0).count());
    if (nonzeros <= kSparseDensity * static_cast<double>(z.size()))
        d.sparse_ = std::make_shared<const Eigen::SparseMatrix<double>>(z.sparseView());
    d.identity_ = z.isIdentity(0.0);
    d.dense_ = std::make_shared<const Matrix>(std::move(z));
    return d;
}

DiffusionMap DiffusionMap::truncated_identity(int modes, int noise_modes) {
    return constant(FiniteRankGammaOperator::truncated_identity(modes, noise_modes).columns());
}

DiffusionMap DiffusionMap::function(Function f) {
    DiffusionMap d;
    d.kind_ = Kind::function;
    d.function_ = std::move(f);
    return d;
}

DiffusionMap DiffusionMap::from_coefficient(const DiffusionCoefficient& B) {
    B.validate();
    auto out = std::make_shared<const SineTransform>(B.modes, B.resolution);
    auto in = std::make_shared<const SineTransform>(B.noise_modes, B.resolution);
    const ScalarField* field = B.field;
    return function([out, in, field](double, const Vector& x) {
        Vector values(out->resolution());
        out->synthesize_into(x, values);
        for (Eigen::Index j = 0; j < values.size(); ++j) values[j] = (*field)(values[j]);
        Matrix z = out->basis().transpose() * (values.asDiagonal() * in->basis());
        z /= static_cast<double>(out->resolution());
        return z;
    });
}

Matrix DiffusionMap::evaluate(double t, const Vector& x, int modes, int noise_modes) const {
    Matrix z;
    switch (kind_) {
        case Kind::zero:
            return Matrix::Zero(modes, noise_modes);
        case Kind::constant:
            z = *dense_;
            break;
        case Kind::function:
            z = function_(t, x);
            break;
    }
    if (z.rows() != modes || z.cols() != noise_modes) throw DomainError("diffusion map has shape different from N x K");
    return z;
}

void DiffusionMap::apply(double t, const Vector& x, const Vector& dw, Vector& out) const {
    switch (kind_) {
        case Kind::zero:
            out.setZero(x.size());
            return;
        case Kind::constant:
            if (identity_) {
                const Eigen::Index n = std::min(dense_->rows(), dense_->cols());
                out.setZero(dense_->rows());
                out.head(n) = dw.head(n);
            } else if (sparse_)
                out.noalias() = *sparse_ * dw;
            else
                out.noalias() = *dense_ * dw;
            return;
        case Kind::function:
            out.noalias() = function_(t, x) * dw;
            return;
    }
}

// ---------------------------------------------------------------------------

void MildItoProcessSpec::validate(const TimeGrid& grid) const {
    if (initial.size() != family.modes()) throw DomainError("initial state truncation differs from N");
    if (noise_modes < 1) throw DomainError("process requires K >= 1");
    const double eps = 1e-12 * std::max(1.0, grid.terminal());
    if (grid.t0() < family.t0() - eps || grid.terminal() > family.terminal() + eps)
        throw DomainError("time grid outside the window of the evolution family");
}

MildItoProcessSpec ou_spec(int modes, int noise_modes, double t0, double terminal) {
    return MildItoProcessSpec{EvolutionFamily(EvolutionKind::heat_semigroup, modes, t0, terminal),
                              SineBasisVector::zero(modes), DriftMap::zero(),
                              DiffusionMap::truncated_identity(modes, noise_modes), noise_modes};
}

StepTable::StepTable(const MildItoProcessSpec& spec, const TimeGrid& grid) : grid_(grid) {
    spec.validate(grid);
    const int M = grid.steps();
    const double dt = grid.dt();
    step_.reserve(static_cast<std::size_t>(M));
    drift_.reserve(static_cast<std::size_t>(M));
    noise_.reserve(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        const double s = grid.node(j);
        const double t = grid.node(j + 1);
        step_.push_back(spec.family.multipliers(s, t));
        drift_.push_back(spec.family.averaged_multipliers(s, t) * dt);
        noise_.push_back(spec.family.rms_multipliers(s, t));
    }
    to_terminal_.reserve(static_cast<std::size_t>(M) + 1);
    for (int j = 0; j <= M; ++j) to_terminal_.push_back(spec.family.multipliers(grid.node(j), grid.terminal()));
}

SamplePath simulate(const MildItoProcessSpec& spec, const StepTable& table, const WienerPath& w) {
    const TimeGrid& grid = table.grid();
    const int M = grid.steps();
    const int N = spec.modes();
    if (w.steps() != M) throw DomainError("Wiener path has a different number of steps than the grid");
    if (w.noise_modes() != spec.noise_modes) throw DomainError("Wiener path has a different K than the process");

    SamplePath path;
    path.path_index = w.path_index();
    path.states.resize(N, M + 1);
    path.states.col(0) = spec.initial.coeffs();

    Vector x(N), y(N), noise(N), dw(spec.noise_modes);
    for (int j = 0; j < M; ++j) {
        const double t = grid.node(j);
        x = path.states.col(j);
        auto next = path.states.col(j + 1);
        next = table.step(j).cwiseProduct(x);
        if (!spec.drift.is_zero()) {
            spec.drift.evaluate(t, x, y);
            next += table.drift_weight(j).cwiseProduct(y);
        }
        if (!spec.diffusion.is_zero()) {
            dw = w.increments().col(j);
            spec.diffusion.apply(t, x, dw, noise);
            next += table.noise_weight(j).cwiseProduct(noise);
        }
        if (!next.allFinite()) throw BlowUpError(j + 1, w.path_index());
    }
    return path;
}

SamplePath simulate(const MildItoProcessSpec& spec, const TimeGrid& grid, const WienerPath& w) {
    return simulate(spec, StepTable(spec, grid), w);
}

SamplePath simulate_by_sum(const MildItoProcessSpec& spec, const TimeGrid& grid, const WienerPath& w) {
    const StepTable table(spec, grid);
    const int M = grid.steps();
    const int N = spec.modes();
    if (w.steps() != M || w.noise_modes() != spec.noise_modes) throw DomainError("Wiener path shape mismatch");

    SamplePath path;
    path.path_index = w.path_index();
    path.states.resize(N, M + 1);
    path.states.col(0) = spec.initial.coeffs();

    // Per-step contributions Phi_j Y_j dt + Q_j Z_j dW_j, before transport to later nodes.
    std::vector<Vector> kicks;
    kicks.reserve(static_cast<std::size_t>(M));
    Vector y(N), noise(N);
    for (int m = 1; m <= M; ++m) {
        const int j = m - 1;
        const Vector x = path.states.col(j);
        Vector kick = Vector::Zero(N);
        spec.drift.evaluate(grid.node(j), x, y);
        kick += table.drift_weight(j).cwiseProduct(y);
        const Vector dw = w.increments().col(j);
        spec.diffusion.apply(grid.node(j), x, dw, noise);
        kick += table.noise_weight(j).cwiseProduct(noise);
        kicks.push_back(std::move(kick));

        const double tm = grid.node(m);
        Vector state = spec.family.multipliers(grid.node(0), tm).cwiseProduct(spec.initial.coeffs());
        for (int i = 0; i < m; ++i) state += spec.family.multipliers(grid.node(i + 1), tm).cwiseProduct(kicks[static_cast<std::size_t>(i)]);
        if (!state.allFinite()) throw BlowUpError(m, w.path_index());
        path.states.col(m) = state;
    }
    return path;
}

void regularize(const MildItoProcessSpec& spec, const TimeGrid& grid, SamplePath& path) {
    const int M = grid.steps();
    if (path.steps() != M) throw DomainError("regularize: path and grid differ in step count");
    if (path.states.rows() != spec.modes()) throw DomainError("regularize: truncation mismatch");
    path.regularized.resize(path.states.rows(), M + 1);
    for (int j = 0; j < M; ++j)
        path.regularized.col(j) = spec.family.multipliers(grid.node(j), grid.terminal()).cwiseProduct(path.states.col(j));
    path.regularized.col(M) = path.states.col(M);
}

IntegrabilityReport integrability_report(const MildItoProcessSpec& spec, const TimeGrid& grid,
                                         const SamplePath& path) {
    using detail::kGaussNodes;
    using detail::kGaussWeights;
    const int M = grid.steps();
    const int N = spec.modes();
    const int K = spec.noise_modes;
    const double dt = grid.dt();
    if (path.steps() != M) throw DomainError("integrability_report: path and grid differ in step count");

    IntegrabilityReport report;
    Vector y(N);
    for (int j = 0; j < M; ++j) {
        const double s = grid.node(j);
        const double s1 = grid.node(j + 1);
        const Vector x = path.states.col(j);
        if (!spec.drift.is_zero()) {
            spec.drift.evaluate(s, x, y);
            double acc = 0.0;
            for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
                const double u = s + kGaussNodes[q] * dt;
                acc += kGaussWeights[q] * spec.family.multipliers(std::min(u, grid.terminal()), grid.terminal()).cwiseProduct(y).norm();
            }
            report.drift_integral += acc * dt;
        }
        if (!spec.diffusion.is_zero()) {
            const Matrix z = spec.diffusion.evaluate(s, x, N, K);
            // int_s^{s1} e^{-2 rho (T - u)} du = S_{s1,T}^2 Q^2 dt, mode by mode.
            const Vector w = spec.family.multipliers(s1, grid.terminal()).cwiseProduct(spec.family.rms_multipliers(s, s1));
            report.diffusion_integral += (w.asDiagonal() * z).squaredNorm() * dt;
        }
    }
    report.finite = std::isfinite(report.drift_integral) && std::isfinite(report.diffusion_integral);
    return report;
}

}  // namespace mildito
