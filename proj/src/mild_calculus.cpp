#include "mildito/mild_calculus.hpp"

#include "mildito/errors.hpp"
#include "mildito/parallel.hpp"
#include "quadrature.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mildito {

Vector TestFunction::trace(const Vector& x, const Matrix& z) const {
    Vector acc = Vector::Zero(dim());
    for (Eigen::Index k = 0; k < z.cols(); ++k) {
        const Vector col = z.col(k);
        acc += second(x, col, col);
    }
    return acc;
}

namespace {

class CoordinateFunctional final : public TestFunction {
public:
    explicit CoordinateFunctional(std::vector<int> modes) : modes_(std::move(modes)) {
        if (modes_.empty()) throw DomainError("coordinate functional needs at least one mode");
        for (int n : modes_)
            if (n < 1) throw DomainError("coordinate functional modes are one-based");
    }

    std::string name() const override { return "coordinate"; }
    int dim() const override { return static_cast<int>(modes_.size()); }

    Vector value(const Vector& x) const override { return pick(x); }
    Vector first(const Vector&, const Vector& h) const override { return pick(h); }
    Vector second(const Vector&, const Vector&, const Vector&) const override { return Vector::Zero(dim()); }
    Vector trace(const Vector&, const Matrix&) const override { return Vector::Zero(dim()); }
    bool constant_hessian() const override { return true; }
    double growth_exponent() const override { return 1.0; }
    double growth_constant() const override { return 1.0; }

private:
    Vector pick(const Vector& x) const {
        Vector out(dim());
        for (std::size_t i = 0; i < modes_.size(); ++i) {
            if (modes_[i] > x.size()) throw DomainError("coordinate functional mode exceeds N");
            out[static_cast<Eigen::Index>(i)] = x[modes_[i] - 1];
        }
        return out;
    }

    std::vector<int> modes_;
};

Vector scalar(double v) { return Vector::Constant(1, v); }

class SquaredNorm final : public TestFunction {
public:
    std::string name() const override { return "squared_norm"; }
    int dim() const override { return 1; }
    Vector value(const Vector& x) const override { return scalar(x.squaredNorm()); }
    Vector first(const Vector& x, const Vector& h) const override { return scalar(2.0 * x.dot(h)); }
    Vector second(const Vector&, const Vector& h1, const Vector& h2) const override {
        return scalar(2.0 * h1.dot(h2));
    }
    Vector trace(const Vector&, const Matrix& z) const override { return scalar(2.0 * z.squaredNorm()); }
    bool constant_hessian() const override { return true; }
    double growth_exponent() const override { return 2.0; }
    double growth_constant() const override { return 1.0; }
};

class SmoothedNorm final : public TestFunction {
public:
    std::string name() const override { return "smoothed_norm"; }
    int dim() const override { return 1; }
    Vector value(const Vector& x) const override { return scalar(std::sqrt(1.0 + x.squaredNorm())); }
    Vector first(const Vector& x, const Vector& h) const override {
        return scalar(x.dot(h) / std::sqrt(1.0 + x.squaredNorm()));
    }
    Vector second(const Vector& x, const Vector& h1, const Vector& h2) const override {
        const double r = std::sqrt(1.0 + x.squaredNorm());
        return scalar(h1.dot(h2) / r - x.dot(h1) * x.dot(h2) / (r * r * r));
    }
    Vector trace(const Vector& x, const Matrix& z) const override {
        const double r = std::sqrt(1.0 + x.squaredNorm());
        const Vector zx = z.transpose() * x;
        return scalar(z.squaredNorm() / r - zx.squaredNorm() / (r * r * r));
    }
    double growth_exponent() const override { return 1.0; }
    double growth_constant() const override { return 1.0; }
};

class NemytskiiIntegral final : public TestFunction {
public:
    NemytskiiIntegral(const ScalarField& f, int modes, int resolution) : field_(&f), transform_(modes, resolution) {
        if (f.order() < 2) throw OrderError("Nemytskii integral functional needs a field of order >= 2");
    }

    std::string name() const override { return "nemytskii_integral"; }
    int dim() const override { return 1; }

    Vector value(const Vector& x) const override {
        const Vector v = grid(x);
        double acc = 0.0;
        for (Eigen::Index j = 0; j < v.size(); ++j) acc += (*field_)(v[j]);
        return scalar(acc / static_cast<double>(v.size()));
    }
    Vector first(const Vector& x, const Vector& h) const override {
        const Vector v = grid(x);
        const Vector gh = grid(h);
        double acc = 0.0;
        for (Eigen::Index j = 0; j < v.size(); ++j) acc += field_->derivative(1, v[j]) * gh[j];
        return scalar(acc / static_cast<double>(v.size()));
    }
    Vector second(const Vector& x, const Vector& h1, const Vector& h2) const override {
        const Vector v = grid(x);
        const Vector g1 = grid(h1);
        const Vector g2 = grid(h2);
        double acc = 0.0;
        for (Eigen::Index j = 0; j < v.size(); ++j) acc += field_->derivative(2, v[j]) * g1[j] * g2[j];
        return scalar(acc / static_cast<double>(v.size()));
    }
    Vector trace(const Vector& x, const Matrix& z) const override {
        const Vector v = grid(x);
        const Matrix gz = transform_.basis() * z;
        double acc = 0.0;
        for (Eigen::Index j = 0; j < v.size(); ++j) acc += field_->derivative(2, v[j]) * gz.row(j).squaredNorm();
        return scalar(acc / static_cast<double>(v.size()));
    }
    double growth_exponent() const override { return 0.0; }
    double growth_constant() const override { return field_->sup_norm(0); }

private:
    Vector grid(const Vector& x) const {
        if (x.size() != transform_.modes()) throw DomainError("Nemytskii integral: truncation mismatch");
        Vector v(transform_.resolution());
        transform_.synthesize_into(x, v);
        return v;
    }

    const ScalarField* field_;
    SineTransform transform_;
};

// ---------------------------------------------------------------------------

class TimeIdentity final : public TimeTestFunction {
public:
    std::string name() const override { return "time"; }
    int dim() const override { return 1; }
    Vector value(double t, const Vector&) const override { return scalar(t); }
    Vector time_derivative(double, const Vector&) const override { return scalar(1.0); }
    Vector first(double, const Vector&, const Vector&) const override { return scalar(0.0); }
    Vector trace(double, const Vector&, const Matrix&) const override { return scalar(0.0); }
};

class Autonomous final : public TimeTestFunction {
public:
    explicit Autonomous(TestFunctionPtr psi) : psi_(std::move(psi)) {
        if (!psi_) throw DomainError("from_autonomous needs a test function");
    }
    std::string name() const override { return psi_->name(); }
    int dim() const override { return psi_->dim(); }
    Vector value(double, const Vector& x) const override { return psi_->value(x); }
    Vector time_derivative(double, const Vector&) const override { return Vector::Zero(psi_->dim()); }
    Vector first(double, const Vector& x, const Vector& h) const override { return psi_->first(x, h); }
    Vector trace(double, const Vector& x, const Matrix& z) const override { return psi_->trace(x, z); }

private:
    TestFunctionPtr psi_;
};

class DiscountedSquaredNorm final : public TimeTestFunction {
public:
    std::string name() const override { return "discounted_squared_norm"; }
    int dim() const override { return 1; }
    Vector value(double t, const Vector& x) const override { return scalar(std::exp(-t) * x.squaredNorm()); }
    Vector time_derivative(double t, const Vector& x) const override {
        return scalar(-std::exp(-t) * x.squaredNorm());
    }
    Vector first(double t, const Vector& x, const Vector& h) const override {
        return scalar(2.0 * std::exp(-t) * x.dot(h));
    }
    Vector trace(double t, const Vector&, const Matrix& z) const override {
        return scalar(2.0 * std::exp(-t) * z.squaredNorm());
    }
};

double norm_on_scale(const Vector& x, double r) {
    if (r == 0.0) return x.norm();
    return x.cwiseProduct(fractional_multipliers(FractionalIndex(r), static_cast<int>(x.size()))).norm();
}

bool hits(const StoppingRule& rule, const Vector& xbar) {
    if (rule.kind == StoppingRule::Kind::terminal) return false;
    if (std::isinf(rule.level) && rule.level > 0.0) return false;
    return norm_on_scale(xbar, rule.norm_r) >= rule.level;
}

struct Moments {
    Vector mean;
    Vector stderr_mean;
};

// Component-wise mean and standard error, reduced pairwise.
Moments component_stats(const std::vector<Vector>& samples, int dim) {
    Moments m{Vector::Zero(dim), Vector::Zero(dim)};
    std::vector<double> column(samples.size());
    for (int i = 0; i < dim; ++i) {
        for (std::size_t p = 0; p < samples.size(); ++p) column[p] = samples[p][i];
        const SampleStats s = sample_stats(column);
        m.mean[i] = s.mean;
        m.stderr_mean[i] = s.stderr_mean;
    }
    return m;
}

// Runs decompose_path over mc.paths paths; slot p holds path p.
std::vector<PathDecomposition> decompose_ensemble(const TestFunction& phi, const MildItoProcessSpec& spec,
                                                  const TimeGrid& grid, const StoppingRule& rule,
                                                  const MonteCarlo& mc) {
    if (mc.paths < 2) throw DomainError("Monte Carlo needs at least 2 paths");
    const CalculusTable table(phi, spec, grid);
    std::vector<PathDecomposition> out(static_cast<std::size_t>(mc.paths));
    // Blow-ups are collected per slot so the reported path index does not depend on scheduling.
    std::vector<int> failed_step(static_cast<std::size_t>(mc.paths), -1);
    parallel_for(out.size(), mc.workers, [&](std::size_t p) {
        try {
            const WienerPath w = wiener_sample(grid, spec.noise_modes, mc.seed, p);
            out[p] = decompose_path(phi, spec, table, w, rule);
        } catch (const BlowUpError& e) {
            failed_step[p] = e.step();
        }
    });
    for (std::size_t p = 0; p < failed_step.size(); ++p)
        if (failed_step[p] >= 0) throw BlowUpError(failed_step[p], p);
    return out;
}

}  // namespace

TestFunctionPtr coordinate_functional(std::vector<int> modes) {
    return std::make_shared<CoordinateFunctional>(std::move(modes));
}
TestFunctionPtr squared_norm() { return std::make_shared<SquaredNorm>(); }
TestFunctionPtr smoothed_norm() { return std::make_shared<SmoothedNorm>(); }
TestFunctionPtr nemytskii_integral(const ScalarField& f, int modes, int resolution) {
    return std::make_shared<NemytskiiIntegral>(f, modes, resolution);
}

TestFunctionPtr test_function_by_name(const std::string& name, int modes, const std::string& field, int resolution) {
    if (name == "coordinate") return coordinate_functional({1});
    if (name == "squared_norm") return squared_norm();
    if (name == "smoothed_norm") return smoothed_norm();
    if (name == "nemytskii_integral") return nemytskii_integral(field_by_name(field), modes, resolution);
    throw DomainError("unknown test function '" + name +
                      "' (known: coordinate, squared_norm, smoothed_norm, nemytskii_integral)");
}

std::vector<std::string> test_function_names() {
    return {"coordinate", "squared_norm", "smoothed_norm", "nemytskii_integral"};
}

TimeTestFunctionPtr time_identity() { return std::make_shared<TimeIdentity>(); }
TimeTestFunctionPtr from_autonomous(TestFunctionPtr psi) { return std::make_shared<Autonomous>(std::move(psi)); }
TimeTestFunctionPtr discounted_squared_norm() { return std::make_shared<DiscountedSquaredNorm>(); }

// ---------------------------------------------------------------------------

StoppingRule StoppingRule::hitting(double level, double norm_r) {
    if (std::isnan(level) || level < 0.0) throw DomainError("hitting level must be >= 0");
    StoppingRule r;
    r.kind = Kind::hitting;
    r.level = level;
    r.norm_r = norm_r;
    return r;
}

int stopping_sample(const StoppingRule& rule, const SamplePath& path) {
    const int M = path.steps();
    if (rule.kind == StoppingRule::Kind::terminal) return M;
    if (!path.has_regularized()) throw DomainError("hitting rules need a regularised path");
    for (int j = 0; j <= M; ++j)
        if (hits(rule, path.regularized.col(j))) return j;
    return M;
}

Vector kolmogorov_apply(const EvolutionFamily& family, double s, double terminal, const TestFunction& phi,
                        const Vector& x, const Vector& y, const Matrix& z) {
    if (!(s < terminal)) throw DomainError("Kolmogorov operator requires s < T");
    const int N = family.modes();
    if (x.size() != N || y.size() != N || z.rows() != N) throw DomainError("Kolmogorov operator: truncation mismatch");
    const Vector S = family.multipliers(s, terminal);
    const Vector sx = S.cwiseProduct(x);
    const Matrix sz = S.asDiagonal() * z;
    return phi.first(sx, S.cwiseProduct(y)) + 0.5 * phi.trace(sx, sz);
}

// ---------------------------------------------------------------------------

CalculusTable::CalculusTable(const TestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& grid)
    : steps_(spec, grid) {
    const int M = grid.steps();
    const int N = spec.modes();
    const int K = spec.noise_modes;
    drift_.reserve(static_cast<std::size_t>(M));
    noise_.reserve(static_cast<std::size_t>(M));
    transport_.reserve(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
        drift_.push_back(steps_.to_terminal(j + 1).cwiseProduct(steps_.drift_weight(j)));
        noise_.push_back(steps_.to_terminal(j + 1).cwiseProduct(steps_.noise_weight(j)));
        std::vector<Vector> nodes;
        if (!spec.drift.is_zero()) {
            for (double u : detail::kGaussNodes) {
                const double s = std::min(grid.node(j) + u * grid.dt(), grid.terminal());
                nodes.push_back(spec.family.multipliers(s, grid.terminal()));
            }
        }
        transport_.push_back(std::move(nodes));
    }
    if (spec.diffusion.is_constant()) {
        const Vector zero = Vector::Zero(N);
        const Matrix z = spec.diffusion.evaluate(grid.t0(), zero, N, K);
        zbar_.reserve(static_cast<std::size_t>(M));
        for (int j = 0; j < M; ++j) {
            zbar_.push_back(noise_[static_cast<std::size_t>(j)].asDiagonal() * z);
            zbar_sq_.push_back(zbar_.back().squaredNorm());
        }
        if (phi.constant_hessian()) {
            trace_.reserve(static_cast<std::size_t>(M));
            for (int j = 0; j < M; ++j) trace_.push_back(phi.trace(zero, zbar_[static_cast<std::size_t>(j)]));
        }
    }
}

const Matrix* CalculusTable::constant_zbar(int j) const {
    return zbar_.empty() ? nullptr : &zbar_[static_cast<std::size_t>(j)];
}

double CalculusTable::constant_zbar_squared(int j) const {
    return zbar_sq_.empty() ? std::numeric_limits<double>::quiet_NaN() : zbar_sq_[static_cast<std::size_t>(j)];
}

const Vector* CalculusTable::constant_trace(int j) const {
    return trace_.empty() ? nullptr : &trace_[static_cast<std::size_t>(j)];
}

PathDecomposition decompose_path(const TestFunction& phi, const MildItoProcessSpec& spec, const CalculusTable& table,
                                 const WienerPath& w, const StoppingRule& rule) {
    const TimeGrid& grid = table.grid();
    const int M = grid.steps();
    const int N = spec.modes();
    const int K = spec.noise_modes;
    const double dt = grid.dt();
    const SamplePath path = simulate(spec, table.steps(), w);

    PathDecomposition d;
    d.time_integral = Vector::Zero(phi.dim());
    d.stochastic_integral = Vector::Zero(phi.dim());
    d.stop = M;

    Vector xbar = table.steps().to_terminal(0).cwiseProduct(path.states.col(0));
    d.initial = phi.value(xbar);
    Vector x(N), y(N), noise(N), dw(K), term(phi.dim());
    Matrix zbar;
    for (int j = 0; j < M; ++j) {
        if (hits(rule, xbar)) {
            d.stop = j;
            break;
        }
        const double t = grid.node(j);
        x = path.states.col(j);
        term.setZero();
        if (!spec.drift.is_zero()) {
            spec.drift.evaluate(t, x, y);
            term += phi.first(xbar, table.drift_weight(j).cwiseProduct(y));
            double acc = 0.0;
            const auto& transport = table.quadrature_transport(j);
            for (std::size_t q = 0; q < transport.size(); ++q)
                acc += detail::kGaussWeights[q] * transport[q].cwiseProduct(y).norm();
            d.drift_integral += acc * dt;
        }
        if (!spec.diffusion.is_zero()) {
            const Matrix* zc = table.constant_zbar(j);
            if (zc == nullptr) zbar = table.noise_weight(j).asDiagonal() * spec.diffusion.evaluate(t, x, N, K);
            const Matrix& zb = zc ? *zc : zbar;
            const Vector* tc = table.constant_trace(j);
            term += 0.5 * dt * (tc ? *tc : phi.trace(xbar, zb));
            d.diffusion_integral += (zc ? table.constant_zbar_squared(j) : zb.squaredNorm()) * dt;

            dw = w.increments().col(j);
            spec.diffusion.apply(t, x, dw, noise);
            d.stochastic_integral += phi.first(xbar, table.noise_weight(j).cwiseProduct(noise));
        }
        d.time_integral += term;
        d.abs_time_integral += term.norm();
        xbar = table.steps().to_terminal(j + 1).cwiseProduct(path.states.col(j + 1));
    }
    d.terminal = phi.value(xbar);
    return d;
}

Vector ito_residual(const TestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& grid,
                    const WienerPath& w) {
    const CalculusTable table(phi, spec, grid);
    return decompose_path(phi, spec, table, w).residual();
}

Vector standard_ito_residual(const TimeTestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& grid,
                             const WienerPath& w) {
    if (spec.family.kind() != EvolutionKind::identity)
        throw DomainError("the standard Ito formula applies to the identity evolution family");
    const StepTable table(spec, grid);
    const SamplePath path = simulate(spec, table, w);
    const int M = grid.steps();
    const int N = spec.modes();
    const int K = spec.noise_modes;
    const double dt = grid.dt();

    Vector integral = Vector::Zero(phi.dim());
    Vector x(N), y(N), noise(N), dw(K);
    for (int j = 0; j < M; ++j) {
        const double t = grid.node(j);
        x = path.states.col(j);
        integral += phi.time_derivative(t, x) * dt;
        if (!spec.drift.is_zero()) {
            spec.drift.evaluate(t, x, y);
            integral += phi.first(t, x, y) * dt;
        }
        if (!spec.diffusion.is_zero()) {
            integral += 0.5 * dt * phi.trace(t, x, spec.diffusion.evaluate(t, x, N, K));
            dw = w.increments().col(j);
            spec.diffusion.apply(t, x, dw, noise);
            integral += phi.first(t, x, noise);
        }
    }
    return phi.value(grid.terminal(), path.states.col(M)) - phi.value(grid.t0(), path.states.col(0)) - integral;
}

// ---------------------------------------------------------------------------

bool DynkinResult::holds() const {
    for (Eigen::Index i = 0; i < gap.size(); ++i)
        if (std::fabs(gap[i]) > tolerance_factor * stderr_gap[i] + 1e-10 * std::max(1.0, std::fabs(rhs[i])))
            return false;
    return true;
}

bool DynkinResult::martingale_holds() const {
    for (Eigen::Index i = 0; i < martingale_mean.size(); ++i)
        if (std::fabs(martingale_mean[i]) > 3.0 * martingale_stderr[i] + 1e-10) return false;
    return true;
}

DynkinResult dynkin_gap(const TestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& grid,
                        const StoppingRule& rule, const MonteCarlo& mc) {
    const auto paths = decompose_ensemble(phi, spec, grid, rule, mc);
    const int m = phi.dim();
    std::vector<Vector> lhs, rhs, diff, mart;
    lhs.reserve(paths.size());
    rhs.reserve(paths.size());
    diff.reserve(paths.size());
    mart.reserve(paths.size());
    for (const auto& d : paths) {
        lhs.push_back(d.terminal);
        rhs.push_back(d.initial + d.time_integral);
        diff.push_back(lhs.back() - rhs.back());
        mart.push_back(d.stochastic_integral);
    }
    const Moments l = component_stats(lhs, m);
    const Moments r = component_stats(rhs, m);
    const Moments g = component_stats(diff, m);
    const Moments s = component_stats(mart, m);

    DynkinResult out;
    out.lhs = l.mean;
    out.rhs = r.mean;
    out.stderr_lhs = l.stderr_mean;
    out.stderr_rhs = r.stderr_mean;
    out.gap = l.mean - r.mean;
    out.stderr_gap = g.stderr_mean;
    out.martingale_mean = s.mean;
    out.martingale_stderr = s.stderr_mean;
    out.tolerance_factor = rule.kind == StoppingRule::Kind::hitting ? 5.0 : 3.0;
    return out;
}

bool MomentReport::finite() const {
    return std::isfinite(initial) && std::isfinite(drift) && std::isfinite(diffusion);
}

WeakEstimate weak_estimate_gap(const TestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& grid,
                               const MonteCarlo& mc) {
    const auto paths = decompose_ensemble(phi, spec, grid, StoppingRule::terminal(), mc);
    const int m = phi.dim();
    const double p = phi.growth_exponent();

    WeakEstimate out;
    out.moments.exponent = p;
    out.moments.initial =
        std::pow(spec.family.multipliers(grid.t0(), grid.terminal()).cwiseProduct(spec.initial.coeffs()).norm(), p);
    std::vector<double> drift_moments(paths.size()), diffusion_moments(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        drift_moments[i] = std::pow(paths[i].drift_integral, p);
        diffusion_moments[i] = std::pow(paths[i].diffusion_integral, 0.5 * p);
    }
    out.moments.drift = sample_stats(drift_moments).mean;
    out.moments.diffusion = sample_stats(diffusion_moments).mean;
    if (!out.moments.finite())
        throw HypothesisViolatedError("moment condition for test functions of polynomial growth fails: "
                                      "E||S X0||^p, E|int ||S Y|| ds|^p or E|int ||S Z||^2 ds|^{p/2} is not finite");

    std::vector<Vector> terminal;
    terminal.reserve(paths.size());
    for (const auto& d : paths) terminal.push_back(d.terminal);
    const Vector mean_terminal = component_stats(terminal, m).mean;
    out.lhs = mean_terminal.norm();

    // phi(S X0) is deterministic; the integral term is a per-path mean.
    const double initial_norm = paths.front().initial.norm();
    const Vector direction = out.lhs > 0.0 ? Vector(mean_terminal / out.lhs) : Vector::Zero(m);
    std::vector<double> rhs_samples(paths.size()), slack_samples(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        rhs_samples[i] = initial_norm + paths[i].abs_time_integral;
        // Linearisation of ||mean|| around the sample mean (delta method).
        slack_samples[i] = rhs_samples[i] - direction.dot(paths[i].terminal);
    }
    out.rhs = sample_stats(rhs_samples).mean;
    out.slack = out.rhs - out.lhs;
    out.stderr_slack = sample_stats(slack_samples).stderr_mean;
    return out;
}

// ---------------------------------------------------------------------------

SelfConvergence self_convergence(const ResidualFunction& residual, const TimeGrid& finest, std::vector<int> levels,
                                 int noise_modes, const MonteCarlo& mc) {
    if (levels.size() < 2) throw DomainError("self-convergence needs at least two levels");
    if (mc.paths < 1) throw DomainError("self-convergence needs at least one path");
    std::sort(levels.begin(), levels.end());
    std::vector<TimeGrid> grids;
    for (int level : levels) {
        if (level < 1 || finest.steps() % level != 0)
            throw DomainError("self-convergence levels must divide the finest step count");
        grids.push_back(finest.coarsened(finest.steps() / level));
    }
    const std::size_t L = levels.size();
    std::vector<double> squares(static_cast<std::size_t>(mc.paths) * L);
    parallel_for(static_cast<std::size_t>(mc.paths), mc.workers, [&](std::size_t p) {
        const WienerPath fine = wiener_sample(finest, noise_modes, mc.seed, p);
        for (std::size_t l = 0; l < L; ++l) {
            const WienerPath w = fine.coarsen(finest.steps() / levels[l]);
            squares[p * L + l] = residual(grids[l], w).squaredNorm();
        }
    });

    SelfConvergence out;
    out.steps = levels;
    std::vector<double> column(static_cast<std::size_t>(mc.paths));
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t p = 0; p < column.size(); ++p) column[p] = squares[p * L + l];
        out.rms.push_back(std::sqrt(sample_stats(column).mean));
    }
    // Slope of log(rms) against log(dt) by least squares.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        const double lx = std::log(grids[l].dt());
        const double ly = std::log(std::max(out.rms[l], std::numeric_limits<double>::min()));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(L);
    out.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

SelfConvergence ito_self_convergence(const TestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& finest,
                                     std::vector<int> levels, const MonteCarlo& mc) {
    // One table per level, built up front so the per-path work is only simulation.
    std::sort(levels.begin(), levels.end());
    std::vector<std::shared_ptr<const CalculusTable>> tables;
    for (int level : levels) {
        if (level < 1 || finest.steps() % level != 0)
            throw DomainError("self-convergence levels must divide the finest step count");
        tables.push_back(std::make_shared<const CalculusTable>(phi, spec, finest.coarsened(finest.steps() / level)));
    }
    auto residual = [&](const TimeGrid& grid, const WienerPath& w) {
        for (const auto& t : tables)
            if (t->grid().steps() == grid.steps()) return decompose_path(phi, spec, *t, w).residual();
        throw DomainError("self-convergence: no table for level");
    };
    return self_convergence(residual, finest, levels, spec.noise_modes, mc);
}

}  // namespace mildito
