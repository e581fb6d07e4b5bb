#include "mildito/spectral_space.hpp"

#include "mildito/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace mildito {

namespace {

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
}

double checked_pow(double base, double exponent) { return std::exp(exponent * std::log(base)); }

}  // namespace

double eigenvalue(int n) {
    if (n < 1) throw DomainError("eigenvalue index must be >= 1, got " + std::to_string(n));
    const double k = static_cast<double>(n);
    return std::numbers::pi * std::numbers::pi * k * k;
}

double eigenfunction_value(int n, double x) {
    if (n < 1) throw DomainError("eigenfunction index must be >= 1, got " + std::to_string(n));
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("eigenfunction argument outside [0,1]");
    return std::numbers::sqrt2 * std::sin(static_cast<double>(n) * std::numbers::pi * x);
}

// ---------------------------------------------------------------------------

SineBasisVector::SineBasisVector(Vector coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 1) throw DomainError("SineBasisVector needs at least one mode");
    require_finite(coeffs_, "SineBasisVector");
}

SineBasisVector SineBasisVector::zero(int modes) { return SineBasisVector(Vector::Zero(modes)); }

SineBasisVector SineBasisVector::unit(int n, int modes) {
    if (n < 1 || n > modes) throw DomainError("unit vector index out of range");
    Vector c = Vector::Zero(modes);
    c[n - 1] = 1.0;
    return SineBasisVector(std::move(c));
}

SineBasisVector SineBasisVector::operator+(const SineBasisVector& other) const {
    if (other.size() != size()) throw DomainError("truncation mismatch");
    return SineBasisVector(coeffs_ + other.coeffs_);
}

SineBasisVector SineBasisVector::operator-(const SineBasisVector& other) const {
    if (other.size() != size()) throw DomainError("truncation mismatch");
    return SineBasisVector(coeffs_ - other.coeffs_);
}

SineBasisVector SineBasisVector::operator*(double c) const { return SineBasisVector(coeffs_ * c); }

GridFunction::GridFunction(Vector values) : values_(std::move(values)) {
    if (values_.size() < 1) throw DomainError("GridFunction needs resolution >= 1");
    require_finite(values_, "GridFunction");
}

GridFunction GridFunction::constant(double value, int resolution) {
    if (resolution < 1) throw DomainError("GridFunction needs resolution >= 1");
    return GridFunction(Vector::Constant(resolution, value));
}

GridFunction GridFunction::operator+(const GridFunction& other) const {
    if (other.resolution() != resolution()) throw DomainError("grid resolution mismatch");
    return GridFunction(values_ + other.values_);
}

GridFunction GridFunction::operator-(const GridFunction& other) const {
    if (other.resolution() != resolution()) throw DomainError("grid resolution mismatch");
    return GridFunction(values_ - other.values_);
}

GridFunction GridFunction::operator*(double c) const { return GridFunction(values_ * c); }

GridFunction GridFunction::pointwise_product(const GridFunction& other) const {
    if (other.resolution() != resolution()) throw DomainError("grid resolution mismatch");
    return GridFunction(values_.cwiseProduct(other.values_));
}

// ---------------------------------------------------------------------------

SineTransform::SineTransform(int modes, int resolution)
    : modes_(modes), resolution_(resolution), basis_(resolution, modes) {
    if (modes < 1) throw DomainError("SineTransform needs N >= 1");
    if (resolution < 1) throw DomainError("SineTransform needs J >= 1");
    for (int n = 1; n <= modes; ++n)
        for (int j = 0; j < resolution; ++j)
            basis_(j, n - 1) = std::numbers::sqrt2 *
                               std::sin(static_cast<double>(n) * std::numbers::pi * grid_point(j, resolution));
}

void SineTransform::synthesize_into(const Vector& coeffs, Vector& values) const {
    values.noalias() = basis_ * coeffs;
}

void SineTransform::analyze_into(const Vector& values, Vector& coeffs) const {
    coeffs.noalias() = basis_.transpose() * values;
    coeffs /= static_cast<double>(resolution_);
}

GridFunction SineTransform::synthesize(const SineBasisVector& v) const {
    if (v.size() != modes_) throw DomainError("synthesize: truncation mismatch");
    Vector values(resolution_);
    synthesize_into(v.coeffs(), values);
    return GridFunction(std::move(values));
}

SineBasisVector SineTransform::analyze(const GridFunction& g) const {
    if (g.resolution() != resolution_) throw DomainError("analyze: resolution mismatch");
    Vector coeffs(modes_);
    analyze_into(g.values(), coeffs);
    return SineBasisVector(std::move(coeffs));
}

GridFunction synthesize(const SineBasisVector& v, int resolution) {
    return SineTransform(v.size(), resolution).synthesize(v);
}

SineBasisVector analyze(const GridFunction& g, int modes) {
    return SineTransform(modes, g.resolution()).analyze(g);
}

double lp_norm(std::span<const double> values, double p) {
    if (!(p >= 1.0)) throw DomainError("lp_norm requires p >= 1");
    if (values.empty()) throw DomainError("lp_norm of an empty grid");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::fabs(v));
        return m;
    }
    // Scale by the max to keep |g|^p in range for large p.
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::fabs(v));
    if (scale == 0.0) return 0.0;
    double acc = 0.0;
    if (p == 2.0) {
        for (double v : values) acc += (v / scale) * (v / scale);
        return scale * std::sqrt(acc / static_cast<double>(values.size()));
    }
    for (double v : values) acc += std::pow(std::fabs(v) / scale, p);
    return scale * std::pow(acc / static_cast<double>(values.size()), 1.0 / p);
}

double lp_norm(const GridFunction& g, double p) {
    return lp_norm(std::span<const double>(g.values().data(), static_cast<std::size_t>(g.resolution())), p);
}

Vector fractional_multipliers(FractionalIndex r, int modes) {
    Vector m(modes);
    for (int n = 1; n <= modes; ++n) m[n - 1] = r.value == 0.0 ? 1.0 : checked_pow(eigenvalue(n), r.value);
    return m;
}

double hr_norm(const SineBasisVector& v, FractionalIndex r) {
    return v.coeffs().cwiseProduct(fractional_multipliers(r, v.size())).norm();
}

SineBasisVector apply_fractional(FractionalIndex r, const SineBasisVector& v) {
    return SineBasisVector(v.coeffs().cwiseProduct(fractional_multipliers(r, v.size())));
}

double semigroup_multiplier(int n, double t) {
    if (!(t >= 0.0)) throw DomainError("semigroup time must be >= 0");
    return std::exp(-eigenvalue(n) * t);
}

SineBasisVector apply_semigroup(double t, const SineBasisVector& v) {
    Vector c = v.coeffs();
    for (int n = 1; n <= v.size(); ++n) c[n - 1] *= semigroup_multiplier(n, t);
    return SineBasisVector(std::move(c));
}

// ---------------------------------------------------------------------------

EvolutionFamily::EvolutionFamily(EvolutionKind kind, int modes, double t0, double terminal)
    : kind_(kind), modes_(modes), t0_(t0), terminal_(terminal) {
    if (modes < 1) throw DomainError("EvolutionFamily needs N >= 1");
    if (!(t0 >= 0.0) || !(terminal > t0)) throw DomainError("EvolutionFamily needs 0 <= t0 < T");
}

void EvolutionFamily::check_window(double s, double t) const {
    // Small slack for accumulated rounding in grid nodes.
    const double eps = 1e-12 * std::max(1.0, terminal_);
    if (s < t0_ - eps || t > terminal_ + eps) throw DomainError("evolution window outside [t0, T]");
    if (s > t) throw DomainError("evolution family requires s <= t");
}

double EvolutionFamily::multiplier(int n, double s, double t) const {
    check_window(s, t);
    if (kind_ == EvolutionKind::identity) return 1.0;
    return std::exp(-eigenvalue(n) * (t - s));
}

Vector EvolutionFamily::multipliers(double s, double t) const {
    check_window(s, t);
    Vector m(modes_);
    for (int n = 1; n <= modes_; ++n)
        m[n - 1] = kind_ == EvolutionKind::identity ? 1.0 : std::exp(-eigenvalue(n) * (t - s));
    return m;
}

Vector EvolutionFamily::averaged_multipliers(double s, double t) const {
    check_window(s, t);
    const double h = t - s;
    if (!(h > 0.0)) throw DomainError("averaged multipliers need t > s");
    Vector m(modes_);
    for (int n = 1; n <= modes_; ++n) {
        if (kind_ == EvolutionKind::identity) {
            m[n - 1] = 1.0;
            continue;
        }
        const double x = eigenvalue(n) * h;
        m[n - 1] = -std::expm1(-x) / x;
    }
    return m;
}

Vector EvolutionFamily::rms_multipliers(double s, double t) const {
    check_window(s, t);
    const double h = t - s;
    if (!(h > 0.0)) throw DomainError("rms multipliers need t > s");
    Vector m(modes_);
    for (int n = 1; n <= modes_; ++n) {
        if (kind_ == EvolutionKind::identity) {
            m[n - 1] = 1.0;
            continue;
        }
        const double x = 2.0 * eigenvalue(n) * h;
        m[n - 1] = std::sqrt(-std::expm1(-x) / x);
    }
    return m;
}

SineBasisVector ef_apply(const EvolutionFamily& family, double s, double t, const SineBasisVector& v) {
    if (!(s < t)) throw DomainError("ef_apply requires s < t");
    if (v.size() != family.modes()) throw DomainError("ef_apply: truncation mismatch");
    return SineBasisVector(v.coeffs().cwiseProduct(family.multipliers(s, t)));
}

double composition_residual(const EvolutionFamily& family, double t1, double t2, double t3,
                            const SineBasisVector& v) {
    const auto two_step = ef_apply(family, t2, t3, ef_apply(family, t1, t2, v));
    const auto one_step = ef_apply(family, t1, t3, v);
    return (two_step.coeffs() - one_step.coeffs()).norm();
}

}  // namespace mildito
