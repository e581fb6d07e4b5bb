#include "mildito/nemytskii.hpp"

#include "mildito/errors.hpp"
#include "mildito/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mildito {

namespace {

double sin_derivative(int m, double x) {
    switch (m & 3) {
        case 0: return std::sin(x);
        case 1: return std::cos(x);
        case 2: return -std::sin(x);
        default: return -std::cos(x);
    }
}

double tanh_derivative(int m, double x) {
    const double t = std::tanh(x);
    const double s = 1.0 - t * t;
    switch (m) {
        case 0: return t;
        case 1: return s;
        case 2: return -2.0 * t * s;
        default: return -2.0 * s * (1.0 - 3.0 * t * t);
    }
}

double rational_derivative(int m, double x) {
    const double x2 = x * x;
    const double d = 1.0 + x2;
    switch (m) {
        case 0: return x / d;
        case 1: return (1.0 - x2) / (d * d);
        case 2: return 2.0 * x * (x2 - 3.0) / (d * d * d);
        default: return -6.0 * (x2 * x2 - 6.0 * x2 + 1.0) / (d * d * d * d);
    }
}

const std::vector<ScalarField>& registry() {
    // sup|tanh''| = 4/(3 sqrt 3) at tanh^2 = 1/3; sup|tanh''''| is attained at tanh^2 = (15 - sqrt 105)/30.
    // For x/(1+x^2): sup|f''| = (3 + 2 sqrt 2)/4 and sup|f''''| is attained near x = 0.268.
    static const std::vector<ScalarField> fields = {
        ScalarField("sin", 3, sin_derivative, {1.0, 1.0, 1.0, 1.0}, {1.0, 1.0, 1.0, 1.0}),
        ScalarField("tanh", 3, tanh_derivative, {1.0, 1.0, 0.76980035891950102, 2.0},
                    {1.0, 0.76980035891950102, 2.0, 4.0858855029696562}),
        ScalarField("rational", 3, rational_derivative, {0.5, 1.0, 1.4571067811865475, 6.0},
                    {1.0, 1.4571067811865475, 6.0, 19.492785792574935}),
    };
    return fields;
}

double norm_of(const Vector& v, double p) {
    return lp_norm(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), p);
}

Vector derivative_values(const ScalarField& f, int m, const Vector& v) {
    Vector out(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) out[j] = f.derivative(m, v[j]);
    return out;
}

Vector directions_product(std::span<const GridFunction> directions, int resolution) {
    Vector prod = Vector::Ones(resolution);
    for (const auto& u : directions) {
        if (u.resolution() != resolution) throw DomainError("direction resolution mismatch");
        prod = prod.cwiseProduct(u.values());
    }
    return prod;
}

double directions_norm_product(std::span<const GridFunction> directions, double s) {
    double prod = 1.0;
    for (const auto& u : directions) prod *= lp_norm(u, s);
    return prod;
}

std::vector<GridFunction> random_directions(int m, int resolution, std::uint64_t seed, std::uint64_t index) {
    std::vector<GridFunction> dirs;
    dirs.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        dirs.push_back(random_grid_function(resolution, seed, index * 8 + static_cast<std::uint64_t>(i) + 1));
    return dirs;
}

void check_order(const ScalarField& f, int order, int m, const char* what) {
    if (m < 0) throw DomainError(std::string(what) + ": derivative order must be >= 0");
    if (m > order)
        throw OrderError(std::string(what) + ": derivative order " + std::to_string(m) + " exceeds n = " +
                         std::to_string(order) + " of field '" + f.name() + "'");
}

FiniteRankGammaOperator multiplier_operator(const DiffusionCoefficient& B, const Vector& multiplier) {
    const SineTransform out(B.modes, B.resolution);
    const SineTransform in(B.noise_modes, B.resolution);
    Matrix columns = out.basis().transpose() * (multiplier.asDiagonal() * in.basis());
    columns /= static_cast<double>(B.resolution);
    return FiniteRankGammaOperator(std::move(columns), SobolevLp{B.beta, B.p, B.resolution});
}

double relative_mc_lhs(const FiniteRankGammaOperator& op, const McOptions& mc, double scale, double& stderr_out) {
    const McEstimate e = gamma_norm(op, mc.samples, mc.seed, mc.workers);
    stderr_out = e.stderr_estimate / scale;
    return e.estimate / scale;
}

}  // namespace

ScalarField::ScalarField(std::string name, int order, Derivative derivative,
                         std::array<double, kMaxOrder + 1> sup_norms, std::array<double, kMaxOrder + 1> lipschitz)
    : name_(std::move(name)), order_(order), derivative_(std::move(derivative)), sup_(sup_norms), lip_(lipschitz) {
    if (order < 0 || order > kMaxOrder) throw DomainError("ScalarField order must be in [0, 3]");
}

double ScalarField::derivative(int m, double x) const {
    check_order(*this, order_, m, "ScalarField");
    return derivative_(m, x);
}

double ScalarField::sup_norm(int m) const {
    check_order(*this, order_, m, "sup_norm");
    return sup_[static_cast<std::size_t>(m)];
}

double ScalarField::lipschitz(int m) const {
    check_order(*this, order_, m, "lipschitz");
    return lip_[static_cast<std::size_t>(m)];
}

const ScalarField& field_by_name(std::string_view name) {
    for (const auto& f : registry())
        if (f.name() == name) return f;
    throw DomainError("unknown field '" + std::string(name) + "' (known: sin, tanh, rational)");
}

std::vector<std::string> field_names() {
    std::vector<std::string> names;
    for (const auto& f : registry()) names.push_back(f.name());
    return names;
}

// ---------------------------------------------------------------------------

NemytskiiOperator::NemytskiiOperator(const ScalarField& field, int order, double p, double q)
    : field_(&field), order_(order), p_(p), q_(q) {
    if (order < 0 || order > field.order())
        throw OrderError("Nemytskii order n = " + std::to_string(order) + " exceeds the order of field '" +
                         field.name() + "'");
    if (!(p >= 1.0)) throw DomainError("Nemytskii operator requires p >= 1");
    if (!(q > static_cast<double>(order) * p))
        throw DomainError("Nemytskii operator requires q > n p (got q = " + std::to_string(q) +
                          ", n p = " + std::to_string(order * p) + ")");
}

GridFunction nemytskii_apply(const NemytskiiOperator& F, const GridFunction& v) {
    return GridFunction(derivative_values(F.field(), 0, v.values()));
}

GridFunction nemytskii_derivative(const NemytskiiOperator& F, int m, const GridFunction& v,
                                  std::span<const GridFunction> directions) {
    check_order(F.field(), F.order(), m, "nemytskii_derivative");
    if (static_cast<int>(directions.size()) != m)
        throw DomainError("nemytskii_derivative needs exactly m directions");
    return GridFunction(
        derivative_values(F.field(), m, v.values()).cwiseProduct(directions_product(directions, v.resolution())));
}

double holder_bound_iii(const NemytskiiOperator& F, int m, double r) {
    check_order(F.field(), F.order(), m, "holder_bound_iii");
    if (!(r >= static_cast<double>(m) * F.p()))
        throw DomainError("Hölder bound requires r >= m p (got r = " + std::to_string(r) + ")");
    // lambda((0,1)) = 1, so the volume factor is 1 for any exponent.
    return F.field().sup_norm(m);
}

GridFunction random_grid_function(int resolution, std::uint64_t seed, std::uint64_t index, double amplitude) {
    if (resolution < 1) throw DomainError("random grid function needs J >= 1");
    NormalStream stream(seed, StreamTag::instances, index);
    Vector values(resolution);
    const int kind = static_cast<int>(index % 3);
    if (kind == 0) {
        // Smooth: random sine series with algebraic decay.
        const int modes = std::min(resolution, 16);
        Vector c(modes);
        for (int n = 1; n <= modes; ++n) c[n - 1] = stream.normal() / static_cast<double>(n);
        values = SineTransform(modes, resolution).basis() * c;
    } else if (kind == 1) {
        for (int j = 0; j < resolution; ++j) values[j] = stream.normal();
    } else {
        // Localised bump plus offset: stresses the ratio of different L^r norms.
        const double centre = stream.uniform();
        const double width = 0.02 + 0.2 * stream.uniform();
        const double offset = stream.normal();
        const double height = 3.0 * stream.normal();
        for (int j = 0; j < resolution; ++j) {
            const double z = (grid_point(j, resolution) - centre) / width;
            values[j] = offset + height * std::exp(-z * z);
        }
    }
    return GridFunction(values * amplitude);
}

SampledBound check_holder_iii(const NemytskiiOperator& F, int m, double r, int samples, int resolution,
                              std::uint64_t seed) {
    SampledBound out;
    out.rhs = holder_bound_iii(F, m, r);
    for (int i = 0; i < samples; ++i) {
        const auto index = static_cast<std::uint64_t>(i);
        const GridFunction v = random_grid_function(resolution, seed, index * 8, 3.0);
        const auto dirs = random_directions(m, resolution, seed, index);
        const double denom = directions_norm_product(dirs, r);
        if (denom == 0.0) continue;
        const double lhs = lp_norm(nemytskii_derivative(F, m, v, dirs), F.p()) / denom;
        out.lhs_sup = std::max(out.lhs_sup, lhs);
    }
    return out;
}

SampledBound lipschitz_bound_iv(const NemytskiiOperator& F, int m, double r, double s, const GridFunction& v,
                                const GridFunction& w, int samples, std::uint64_t seed) {
    check_order(F.field(), F.order(), m, "lipschitz_bound_iv");
    if (!(r >= 1.0) || !(s >= 1.0)) throw DomainError("Lipschitz bound requires r, s >= 1");
    if (!(1.0 / r + static_cast<double>(m) / s <= 1.0 / F.p() * (1.0 + 1e-12)))
        throw DomainError("Lipschitz bound requires 1/r + m/s <= 1/p (got r = " + std::to_string(r) +
                          ", s = " + std::to_string(s) + ")");
    if (v.resolution() != w.resolution()) throw DomainError("Lipschitz bound: resolution mismatch");

    SampledBound out;
    out.rhs = F.field().lipschitz(m) * lp_norm(v - w, r);
    const Vector diff = derivative_values(F.field(), m, v.values()) - derivative_values(F.field(), m, w.values());
    for (int i = 0; i < samples; ++i) {
        const auto dirs = random_directions(m, v.resolution(), seed, static_cast<std::uint64_t>(i));
        const double denom = directions_norm_product(dirs, s);
        if (denom == 0.0) continue;
        const Vector lhs = diff.cwiseProduct(directions_product(dirs, v.resolution()));
        out.lhs_sup = std::max(out.lhs_sup, norm_of(lhs, F.p()) / denom);
    }
    return out;
}

SampledBound lipschitz_bound_v(const NemytskiiOperator& F, int m, double r, const GridFunction& v,
                               const GridFunction& w, int samples, std::uint64_t seed) {
    if (!(r >= static_cast<double>(m + 1) * F.p()))
        throw DomainError("Lipschitz bound with s = r requires r >= (m + 1) p (got r = " + std::to_string(r) + ")");
    return lipschitz_bound_iv(F, m, r, r, v, w, samples, seed);
}

// ---------------------------------------------------------------------------

double DiffusionCoefficient::p_threshold() const {
    const double n = static_cast<double>(order);
    return std::max(n / (2.0 * (std::fabs(beta) - 0.25)), 2.0 * n);
}

double DiffusionCoefficient::embedding_eps() const {
    return static_cast<double>(order) / (2.0 * p * delta);
}

double DiffusionCoefficient::sobolev_q() const {
    const double pd = p * delta;
    return 2.0 * pd / (pd - 2.0 * static_cast<double>(order));
}

void DiffusionCoefficient::validate() const {
    if (field == nullptr) throw DomainError("diffusion coefficient has no field");
    if (order < 1 || order > field->order())
        throw OrderError("diffusion order n = " + std::to_string(order) + " must lie in [1, " +
                         std::to_string(field->order()) + "] for field '" + field->name() + "'");
    if (!(beta < -0.25))
        throw DomainError("diffusion coefficient requires β < −¼ (got β = " + std::to_string(beta) + ")");
    const double threshold = p_threshold();
    if (!(p > threshold))
        throw DomainError("diffusion coefficient requires p > max{n/(2(|β|−¼)), 2n} = " +
                          std::to_string(threshold) + " (got p = " + std::to_string(p) + ")");
    if (!(delta > threshold / p && delta < 1.0))
        throw DomainError("diffusion coefficient requires δ in (" + std::to_string(threshold / p) +
                          ", 1) (got δ = " + std::to_string(delta) + ")");
    if (modes < 1 || noise_modes < 1 || resolution < 1)
        throw DomainError("diffusion coefficient requires N, K, J >= 1");
}

DiffusionCoefficient DiffusionCoefficient::make(const ScalarField& b, int order, double p, double beta, int modes,
                                                int noise_modes, int resolution) {
    DiffusionCoefficient B;
    B.field = &b;
    B.order = order;
    B.p = p;
    B.beta = beta;
    B.delta = static_cast<double>(order) / static_cast<double>(order + 1);
    B.modes = modes;
    B.noise_modes = noise_modes;
    B.resolution = resolution;
    B.validate();
    return B;
}

FiniteRankGammaOperator diffusion_apply(const DiffusionCoefficient& B, const GridFunction& v) {
    B.validate();
    if (v.resolution() != B.resolution) throw DomainError("diffusion_apply: resolution mismatch");
    return multiplier_operator(B, derivative_values(*B.field, 0, v.values()));
}

FiniteRankGammaOperator diffusion_derivative(const DiffusionCoefficient& B, int k, const GridFunction& v,
                                             std::span<const GridFunction> directions) {
    B.validate();
    check_order(*B.field, B.order, k, "diffusion_derivative");
    if (static_cast<int>(directions.size()) != k)
        throw DomainError("diffusion_derivative needs exactly k directions");
    if (v.resolution() != B.resolution) throw DomainError("diffusion_derivative: resolution mismatch");
    return multiplier_operator(
        B, derivative_values(*B.field, k, v.values()).cwiseProduct(directions_product(directions, B.resolution)));
}

double diffusion_sobolev_constant(const DiffusionCoefficient& B, int samples, std::uint64_t seed) {
    B.validate();
    return estimate_sobolev_constant(B.embedding_eps(), B.sobolev_q(), B.modes, B.resolution, samples, seed);
}

double diffusion_bound(const DiffusionCoefficient& B, double sobolev_constant, double factor) {
    B.validate();
    const double exponent = 4.0 * (B.beta + B.embedding_eps());
    double sum = 0.0;
    for (int l = B.modes; l >= 1; --l) sum += std::pow(static_cast<double>(l), exponent);
    return gaussian_abs_moment_root(B.p) * std::sqrt(sum) * kSobolevSafety * sobolev_constant * factor;
}

double diffusion_lipschitz_min_r(const DiffusionCoefficient& B, int k) {
    B.validate();
    check_order(*B.field, B.order, k, "diffusion_lipschitz_min_r");
    return B.p * B.delta / (static_cast<double>(B.order) - static_cast<double>(k) * B.delta);
}

BoundCheck diffusion_check_iv(const DiffusionCoefficient& B, int k, const GridFunction& v,
                              std::span<const GridFunction> directions, double sobolev_constant,
                              const McOptions& mc) {
    const auto op = diffusion_derivative(B, k, v, directions);
    const double scale = directions_norm_product(directions, B.p);
    BoundCheck c;
    c.rhs = diffusion_bound(B, sobolev_constant, B.field->sup_norm(k));
    if (scale == 0.0) return c;
    c.lhs = relative_mc_lhs(op, mc, scale, c.stderr_lhs);
    c.tolerance = 3.0 * c.stderr_lhs;
    return c;
}

BoundCheck diffusion_check_v(const DiffusionCoefficient& B, int k, double r, const GridFunction& v,
                             const GridFunction& w, std::span<const GridFunction> directions,
                             double sobolev_constant, const McOptions& mc) {
    if (!(r >= diffusion_lipschitz_min_r(B, k) * (1.0 - 1e-12)))
        throw DomainError("diffusion Lipschitz estimate requires r >= p δ / (n − k δ)");
    const auto a = diffusion_derivative(B, k, v, directions);
    const auto b = diffusion_derivative(B, k, w, directions);
    const FiniteRankGammaOperator diff(a.columns() - b.columns(), a.codomain());
    const double scale = directions_norm_product(directions, B.p);
    BoundCheck c;
    c.rhs = diffusion_bound(B, sobolev_constant, B.field->lipschitz(k)) * lp_norm(v - w, r);
    if (scale == 0.0) return c;
    c.lhs = relative_mc_lhs(diff, mc, scale, c.stderr_lhs);
    c.tolerance = 3.0 * c.stderr_lhs;
    return c;
}

}  // namespace mildito
