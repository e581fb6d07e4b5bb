#include "mildito/gamma_operators.hpp"

#include "mildito/errors.hpp"
#include "mildito/parallel.hpp"
#include "mildito/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mildito {

namespace {

constexpr int kMcBlock = 64;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Linear map taking a column to the vector whose plain norm (Euclidean or
// grid L^p) is the codomain norm of the column.
struct NormSpace {
    Matrix map;         // applied to columns; empty means identity
    double p = 2.0;     // exponent of the grid norm
    bool euclidean = true;
};

NormSpace norm_space(const Codomain& codomain, int rows) {
    return std::visit(
        overloaded{
            [&](const HilbertScale& h) {
                NormSpace ns;
                if (h.r != 0.0) ns.map = fractional_multipliers(FractionalIndex(h.r), rows).asDiagonal();
                return ns;
            },
            [&](const LpGrid& l) {
                NormSpace ns;
                ns.p = l.p;
                ns.euclidean = false;
                return ns;
            },
            [&](const SobolevLp& s) {
                NormSpace ns;
                if (s.p == 2.0) {
                    ns.map = fractional_multipliers(FractionalIndex(s.r), rows).asDiagonal();
                    return ns;
                }
                const SineTransform transform(rows, s.resolution);
                ns.map = transform.basis() * fractional_multipliers(FractionalIndex(s.r), rows).asDiagonal();
                ns.p = s.p;
                ns.euclidean = false;
                return ns;
            },
        },
        codomain);
}

double plain_norm(const NormSpace& ns, const Vector& v) {
    if (ns.euclidean) return v.norm();
    return lp_norm(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), ns.p);
}

Matrix mapped(const NormSpace& ns, const Matrix& columns) {
    if (ns.map.size() == 0) return columns;
    return ns.map * columns;
}

bool same_codomain(const Codomain& a, const Codomain& b) {
    if (a.index() != b.index()) return false;
    return std::visit(
        overloaded{
            [&](const HilbertScale& x) { return x.r == std::get<HilbertScale>(b).r; },
            [&](const LpGrid& x) { return x.p == std::get<LpGrid>(b).p; },
            [&](const SobolevLp& x) {
                const auto& y = std::get<SobolevLp>(b);
                return x.r == y.r && x.p == y.p && x.resolution == y.resolution;
            },
        },
        a);
}

}  // namespace

bool is_hilbert(const Codomain& codomain) {
    return std::visit(overloaded{
                          [](const HilbertScale&) { return true; },
                          [](const LpGrid&) { return false; },
                          [](const SobolevLp& s) { return s.p == 2.0; },
                      },
                      codomain);
}

// ---------------------------------------------------------------------------

FiniteRankGammaOperator::FiniteRankGammaOperator(Matrix columns, Codomain codomain)
    : columns_(std::move(columns)), codomain_(codomain), frobenius_squared_(columns_.squaredNorm()) {
    if (columns_.cols() < 1 || columns_.rows() < 1) throw DomainError("operator needs K >= 1 columns of length >= 1");
    if (!columns_.allFinite()) throw DomainError("operator has non-finite columns");
}

FiniteRankGammaOperator FiniteRankGammaOperator::zero(int rows, int noise_modes, Codomain codomain) {
    return FiniteRankGammaOperator(Matrix::Zero(rows, noise_modes), codomain);
}

FiniteRankGammaOperator FiniteRankGammaOperator::truncated_identity(int modes, int noise_modes) {
    return FiniteRankGammaOperator(Matrix::Identity(modes, noise_modes), HilbertScale{0.0});
}

Vector FiniteRankGammaOperator::apply_coordinates(const Vector& a) const {
    if (a.size() != columns_.cols()) throw DomainError("noise coordinate length mismatch");
    return columns_ * a;
}

FiniteRankGammaOperator FiniteRankGammaOperator::scaled(double c) const {
    return FiniteRankGammaOperator(columns_ * c, codomain_);
}

double gamma_norm_exact(const FiniteRankGammaOperator& op) {
    if (!is_hilbert(op.codomain()))
        throw UnsupportedCodomainError("exact gamma-norm needs a Hilbert codomain");
    const NormSpace ns = norm_space(op.codomain(), op.rows());
    return mapped(ns, op.columns()).norm();
}

double codomain_norm(const Codomain& codomain, const Vector& column) {
    const NormSpace ns = norm_space(codomain, static_cast<int>(column.size()));
    if (ns.map.size() == 0) return plain_norm(ns, column);
    return plain_norm(ns, ns.map * column);
}

McEstimate gamma_norm_mc(const FiniteRankGammaOperator& op, int samples, std::uint64_t seed, int workers) {
    if (samples < 2) throw DomainError("gamma_norm_mc needs at least 2 samples");
    const NormSpace ns = norm_space(op.codomain(), op.rows());
    const Matrix image = mapped(ns, op.columns());
    const int K = op.noise_modes();
    std::vector<double> squares(static_cast<std::size_t>(samples));
    const std::size_t blocks = (static_cast<std::size_t>(samples) + kMcBlock - 1) / kMcBlock;
    parallel_for(blocks, workers, [&](std::size_t b) {
        const int begin = static_cast<int>(b) * kMcBlock;
        const int count = std::min(kMcBlock, samples - begin);
        Matrix draws(K, count);
        for (int i = 0; i < count; ++i) {
            NormalStream stream(seed, StreamTag::gamma_mc, static_cast<std::uint64_t>(begin + i));
            for (int k = 0; k < K; ++k) draws(k, i) = stream.normal();
        }
        const Matrix values = image * draws;
        for (int i = 0; i < count; ++i) {
            const Vector v = values.col(i);
            const double n = plain_norm(ns, v);
            squares[static_cast<std::size_t>(begin + i)] = n * n;
        }
    });
    const SampleStats stats = sample_stats(squares);
    McEstimate result;
    result.estimate = std::sqrt(stats.mean);
    // Delta method for sqrt(mean).
    result.stderr_estimate = result.estimate > 0.0 ? stats.stderr_mean / (2.0 * result.estimate) : 0.0;
    return result;
}

McEstimate gamma_norm(const FiniteRankGammaOperator& op, int samples, std::uint64_t seed, int workers) {
    if (is_hilbert(op.codomain())) return {gamma_norm_exact(op), 0.0};
    return gamma_norm_mc(op, samples, seed, workers);
}

// ---------------------------------------------------------------------------

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()[0];
}

BoundedOperator BoundedOperator::diagonal(const Vector& d) {
    return {Matrix(d.asDiagonal()), d.cwiseAbs().maxCoeff()};
}

BoundedOperator BoundedOperator::on_hilbert_scale(Matrix m, double r) {
    if (m.rows() != m.cols()) throw DomainError("bounded operator must be square");
    const Vector scale = fractional_multipliers(FractionalIndex(r), static_cast<int>(m.rows()));
    const Matrix conjugated = scale.asDiagonal() * m * scale.cwiseInverse().asDiagonal();
    const double norm = spectral_norm(conjugated);
    return {std::move(m), norm};
}

BoundedOperator BoundedOperator::semigroup(double t, int modes) {
    Vector d(modes);
    for (int n = 1; n <= modes; ++n) d[n - 1] = semigroup_multiplier(n, t);
    return diagonal(d);
}

IdealComposition ideal_compose(const BoundedOperator& left, const FiniteRankGammaOperator& mid,
                               const Matrix& right, const McOptions& mc) {
    if (left.matrix.cols() != mid.rows() || left.matrix.rows() != mid.rows())
        throw DomainError("ideal_compose: left operator shape does not match codomain");
    if (right.rows() != mid.noise_modes() || right.cols() != mid.noise_modes())
        throw DomainError("ideal_compose: right operator must be K x K");
    FiniteRankGammaOperator composed(left.matrix * mid.columns() * right, mid.codomain());
    const double right_norm = spectral_norm(right);
    const McEstimate lhs = gamma_norm(composed, mc.samples, mc.seed, mc.workers);
    const McEstimate middle = gamma_norm(mid, mc.samples, mc.seed, mc.workers);
    BoundCheck check;
    check.lhs = lhs.estimate;
    check.rhs = left.norm * middle.estimate * right_norm;
    const double se_rhs = left.norm * right_norm * middle.stderr_estimate;
    check.stderr_lhs = std::hypot(lhs.stderr_estimate, se_rhs);
    check.tolerance = is_hilbert(mid.codomain()) ? 1e-10 * std::max(1.0, check.rhs) : 3.0 * check.stderr_lhs;
    return {std::move(composed), check};
}

// ---------------------------------------------------------------------------

BilinearForm::BilinearForm(Evaluator evaluator, double declared_norm, int target_dim)
    : evaluator_(std::move(evaluator)), declared_norm_(declared_norm), target_dim_(target_dim) {
    if (!(declared_norm >= 0.0)) throw DomainError("declared bilinear norm must be >= 0");
    if (target_dim < 1) throw DomainError("bilinear target dimension must be >= 1");
}

BilinearForm BilinearForm::inner_product() {
    return BilinearForm([](const Vector& a, const Vector& b) { return Vector::Constant(1, a.dot(b)); }, 1.0, 1);
}

BilinearForm BilinearForm::from_matrices(std::vector<Matrix> blocks) {
    if (blocks.empty()) throw DomainError("bilinear form needs at least one block");
    double sq = 0.0;
    for (const auto& b : blocks) {
        const double n = spectral_norm(b);
        sq += n * n;
    }
    const int dim = static_cast<int>(blocks.size());
    return BilinearForm(
        [blocks = std::move(blocks)](const Vector& a, const Vector& b) {
            Vector out(static_cast<Eigen::Index>(blocks.size()));
            for (std::size_t i = 0; i < blocks.size(); ++i) out[static_cast<Eigen::Index>(i)] = a.dot(blocks[i] * b);
            return out;
        },
        std::sqrt(sq), dim);
}

BilinearSum bilinear_sum(const BilinearForm& beta, const FiniteRankGammaOperator& a1,
                         const FiniteRankGammaOperator& a2, const McOptions& mc) {
    if (a1.noise_modes() != a2.noise_modes()) throw DomainError("bilinear_sum: noise truncations differ");
    if (a1.rows() != a2.rows() || !same_codomain(a1.codomain(), a2.codomain()))
        throw DomainError("bilinear_sum: operators must share a codomain");
    Vector total = Vector::Zero(beta.target_dim());
    for (int k = 0; k < a1.noise_modes(); ++k) total += beta(a1.columns().col(k), a2.columns().col(k));
    const McEstimate n1 = gamma_norm(a1, mc.samples, mc.seed, mc.workers);
    const McEstimate n2 = gamma_norm(a2, mc.samples, mc.seed, mc.workers);
    BoundCheck check;
    check.lhs = total.norm();
    check.rhs = beta.declared_norm() * n1.estimate * n2.estimate;
    check.stderr_lhs = beta.declared_norm() * std::hypot(n1.stderr_estimate * n2.estimate, n1.estimate * n2.stderr_estimate);
    check.tolerance = is_hilbert(a1.codomain()) ? 1e-10 * std::max(1.0, check.rhs) : 3.0 * check.stderr_lhs;
    return {std::move(total), check};
}

// ---------------------------------------------------------------------------

double gaussian_abs_moment_root(double p) {
    if (!(p > 0.0)) throw DomainError("Gaussian moment exponent must be > 0");
    const double log_moment =
        0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi);
    return std::exp(log_moment / p);
}

FiniteRankGammaOperator smoothing_operator(FractionalIndex r, double p, int modes, int resolution) {
    const SineTransform transform(modes, resolution);
    Matrix cols = transform.basis() * fractional_multipliers(-r, modes).asDiagonal();
    return FiniteRankGammaOperator(std::move(cols), LpGrid{p});
}

bool SmoothingBound::holds() const {
    const double rel = mc.estimate > 0.0 ? mc.stderr_estimate / mc.estimate : 0.0;
    return mc.estimate <= bound * (1.0 + 3.0 * rel);
}

SmoothingBound smoothing_gamma_bound(FractionalIndex r, double p, int modes, int samples, std::uint64_t seed,
                                     int resolution, int workers) {
    if (!(r.value > 0.25))
        throw DivergenceError("smoothing bound requires r > 1/4 (sum n^{-4r} diverges), got r = " +
                              std::to_string(r.value));
    if (!(p >= 2.0)) throw DomainError("smoothing bound requires p >= 2");
    if (modes < 1) throw DomainError("smoothing bound requires N >= 1");
    SmoothingBound out;
    const auto op = smoothing_operator(r, p, modes, resolution);
    out.mc = gamma_norm_mc(op, samples, seed, workers);
    out.exact_hilbert = fractional_multipliers(-r, modes).norm();
    double sum = 0.0;
    for (int n = modes; n >= 1; --n) sum += std::pow(static_cast<double>(n), -4.0 * r.value);
    out.bound = gaussian_abs_moment_root(p) * std::sqrt(sum);
    return out;
}

Embedding iota_embedding(FractionalIndex eps, FractionalIndex beta, double p, int modes, int resolution) {
    if (!(eps.value >= 0.0)) throw DomainError("embedding requires ε >= 0");
    if (!(beta.value + eps.value < -0.25))
        throw DivergenceError("embedding requires β + ε < −¼ (got β = " + std::to_string(beta.value) +
                              ", ε = " + std::to_string(eps.value) + ")");
    if (!(p >= 2.0)) throw DomainError("embedding requires p >= 2");
    if (modes < 1) throw DomainError("embedding requires N >= 1");
    // Orthonormal basis of H_{-eps}: rho_n^{eps} e_n; its images are the same coefficients.
    Matrix cols = fractional_multipliers(eps, modes).asDiagonal();
    Embedding e{FiniteRankGammaOperator(std::move(cols), SobolevLp{beta.value, p, resolution}), eps.value,
                beta.value, p, 0.0};
    double sum = 0.0;
    for (int n = modes; n >= 1; --n) sum += std::pow(static_cast<double>(n), 4.0 * (beta.value + eps.value));
    e.bound = gaussian_abs_moment_root(p) * std::sqrt(sum);
    return e;
}

BoundCheck Embedding::check(const McOptions& mc) const {
    const McEstimate norm = gamma_norm(op, mc.samples, mc.seed, mc.workers);
    BoundCheck c;
    c.lhs = norm.estimate;
    c.rhs = bound;
    c.stderr_lhs = norm.stderr_estimate;
    c.tolerance = is_hilbert(op.codomain()) ? 1e-10 * std::max(1.0, bound) : 3.0 * norm.stderr_estimate;
    return c;
}

// ---------------------------------------------------------------------------

double estimate_sobolev_constant(double s, double q, int modes, int resolution, int samples, std::uint64_t seed) {
    if (!(q >= 1.0)) throw DomainError("Sobolev estimate needs q >= 1");
    if (modes < 1 || resolution < 1) throw DomainError("Sobolev estimate needs N, J >= 1");
    const SineTransform transform(modes, resolution);
    const Vector weights = fractional_multipliers(FractionalIndex(s), modes);
    const Vector inverse_weights = weights.cwiseInverse();

    auto ratio = [&](const Vector& c) {
        const double denom = c.cwiseProduct(weights).norm();
        if (denom == 0.0) return 0.0;
        const Vector values = transform.basis() * c;
        return lp_norm(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())), q) / denom;
    };

    double best = 0.0;
    for (int n = 1; n <= modes; ++n) best = std::max(best, ratio(Vector::Unit(modes, n - 1)));

    for (std::size_t i = 0; i < static_cast<std::size_t>(std::max(samples, 0)); ++i) {
        NormalStream stream(seed, StreamTag::sobolev, i);
        Vector c(modes);
        const double decay = 0.5 * stream.uniform();
        switch (i % 3) {
            case 0:  // Gaussian coefficients balanced in H_s
                for (int n = 1; n <= modes; ++n)
                    c[n - 1] = stream.normal() * inverse_weights[n - 1] * std::pow(static_cast<double>(n), -decay);
                break;
            case 1: {  // H_s-representer of point evaluation at a random x0, damped
                const double x0 = stream.uniform();
                for (int n = 1; n <= modes; ++n)
                    c[n - 1] = inverse_weights[n - 1] * inverse_weights[n - 1] * eigenfunction_value(n, x0) *
                               std::pow(static_cast<double>(n), -decay);
                break;
            }
            default:  // white coefficients
                for (int n = 1; n <= modes; ++n) c[n - 1] = stream.normal();
                break;
        }
        best = std::max(best, ratio(c));
    }
    return best;
}

MultiplicationOperator::MultiplicationOperator(GridFunction v, FractionalIndex beta, double p, int modes)
    : v_(std::move(v)), beta_(beta.value), p_(p), transform_(modes, v_.resolution()) {}

SineBasisVector MultiplicationOperator::apply(const SineBasisVector& u) const {
    if (u.size() != transform_.modes()) throw DomainError("multiplication operator: truncation mismatch");
    Vector values(transform_.resolution());
    transform_.synthesize_into(u.coeffs(), values);
    values = values.cwiseProduct(v_.values());
    Vector coeffs(transform_.modes());
    transform_.analyze_into(values, coeffs);
    return SineBasisVector(std::move(coeffs));
}

double MultiplicationOperator::sobolev_constant(int samples, std::uint64_t seed) const {
    return estimate_sobolev_constant(-beta_, 2.0 * p_ / (p_ - 2.0), transform_.modes(), transform_.resolution(),
                                     samples, seed);
}

BoundCheck MultiplicationOperator::check(const SineBasisVector& u, double sobolev, double safety) const {
    BoundCheck c;
    c.lhs = hr_norm(apply(u), FractionalIndex(beta_));
    c.rhs = safety * sobolev * lp_norm(v_, p_) * hr_norm(u, FractionalIndex(0.0));
    c.tolerance = 1e-10 * std::max(1.0, c.rhs);
    return c;
}

MultiplicationOperator multiplication_operator(const GridFunction& v, FractionalIndex beta, double p, int modes) {
    if (!(p > 2.0)) throw DomainError("multiplication operator requires p > 2");
    if (!(beta.value <= -1.0 / (2.0 * p)))
        throw DomainError("multiplication operator requires β <= −1/(2p) (d = 1)");
    if (modes < 1) throw DomainError("multiplication operator requires N >= 1");
    return MultiplicationOperator(v, beta, p, modes);
}

}  // namespace mildito
