#pragma once

// gamma-radonifying operators of finite rank.
//
// An operator A: U -> V is stored through the images of an orthonormal basis
// u_1..u_K of U (its "columns"). Its gamma-norm is
//   ||A||_gamma = ( E || sum_k g_k A u_k ||_V^2 )^{1/2},   g_k iid N(0,1),
// which is the Hilbert-Schmidt norm when V is a Hilbert space and has no
// closed form for V = L^p. The latter case is estimated by Monte Carlo.

#include "mildito/spectral_space.hpp"

#include <cstdint>
#include <functional>
#include <variant>

namespace mildito {

/// H_r: columns are sine coefficients, norm ||(-A)^r c||_2.
struct HilbertScale {
    double r = 0.0;
};

/// L^p on the midpoint grid: columns are grid values.
struct LpGrid {
    double p = 2.0;
};

/// V_r = interpolation space of the Dirichlet Laplacian on L^p:
/// columns are sine coefficients, norm ||synthesize((-A)^r c, J)||_{L^p}.
struct SobolevLp {
    double r = 0.0;
    double p = 2.0;
    int resolution = kDefaultGridResolution;
};

using Codomain = std::variant<HilbertScale, LpGrid, SobolevLp>;

/// True for H_r and for V_r with p = 2 (= H_r on the grid).
bool is_hilbert(const Codomain& codomain);

class FiniteRankGammaOperator {
public:
    FiniteRankGammaOperator(Matrix columns, Codomain codomain);

    static FiniteRankGammaOperator zero(int rows, int noise_modes, Codomain codomain);
    /// Column k = e_k for k <= min(N, K), codomain H_0.
    static FiniteRankGammaOperator truncated_identity(int modes, int noise_modes);

    int rows() const noexcept { return static_cast<int>(columns_.rows()); }
    int noise_modes() const noexcept { return static_cast<int>(columns_.cols()); }
    const Matrix& columns() const noexcept { return columns_; }
    const Codomain& codomain() const noexcept { return codomain_; }

    /// Sum of squared entries (the HS norm in H_0 for coefficient columns).
    double frobenius_squared() const noexcept { return frobenius_squared_; }

    /// sum_k a_k column_k.
    Vector apply_coordinates(const Vector& a) const;

    FiniteRankGammaOperator scaled(double c) const;

private:
    Matrix columns_;
    Codomain codomain_;
    double frobenius_squared_;
};

/// Hilbert-Schmidt norm; throws UnsupportedCodomainError for L^p codomains.
double gamma_norm_exact(const FiniteRankGammaOperator& op);

struct McEstimate {
    double estimate = 0.0;
    double stderr_estimate = 0.0;
};

/// Monte-Carlo gamma-norm with M >= 2 Gaussian draws. Draw i uses its own
/// counter-keyed substream, so the result is identical for any worker count.
McEstimate gamma_norm_mc(const FiniteRankGammaOperator& op, int samples, std::uint64_t seed,
                         int workers = 1);

/// ||.||_V of one element of the codomain, given as a column.
double codomain_norm(const Codomain& codomain, const Vector& column);

/// Gamma-norm: exact for Hilbert codomains, Monte Carlo otherwise.
McEstimate gamma_norm(const FiniteRankGammaOperator& op, int samples, std::uint64_t seed, int workers = 1);

/// Paired-inequality outcome: lhs <= rhs up to `tolerance`.
struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double stderr_lhs = 0.0;
    double tolerance = 0.0;
    bool holds() const { return lhs <= rhs + tolerance; }
};

struct McOptions {
    int samples = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
};

/// Bounded operator on the codomain with a known operator norm.
struct BoundedOperator {
    Matrix matrix;
    double norm = 0.0;

    /// Diagonal multiplier; its norm max|d| is valid on H_r and on L^p(grid).
    static BoundedOperator diagonal(const Vector& d);
    /// General matrix on H_r coefficients: norm = ||D^r M D^{-r}||_2 (SVD).
    static BoundedOperator on_hilbert_scale(Matrix m, double r);
    /// The heat semigroup e^{tA} on the first `modes` coefficients.
    static BoundedOperator semigroup(double t, int modes);
};

/// Spectral norm of a square matrix (largest singular value).
double spectral_norm(const Matrix& m);

struct IdealComposition {
    FiniteRankGammaOperator op;
    BoundCheck check;  // ||left * mid * right||_gamma <= ||left|| ||mid||_gamma ||right||
};

/// left * mid * right, with right a K x K matrix acting on noise coordinates.
IdealComposition ideal_compose(const BoundedOperator& left, const FiniteRankGammaOperator& mid,
                               const Matrix& right, const McOptions& mc = {});

/// Bilinear map between codomain columns with a declared bound on its norm.
class BilinearForm {
public:
    using Evaluator = std::function<Vector(const Vector&, const Vector&)>;

    BilinearForm(Evaluator evaluator, double declared_norm, int target_dim);

    /// <v1, v2>_H on coefficient columns (norm 1).
    static BilinearForm inner_product();
    /// (v1^T B_i v2)_i with declared norm (sum_i ||B_i||_2^2)^{1/2}.
    static BilinearForm from_matrices(std::vector<Matrix> blocks);

    Vector operator()(const Vector& v1, const Vector& v2) const { return evaluator_(v1, v2); }
    double declared_norm() const noexcept { return declared_norm_; }
    int target_dim() const noexcept { return target_dim_; }

private:
    Evaluator evaluator_;
    double declared_norm_;
    int target_dim_;
};

struct BilinearSum {
    Vector value;
    BoundCheck check;  // ||value|| <= ||beta|| ||a1||_gamma ||a2||_gamma
};

/// sum_k beta(a1 u_k, a2 u_k).
BilinearSum bilinear_sum(const BilinearForm& beta, const FiniteRankGammaOperator& a1,
                         const FiniteRankGammaOperator& a2, const McOptions& mc = {});

/// (E|N(0,1)|^p)^{1/p} from 2^{p/2} Gamma((p+1)/2) / sqrt(pi).
double gaussian_abs_moment_root(double p);

/// Truncated (-A)^{-r} as an element of gamma(H, L^p(grid)).
FiniteRankGammaOperator smoothing_operator(FractionalIndex r, double p, int modes,
                                           int resolution = kDefaultGridResolution);

struct SmoothingBound {
    McEstimate mc;
    double exact_hilbert = 0.0;  // HS norm of the same operator into H
    double bound = 0.0;          // (E|N|^p)^{1/p} (sum_{n<=N} n^{-4r})^{1/2}
    bool holds() const;
};

/// Throws DivergenceError for r <= 1/4 and DomainError for p < 2.
SmoothingBound smoothing_gamma_bound(FractionalIndex r, double p, int modes, int samples,
                                     std::uint64_t seed, int resolution = kDefaultGridResolution,
                                     int workers = 1);

/// The embedding H_{-eps} -> V_beta truncated to N modes.
struct Embedding {
    FiniteRankGammaOperator op;  // images of the H_{-eps} orthonormal basis rho_n^eps e_n
    double eps = 0.0;
    double beta = 0.0;
    double p = 2.0;
    double bound = 0.0;  // (E|N|^p)^{1/p} (sum_{n<=N} n^{4(beta+eps)})^{1/2}

    /// The embedding acts as the identity on coefficients.
    SineBasisVector apply(const SineBasisVector& v) const { return v; }
    BoundCheck check(const McOptions& mc) const;
};

/// Throws DivergenceError unless beta + eps < -1/4; DomainError for eps < 0 or p < 2.
Embedding iota_embedding(FractionalIndex eps, FractionalIndex beta, double p, int modes,
                         int resolution = kDefaultGridResolution);

/// sup over truncated w != 0 of ||w||_{L^q} / ||w||_{H_s}, estimated from
/// `samples` random directions plus all coordinate directions (a lower bound).
double estimate_sobolev_constant(double s, double q, int modes, int resolution, int samples,
                                 std::uint64_t seed);

/// (Bv)u = v . u as an operator H -> H_beta, computed on the grid of v.
class MultiplicationOperator {
public:
    MultiplicationOperator(GridFunction v, FractionalIndex beta, double p, int modes);

    SineBasisVector apply(const SineBasisVector& u) const;
    const GridFunction& multiplier() const noexcept { return v_; }
    double beta() const noexcept { return beta_; }
    double p() const noexcept { return p_; }

    /// Sobolev constant sup ||w||_{L^{2p/(p-2)}} / ||w||_{H_{-beta}} (estimated).
    double sobolev_constant(int samples = 10000, std::uint64_t seed = 1) const;

    /// ||(Bv)u||_{H_beta} <= safety * C * ||v||_{L^p} ||u||_H.
    BoundCheck check(const SineBasisVector& u, double sobolev_constant, double safety = 2.0) const;

private:
    GridFunction v_;
    double beta_;
    double p_;
    SineTransform transform_;
};

/// Throws DomainError unless p > 2 and beta <= -1/(2p).
MultiplicationOperator multiplication_operator(const GridFunction& v, FractionalIndex beta, double p, int modes);

}  // namespace mildito
