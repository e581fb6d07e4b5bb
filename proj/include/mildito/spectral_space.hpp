#pragma once

// Function spaces over (0,1) in the Dirichlet sine eigenbasis.
//
// The Dirichlet Laplacian A on H = L^2(0,1) has eigenpairs
//   A e_n = -rho_n e_n,   rho_n = pi^2 n^2,   e_n(x) = sqrt(2) sin(n pi x).
// Every space in the library is realised on this basis:
//   * H_r (interpolation scale of -A) carries ||v||_{H_r} = ||(-A)^r v||_H,
//     stored as plain coefficients; the exponent lives in the norm.
//   * L^p(0,1) is realised on a uniform midpoint grid x_j = (j - 1/2)/J with
//     the normalised counting measure (lambda((0,1)) = 1).

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace mildito {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr int kDefaultGridResolution = 256;
inline constexpr int kDefaultModes = 64;

/// Exponent of a fractional power or of an interpolation space.
struct FractionalIndex {
    double value = 0.0;
    constexpr explicit FractionalIndex(double v) : value(v) {}
    FractionalIndex operator-() const { return FractionalIndex(-value); }
};

/// rho_n = pi^2 n^2; throws DomainError for n < 1.
double eigenvalue(int n);

/// sqrt(2) sin(n pi x); throws DomainError for n < 1 or x outside [0,1].
double eigenfunction_value(int n, double x);

/// Midpoint x_j = (j + 1/2)/J for zero-based j.
inline double grid_point(int j, int resolution) {
    return (static_cast<double>(j) + 0.5) / static_cast<double>(resolution);
}

/// Coefficients c_1..c_N in the sine eigenbasis (zero-based storage).
class SineBasisVector {
public:
    explicit SineBasisVector(Vector coeffs);

    static SineBasisVector zero(int modes);
    /// e_n, one-based n.
    static SineBasisVector unit(int n, int modes);

    int size() const noexcept { return static_cast<int>(coeffs_.size()); }
    const Vector& coeffs() const noexcept { return coeffs_; }
    double operator[](int i) const { return coeffs_[i]; }

    SineBasisVector operator+(const SineBasisVector& other) const;
    SineBasisVector operator-(const SineBasisVector& other) const;
    SineBasisVector operator*(double c) const;

private:
    Vector coeffs_;
};

/// Point values on the midpoint grid of (0,1).
class GridFunction {
public:
    explicit GridFunction(Vector values);

    static GridFunction constant(double value, int resolution);

    int resolution() const noexcept { return static_cast<int>(values_.size()); }
    const Vector& values() const noexcept { return values_; }
    double operator[](int j) const { return values_[j]; }

    GridFunction operator+(const GridFunction& other) const;
    GridFunction operator-(const GridFunction& other) const;
    GridFunction operator*(double c) const;
    GridFunction pointwise_product(const GridFunction& other) const;

private:
    Vector values_;
};

/// Precomputed synthesis/analysis matrix for a fixed (N, J). Immutable once
/// built, so one instance can be shared by all workers.
class SineTransform {
public:
    SineTransform(int modes, int resolution);

    int modes() const noexcept { return modes_; }
    int resolution() const noexcept { return resolution_; }

    /// J x N matrix with entries sqrt(2) sin(n pi x_j).
    const Matrix& basis() const noexcept { return basis_; }

    GridFunction synthesize(const SineBasisVector& v) const;
    SineBasisVector analyze(const GridFunction& g) const;

    void synthesize_into(const Vector& coeffs, Vector& values) const;
    void analyze_into(const Vector& values, Vector& coeffs) const;

private:
    int modes_;
    int resolution_;
    Matrix basis_;
};

/// g_j = sum_n c_n sqrt(2) sin(n pi x_j).
GridFunction synthesize(const SineBasisVector& v, int resolution);

/// c_n = (1/J) sum_j g_j sqrt(2) sin(n pi x_j).
SineBasisVector analyze(const GridFunction& g, int modes);

/// ((1/J) sum_j |g_j|^p)^{1/p}; p = +inf gives the max norm. Throws for p < 1.
double lp_norm(const GridFunction& g, double p);
double lp_norm(std::span<const double> values, double p);

/// (sum_n rho_n^{2r} c_n^2)^{1/2}.
double hr_norm(const SineBasisVector& v, FractionalIndex r);

/// rho_n^r for each mode n = 1..modes.
Vector fractional_multipliers(FractionalIndex r, int modes);

/// c_n -> rho_n^r c_n.
SineBasisVector apply_fractional(FractionalIndex r, const SineBasisVector& v);

/// e^{-rho_n t}; throws for t < 0.
double semigroup_multiplier(int n, double t);

/// c_n -> e^{-rho_n t} c_n; throws for t < 0.
SineBasisVector apply_semigroup(double t, const SineBasisVector& v);

enum class EvolutionKind { heat_semigroup, identity };

/// Two-parameter family S_{s,t}, t0 <= s < t <= T, acting diagonally on the
/// first `modes` coefficients. Satisfies S_{t2,t3} S_{t1,t2} = S_{t1,t3}.
class EvolutionFamily {
public:
    EvolutionFamily(EvolutionKind kind, int modes, double t0, double terminal);

    EvolutionKind kind() const noexcept { return kind_; }
    int modes() const noexcept { return modes_; }
    double t0() const noexcept { return t0_; }
    double terminal() const noexcept { return terminal_; }

    /// Multiplier of S_{s,t} on mode n (one-based); s == t gives 1.
    double multiplier(int n, double s, double t) const;

    /// Per-mode multipliers of S_{s,t} (s <= t allowed, s == t is the identity).
    Vector multipliers(double s, double t) const;

    /// (1/h) int_s^t S_{u,t} du on each mode, h = t - s > 0.
    Vector averaged_multipliers(double s, double t) const;

    /// ((1/h) int_s^t S_{u,t}^2 du)^{1/2} on each mode, h = t - s > 0.
    Vector rms_multipliers(double s, double t) const;

private:
    void check_window(double s, double t) const;

    EvolutionKind kind_;
    int modes_;
    double t0_;
    double terminal_;
};

/// S_{s,t} v; throws DomainError unless t0 <= s < t <= T.
SineBasisVector ef_apply(const EvolutionFamily& family, double s, double t, const SineBasisVector& v);

/// ||S_{t2,t3} S_{t1,t2} v - S_{t1,t3} v||_H.
double composition_residual(const EvolutionFamily& family, double t1, double t2, double t3,
                            const SineBasisVector& v);

}  // namespace mildito
