#pragma once

// Simulation of mild Ito processes
//   X_t = S_{t0,t} X_0 + int_{t0}^t S_{s,t} Y_s ds + int_{t0}^t S_{s,t} Z_s dW_s
// on a uniform time grid, truncated to N sine modes and K noise modes.
//
// Coefficients are frozen at the left node of each step. The step update is
//   X_{m+1} = S X_m + Phi Y_m dt + Q Z_m dW_m,
// where, per mode and for S = S_{tau_m, tau_{m+1}},
//   Phi = (1/dt) int S_{s,tau_{m+1}} ds,   Q = ((1/dt) int S_{s,tau_{m+1}}^2 ds)^{1/2}.
// Phi and Q are 1 for the identity family (plain Euler-Maruyama). For the heat
// semigroup they integrate the smoothing over the step exactly, so the
// covariance of the noise contribution matches the continuous-time one for
// frozen Z even when rho_n dt is large.

#include "mildito/gamma_operators.hpp"
#include "mildito/nemytskii.hpp"
#include "mildito/spectral_space.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace mildito {

inline constexpr int kDefaultTimeSteps = 200;

class TimeGrid {
public:
    /// Uniform grid t0 = tau_0 < ... < tau_M = T; throws DomainError unless T > t0 >= 0 and M >= 1.
    TimeGrid(double t0, double terminal, int steps);

    double t0() const noexcept { return t0_; }
    double terminal() const noexcept { return terminal_; }
    int steps() const noexcept { return steps_; }
    double dt() const noexcept { return (terminal_ - t0_) / static_cast<double>(steps_); }
    /// tau_j; tau_M is exactly T.
    double node(int j) const;

    /// Grid with steps / factor steps; throws unless factor divides steps.
    TimeGrid coarsened(int factor) const;

private:
    double t0_;
    double terminal_;
    int steps_;
};

/// Increments of a K-mode truncated cylindrical Wiener process.
class WienerPath {
public:
    WienerPath(Matrix increments, double dt, std::uint64_t seed, std::uint64_t path_index);

    int steps() const noexcept { return static_cast<int>(increments_.cols()); }
    int noise_modes() const noexcept { return static_cast<int>(increments_.rows()); }
    double dt() const noexcept { return dt_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t path_index() const noexcept { return path_index_; }

    /// K x M matrix; column j holds dW_j.
    const Matrix& increments() const noexcept { return increments_; }
    double increment(int step, int mode) const { return increments_(mode, step); }

    /// Sums of `factor` consecutive increments (the same Brownian path on a coarser grid).
    WienerPath coarsen(int factor) const;

private:
    Matrix increments_;
    double dt_;
    std::uint64_t seed_;
    std::uint64_t path_index_;
};

/// dW_{j,k} ~ N(0, dt) iid, a pure function of (seed, path_index, j, k).
WienerPath wiener_sample(const TimeGrid& grid, int noise_modes, std::uint64_t seed, std::uint64_t path_index);

/// Mild drift Y(t, x), stored as plain sine coefficients.
class DriftMap {
public:
    using Function = std::function<Vector(double t, const Vector& x)>;

    static DriftMap zero();
    static DriftMap constant(Vector y);
    static DriftMap function(Function f);
    /// Y(x) = analyze(f(synthesize(x))) with f from the field registry.
    static DriftMap nemytskii(const ScalarField& f, int modes, int resolution = kDefaultGridResolution);
    /// Y(x) = -c x (linear mean reversion).
    static DriftMap linear(double c);

    bool is_zero() const noexcept { return kind_ == Kind::zero; }
    bool is_constant() const noexcept { return kind_ != Kind::function; }

    /// Writes Y(t, x) into `out` (resized to x.size()).
    void evaluate(double t, const Vector& x, Vector& out) const;

private:
    enum class Kind { zero, constant, function };
    Kind kind_ = Kind::zero;
    Vector value_;
    Function function_;
};

/// Mild diffusion Z(t, x) as an N x K coefficient matrix (column k = Z u_k).
class DiffusionMap {
public:
    using Function = std::function<Matrix(double t, const Vector& x)>;

    static DiffusionMap zero();
    static DiffusionMap constant(Matrix z);
    static DiffusionMap truncated_identity(int modes, int noise_modes);
    static DiffusionMap function(Function f);
    /// Z(x) = columns of diffusion_apply(B, synthesize(x)).
    static DiffusionMap from_coefficient(const DiffusionCoefficient& B);

    bool is_zero() const noexcept { return kind_ == Kind::zero; }
    bool is_constant() const noexcept { return kind_ != Kind::function; }

    /// Z(t, x), shape N x K (zero for the zero map).
    Matrix evaluate(double t, const Vector& x, int modes, int noise_modes) const;

    /// out = Z(t, x) dw; uses a sparse product for constant Z.
    void apply(double t, const Vector& x, const Vector& dw, Vector& out) const;

private:
    enum class Kind { zero, constant, function };
    Kind kind_ = Kind::zero;
    std::shared_ptr<const Matrix> dense_;
    std::shared_ptr<const Eigen::SparseMatrix<double>> sparse_;
    bool identity_ = false;  // constant and equal to the N x K truncated identity
    Function function_;
};

struct MildItoProcessSpec {
    EvolutionFamily family;
    SineBasisVector initial;  // X_{t0}
    DriftMap drift;
    DiffusionMap diffusion;
    int noise_modes = kDefaultModes;  // K

    int modes() const noexcept { return family.modes(); }
    /// Throws DomainError if shapes disagree with the family or the grid window.
    void validate(const TimeGrid& grid) const;
};

/// Ornstein-Uhlenbeck: Y = 0, Z = truncated identity, heat semigroup, X_0 = 0.
MildItoProcessSpec ou_spec(int modes, int noise_modes, double t0, double terminal);

struct SamplePath {
    std::uint64_t path_index = 0;
    Matrix states;       // N x (M+1); column j = X_{tau_j}
    Matrix regularized;  // N x (M+1) when requested, else empty

    int steps() const noexcept { return static_cast<int>(states.cols()) - 1; }
    SineBasisVector state(int j) const { return SineBasisVector(states.col(j)); }
    SineBasisVector regularized_state(int j) const { return SineBasisVector(regularized.col(j)); }
    bool has_regularized() const noexcept { return regularized.size() != 0; }
};

/// Per-step multipliers of a (spec, grid) pair, shared by every path.
class StepTable {
public:
    StepTable(const MildItoProcessSpec& spec, const TimeGrid& grid);

    const TimeGrid& grid() const noexcept { return grid_; }
    /// S_{tau_j, tau_{j+1}}.
    const Vector& step(int j) const { return step_[static_cast<std::size_t>(j)]; }
    /// Phi_j dt (drift weight over step j).
    const Vector& drift_weight(int j) const { return drift_[static_cast<std::size_t>(j)]; }
    /// Q_j (noise weight over step j).
    const Vector& noise_weight(int j) const { return noise_[static_cast<std::size_t>(j)]; }
    /// S_{tau_j, T}; the last entry is all ones.
    const Vector& to_terminal(int j) const { return to_terminal_[static_cast<std::size_t>(j)]; }

private:
    TimeGrid grid_;
    std::vector<Vector> step_;
    std::vector<Vector> drift_;
    std::vector<Vector> noise_;
    std::vector<Vector> to_terminal_;
};

/// Recursive scheme. Throws BlowUpError on a non-finite state.
SamplePath simulate(const MildItoProcessSpec& spec, const TimeGrid& grid, const WienerPath& w);
SamplePath simulate(const MildItoProcessSpec& spec, const StepTable& table, const WienerPath& w);

/// The literal discretised mild sum
///   X_m = S_{t0,tau_m} X_0 + sum_{j<m} S_{tau_{j+1},tau_m} (Phi_j Y_j dt + Q_j Z_j dW_j),
/// with Y_j, Z_j evaluated on the states it has produced so far. O(M^2 N); for testing.
SamplePath simulate_by_sum(const MildItoProcessSpec& spec, const TimeGrid& grid, const WienerPath& w);

/// Fills path.regularized with S_{tau_j,T} X_{tau_j} (identity at the terminal node).
void regularize(const MildItoProcessSpec& spec, const TimeGrid& grid, SamplePath& path);

struct IntegrabilityReport {
    double drift_integral = 0.0;      // int ||S_{s,T} Y_s||_H ds
    double diffusion_integral = 0.0;  // int ||S_{s,T} Z_s||_{gamma(U,H)}^2 ds
    bool finite = true;
};

/// Quadrature of the integrability quantities along a simulated path, with
/// Y, Z frozen on each step and the s-dependence of S_{s,T} integrated
/// (exactly for the Z term, by Gauss-Legendre for the Y term).
IntegrabilityReport integrability_report(const MildItoProcessSpec& spec, const TimeGrid& grid,
                                         const SamplePath& path);

}  // namespace mildito
