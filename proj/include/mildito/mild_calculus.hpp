#pragma once

// Mild Kolmogorov operator, pathwise mild Ito formula, mild Dynkin formula and
// weak terminal-value estimates for simulated mild Ito processes.
//
// Test functions take values in R^m. Along a path the regularised process
//   Xbar_j = S_{tau_j,T} X_j
// satisfies Xbar_{j+1} = Xbar_j + Ybar_j + xi_j exactly, with
//   Ybar_j = S_{tau_{j+1},T} Phi_j Y_j dt,   xi_j = S_{tau_{j+1},T} Q_j Z_j dW_j
// (see mild_process.hpp). The time integral of L^S_{s,T} phi is discretised as
//   sum_j phi'(Xbar_j) Ybar_j + 1/2 sum_j sum_k phi''(Xbar_j)(Zbar_j u_k, Zbar_j u_k) dt,
// Zbar_j = S_{tau_{j+1},T} Q_j Z_j, and the stochastic integral as
//   sum_j phi'(Xbar_j) xi_j.
// In finite dimensions the indicator of {X_T in the state space} is 1.

#include "mildito/mild_process.hpp"
#include "mildito/nemytskii.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mildito {

/// phi: R^N -> R^m, twice differentiable, with ||phi(x)|| <= C (1 + ||x||_H^p).
class TestFunction {
public:
    virtual ~TestFunction() = default;

    virtual std::string name() const = 0;
    virtual int dim() const = 0;

    virtual Vector value(const Vector& x) const = 0;
    /// phi'(x) h.
    virtual Vector first(const Vector& x, const Vector& h) const = 0;
    /// phi''(x)(h1, h2).
    virtual Vector second(const Vector& x, const Vector& h1, const Vector& h2) const = 0;
    /// sum_k phi''(x)(z_k, z_k) over the columns of z.
    virtual Vector trace(const Vector& x, const Matrix& z) const;
    /// True if phi'' does not depend on x (trace may then be cached).
    virtual bool constant_hessian() const { return false; }

    virtual double growth_exponent() const = 0;
    virtual double growth_constant() const = 0;
};

using TestFunctionPtr = std::shared_ptr<const TestFunction>;

/// x -> (<x, e_n>)_{n in modes}; modes are one-based.
TestFunctionPtr coordinate_functional(std::vector<int> modes);
/// x -> ||x||_H^2.
TestFunctionPtr squared_norm();
/// x -> (1 + ||x||_H^2)^{1/2}.
TestFunctionPtr smoothed_norm();
/// x -> int_0^1 f(v(s)) ds with v = synthesize(x) on a J-point grid; f needs order >= 2.
TestFunctionPtr nemytskii_integral(const ScalarField& f, int modes, int resolution = kDefaultGridResolution);

/// "coordinate" (first mode), "squared_norm", "smoothed_norm", "nemytskii_integral".
TestFunctionPtr test_function_by_name(const std::string& name, int modes, const std::string& field = "tanh",
                                      int resolution = kDefaultGridResolution);
std::vector<std::string> test_function_names();

/// phi(t, x) for the standard Ito formula.
class TimeTestFunction {
public:
    virtual ~TimeTestFunction() = default;

    virtual std::string name() const = 0;
    virtual int dim() const = 0;
    virtual Vector value(double t, const Vector& x) const = 0;
    virtual Vector time_derivative(double t, const Vector& x) const = 0;
    virtual Vector first(double t, const Vector& x, const Vector& h) const = 0;
    virtual Vector trace(double t, const Vector& x, const Matrix& z) const = 0;
};

using TimeTestFunctionPtr = std::shared_ptr<const TimeTestFunction>;

/// phi(t, x) = t.
TimeTestFunctionPtr time_identity();
/// phi(t, x) = psi(x).
TimeTestFunctionPtr from_autonomous(TestFunctionPtr psi);
/// phi(t, x) = e^{-t} ||x||_H^2.
TimeTestFunctionPtr discounted_squared_norm();

/// First-passage or terminal stopping, discretised to grid nodes.
struct StoppingRule {
    enum class Kind { terminal, hitting };
    Kind kind = Kind::terminal;
    double level = 0.0;    // hitting level L (may be +inf)
    double norm_r = 0.0;   // hitting is tested against ||Xbar||_{H_r}

    static StoppingRule terminal() { return {}; }
    static StoppingRule hitting(double level, double norm_r = 0.0);
};

/// terminal -> M; hitting -> first j with ||Xbar_j|| >= L, else M. Needs a regularised path.
int stopping_sample(const StoppingRule& rule, const SamplePath& path);

/// phi'(S x) S y + 1/2 sum_k phi''(S x)(S z_k, S z_k), S = S_{s,T}; throws DomainError unless s < T.
Vector kolmogorov_apply(const EvolutionFamily& family, double s, double terminal, const TestFunction& phi,
                        const Vector& x, const Vector& y, const Matrix& z);

/// Pieces of the discrete mild Ito formula along one path, up to the stopping node.
struct PathDecomposition {
    Vector terminal;             // phi(Xbar_tau)
    Vector initial;              // phi(S_{t0,T} X_0)
    Vector time_integral;        // sum_{j<tau} L_j dt
    Vector stochastic_integral;  // sum_{j<tau} phi'(Xbar_j) xi_j
    double abs_time_integral = 0.0;  // sum_{j<tau} ||L_j|| dt
    double drift_integral = 0.0;     // int_{t0}^{tau} ||S_{s,T} Y_s||_H ds
    double diffusion_integral = 0.0; // int_{t0}^{tau} ||S_{s,T} Z_s||_{gamma(U,H)}^2 ds
    int stop = 0;

    Vector residual() const { return terminal - initial - time_integral - stochastic_integral; }
};

/// Tables shared by all paths of one (phi, spec, grid) triple.
class CalculusTable {
public:
    CalculusTable(const TestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& grid);

    const StepTable& steps() const noexcept { return steps_; }
    const TimeGrid& grid() const noexcept { return steps_.grid(); }
    /// S_{tau_{j+1},T} Phi_j dt.
    const Vector& drift_weight(int j) const { return drift_[static_cast<std::size_t>(j)]; }
    /// S_{tau_{j+1},T} Q_j.
    const Vector& noise_weight(int j) const { return noise_[static_cast<std::size_t>(j)]; }
    /// Zbar_j when Z is constant.
    const Matrix* constant_zbar(int j) const;
    /// Trace term when Z is constant and phi'' is constant.
    const Vector* constant_trace(int j) const;
    /// ||Zbar_j||_HS^2 for constant Z, else NaN.
    double constant_zbar_squared(int j) const;
    /// S_{u,T} at the Gauss-Legendre nodes u of step j.
    const std::vector<Vector>& quadrature_transport(int j) const { return transport_[static_cast<std::size_t>(j)]; }

private:
    StepTable steps_;
    std::vector<Vector> drift_;
    std::vector<Vector> noise_;
    std::vector<Matrix> zbar_;
    std::vector<Vector> trace_;
    std::vector<double> zbar_sq_;
    std::vector<std::vector<Vector>> transport_;
};

PathDecomposition decompose_path(const TestFunction& phi, const MildItoProcessSpec& spec, const CalculusTable& table,
                                 const WienerPath& w, const StoppingRule& rule = StoppingRule::terminal());

/// phi(X_T) - phi(S_{t0,T} X_0) - time integral - stochastic integral.
Vector ito_residual(const TestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& grid,
                    const WienerPath& w);

/// Residual of the standard Ito formula for phi(t, x); requires the identity family.
Vector standard_ito_residual(const TimeTestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& grid,
                             const WienerPath& w);

struct MonteCarlo {
    int paths = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
};

struct DynkinResult {
    Vector lhs;                 // mean phi(Xbar_tau)
    Vector rhs;                 // mean [phi(S X_0) + time integral]
    Vector stderr_lhs;
    Vector stderr_rhs;
    Vector gap;                 // lhs - rhs
    Vector stderr_gap;          // from per-path differences (shared paths)
    Vector martingale_mean;     // mean stochastic integral
    Vector martingale_stderr;
    double tolerance_factor = 3.0;  // 5 for hitting rules

    /// |gap_i| <= factor * stderr_gap_i + 1e-10 max(1, |rhs_i|) for every component.
    bool holds() const;
    bool martingale_holds() const;
};

/// Monte-Carlo estimates of both sides of the mild Dynkin formula over shared paths.
/// Throws BlowUpError with the first failing path index.
DynkinResult dynkin_gap(const TestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& grid,
                        const StoppingRule& rule, const MonteCarlo& mc);

struct MomentReport {
    double exponent = 0.0;         // growth exponent p of phi
    double initial = 0.0;          // E ||S_{t0,T} X_0||^p
    double drift = 0.0;            // E |int ||S_{s,T} Y_s|| ds|^p
    double diffusion = 0.0;        // E |int ||S_{s,T} Z_s||_gamma^2 ds|^{p/2}
    bool finite() const;
};

struct WeakEstimate {
    double lhs = 0.0;      // ||E phi(X_T)||
    double rhs = 0.0;      // ||E phi(S X_0)|| + sum_j E ||L_j|| dt
    double slack = 0.0;    // rhs - lhs
    double stderr_slack = 0.0;
    MomentReport moments;

    bool holds() const { return slack >= -3.0 * stderr_slack - 1e-10 * std::max(1.0, std::fabs(rhs)); }
};

/// Throws HypothesisViolatedError if the moment report is not finite.
WeakEstimate weak_estimate_gap(const TestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& grid,
                               const MonteCarlo& mc);

struct SelfConvergence {
    std::vector<int> steps;    // M_t per level, coarse to fine
    std::vector<double> rms;   // RMS residual norm per level
    double order = 0.0;        // least-squares slope of log rms against log dt
};

using ResidualFunction = std::function<Vector(const TimeGrid&, const WienerPath&)>;

/// RMS of `residual` over `paths` Brownian paths sampled on the finest grid and
/// coarsened to each level; levels must divide the finest step count.
SelfConvergence self_convergence(const ResidualFunction& residual, const TimeGrid& finest, std::vector<int> levels,
                                 int noise_modes, const MonteCarlo& mc);

/// Mild Ito residual self-convergence for phi and spec.
SelfConvergence ito_self_convergence(const TestFunction& phi, const MildItoProcessSpec& spec, const TimeGrid& finest,
                                     std::vector<int> levels, const MonteCarlo& mc);

}  // namespace mildito
