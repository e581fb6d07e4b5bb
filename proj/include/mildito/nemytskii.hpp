#pragma once

// Nemytskii (composition) operators F(v) = f o v on grid representatives of
// L^p(0,1), and the diffusion coefficient B(v)u = b(v) u built from them.
//
// The operators act on representatives; since all functions here are grid
// values the distinction from equivalence classes never shows up.

#include "mildito/gamma_operators.hpp"
#include "mildito/spectral_space.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mildito {

/// Scalar C^n function with bounded derivatives and their analytic constants.
class ScalarField {
public:
    static constexpr int kMaxOrder = 3;

    using Derivative = std::function<double(int order, double x)>;

    ScalarField(std::string name, int order, Derivative derivative, std::array<double, kMaxOrder + 1> sup_norms,
                std::array<double, kMaxOrder + 1> lipschitz);

    const std::string& name() const noexcept { return name_; }
    int order() const noexcept { return order_; }

    /// f^{(m)}(x), 0 <= m <= order.
    double derivative(int m, double x) const;
    double operator()(double x) const { return derivative(0, x); }

    /// sup_x |f^{(m)}(x)|.
    double sup_norm(int m) const;
    /// Lipschitz constant of f^{(m)} (= sup |f^{(m+1)}|).
    double lipschitz(int m) const;

private:
    std::string name_;
    int order_;
    Derivative derivative_;
    std::array<double, kMaxOrder + 1> sup_;
    std::array<double, kMaxOrder + 1> lip_;
};

/// Built-in fields: "sin", "tanh", "rational" (x / (1 + x^2)). Throws DomainError for unknown names.
const ScalarField& field_by_name(std::string_view name);
std::vector<std::string> field_names();

/// F(v) = f o v between L^q and L^p, differentiable up to order n; requires q > n p.
class NemytskiiOperator {
public:
    NemytskiiOperator(const ScalarField& field, int order, double p, double q);

    const ScalarField& field() const noexcept { return *field_; }
    int order() const noexcept { return order_; }
    double p() const noexcept { return p_; }
    double q() const noexcept { return q_; }

private:
    const ScalarField* field_;
    int order_;
    double p_;
    double q_;
};

GridFunction nemytskii_apply(const NemytskiiOperator& F, const GridFunction& v);

/// Pointwise f^{(m)}(v) u_1 ... u_m; throws OrderError for m > n.
GridFunction nemytskii_derivative(const NemytskiiOperator& F, int m, const GridFunction& v,
                                  std::span<const GridFunction> directions);

/// sup|f^{(m)}| lambda(O)^{1/p - m/r}; requires r >= m p.
double holder_bound_iii(const NemytskiiOperator& F, int m, double r);

/// Random grid functions for sampled sup estimates (smooth + rough mixtures).
GridFunction random_grid_function(int resolution, std::uint64_t seed, std::uint64_t index, double amplitude = 1.0);

struct SampledBound {
    double lhs_sup = 0.0;
    double rhs = 0.0;
    bool holds(double relative_slack = 1e-10) const { return lhs_sup <= rhs * (1.0 + relative_slack); }
};

/// Sampled sup over (v, u_1..u_m) of ||F^{(m)}(v)(u)||_{L^p} / prod ||u_i||_{L^r}, against holder_bound_iii.
SampledBound check_holder_iii(const NemytskiiOperator& F, int m, double r, int samples, int resolution,
                              std::uint64_t seed);

/// Lipschitz bound for F^{(m)}: requires r, s > p and 1/r + m/s <= 1/p. lhs is the sampled sup over
/// u_1..u_m of ||(F^{(m)}(v) - F^{(m)}(w))(u)||_{L^p} / prod ||u_i||_{L^s};
/// rhs = Lip(f^{(m)}) lambda^{1/p - 1/r - m/s} ||v - w||_{L^r}.
SampledBound lipschitz_bound_iv(const NemytskiiOperator& F, int m, double r, double s, const GridFunction& v,
                                const GridFunction& w, int samples, std::uint64_t seed);

/// As lipschitz_bound_iv with s = r; requires r >= (m + 1) p.
SampledBound lipschitz_bound_v(const NemytskiiOperator& F, int m, double r, const GridFunction& v,
                               const GridFunction& w, int samples, std::uint64_t seed);

/// B: L^p -> gamma(L^2, V_beta), B(v)u = iota(b(v) u), with n derivatives.
struct DiffusionCoefficient {
    const ScalarField* field = nullptr;
    int order = 1;           // n
    double p = 8.0;
    double beta = -0.5;
    double delta = 0.5;      // n / (n + 1) unless set explicitly
    int modes = kDefaultModes;        // N, output coefficients
    int noise_modes = kDefaultModes;  // K, columns
    int resolution = kDefaultGridResolution;

    /// Checks beta < -1/4, p > max{n/(2(|beta| - 1/4)), 2n}, delta in ((1/p) max{...}, 1).
    void validate() const;

    /// Exponent threshold max{n/(2(|beta| - 1/4)), 2n}.
    double p_threshold() const;
    /// eps = n/(2 p delta): the smoothing index absorbed by the embedding.
    double embedding_eps() const;
    /// Exponent 2 p delta / (p delta - 2n) of the Sobolev embedding constant.
    double sobolev_q() const;

    static DiffusionCoefficient make(const ScalarField& b, int order, double p, double beta, int modes,
                                     int noise_modes, int resolution = kDefaultGridResolution);
};

/// Column k = analyze(b(v) sqrt(2) sin(k pi .)) with codomain V_beta over L^p.
FiniteRankGammaOperator diffusion_apply(const DiffusionCoefficient& B, const GridFunction& v);

/// Operator u -> b^{(k)}(v) v_1 ... v_k u embedded in V_beta; throws OrderError for k > n.
FiniteRankGammaOperator diffusion_derivative(const DiffusionCoefficient& B, int k, const GridFunction& v,
                                             std::span<const GridFunction> directions);

/// Sobolev constant sup ||w||_{L^{2p delta/(p delta - 2n)}} / ||w||_{H_{n/(2 p delta)}}, estimated.
double diffusion_sobolev_constant(const DiffusionCoefficient& B, int samples, std::uint64_t seed);

/// The estimated Sobolev constant is a lower bound; bounds use it times this factor.
inline constexpr double kSobolevSafety = 2.0;

/// (E|N|^p)^{1/p} (sum_{l<=N} l^{4(beta + eps)})^{1/2} * kSobolevSafety * C_sob * factor,
/// where factor = sup|b^{(k)}| (size of B^{(k)}) or Lip(b^{(k)}) (its Lipschitz constant).
double diffusion_bound(const DiffusionCoefficient& B, double sobolev_constant, double factor);

/// Smallest admissible r for the Lipschitz estimate of B^{(k)}: p delta / (n - k delta).
double diffusion_lipschitz_min_r(const DiffusionCoefficient& B, int k);

/// ||B^{(k)}(v)(v_1..v_k)||_gamma / prod ||v_i||_{L^p} against diffusion_bound with factor sup|b^{(k)}|.
/// lhs is a Monte-Carlo estimate; tolerance is 3 standard errors.
BoundCheck diffusion_check_iv(const DiffusionCoefficient& B, int k, const GridFunction& v,
                              std::span<const GridFunction> directions, double sobolev_constant,
                              const McOptions& mc);

/// ||(B^{(k)}(v) - B^{(k)}(w))(v_1..v_k)||_gamma / prod ||v_i||_{L^p} against
/// diffusion_bound with factor Lip(b^{(k)}) times ||v - w||_{L^r}; requires r >= diffusion_lipschitz_min_r.
BoundCheck diffusion_check_v(const DiffusionCoefficient& B, int k, double r, const GridFunction& v,
                             const GridFunction& w, std::span<const GridFunction> directions,
                             double sobolev_constant, const McOptions& mc);

}  // namespace mildito
