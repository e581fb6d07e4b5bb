#include "mildito/cli/config.hpp"

#include "mildito/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mildito::cli {

namespace {

using nlohmann::json;

template <class T>
void read(const json& j, const char* key, T& value) {
    if (!j.contains(key)) return;
    try {
        value = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

bool uses(const ExperimentConfig& c, const std::string& suite) {
    const auto s = c.suites();
    return std::find(s.begin(), s.end(), suite) != s.end();
}

void validate_diffusion(const ExperimentConfig& c) {
    const auto& b = field_by_name(c.field);
    require(c.order >= 1 && c.order <= b.order(),
            "diffusion coefficient needs n in [1, " + std::to_string(b.order()) + "] for field '" + c.field + "'");
    require(c.beta < -0.25, "diffusion coefficient requires β < −¼ (got β = " + num(c.beta) + ")");
    const double n = c.order;
    const double threshold = std::max(n / (2.0 * (std::fabs(c.beta) - 0.25)), 2.0 * n);
    require(c.p > threshold, "diffusion coefficient requires p > max{n/(2(|β|−¼)), 2n} = " + num(threshold) +
                                 " (got p = " + num(c.p) + ")");
    const double d = c.delta_or_default();
    require(d > threshold / c.p && d < 1.0,
            "diffusion coefficient requires δ in ((1/p) max{n/(2(|β|−¼)), 2n}, 1) = (" + num(threshold / c.p) +
                ", 1) (got δ = " + num(d) + ")");
}

}  // namespace

std::vector<std::string> ExperimentConfig::suites() const {
    if (suite == "all") return {"gamma", "nemytskii", "simulate", "ito", "dynkin", "weak"};
    return {suite};
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> known = {
        "suite", "modes", "noise_modes", "resolution", "steps", "t0", "T", "paths", "mc_samples", "seed",
        "workers", "family", "drift", "drift_rate", "diffusion", "initial_amplitude", "field", "phi", "stopping",
        "hitting_level", "order", "p", "q", "r", "beta", "eps", "delta", "out"};
    for (const auto& item : j.items())
        if (std::find(known.begin(), known.end(), item.key()) == known.end())
            throw ConfigError("unknown config key '" + item.key() + "'");
    read(j, "suite", c.suite);
    read(j, "modes", c.modes);
    read(j, "noise_modes", c.noise_modes);
    read(j, "resolution", c.resolution);
    read(j, "steps", c.steps);
    read(j, "t0", c.t0);
    read(j, "T", c.terminal);
    read(j, "paths", c.paths);
    read(j, "mc_samples", c.mc_samples);
    read(j, "seed", c.seed);
    read(j, "workers", c.workers);
    read(j, "family", c.family);
    read(j, "drift", c.drift);
    read(j, "drift_rate", c.drift_rate);
    read(j, "diffusion", c.diffusion);
    read(j, "initial_amplitude", c.initial_amplitude);
    read(j, "field", c.field);
    read(j, "phi", c.phi);
    read(j, "stopping", c.stopping);
    read(j, "hitting_level", c.hitting_level);
    read(j, "order", c.order);
    read(j, "p", c.p);
    read(j, "q", c.q);
    read(j, "r", c.r);
    read(j, "beta", c.beta);
    read(j, "eps", c.eps);
    if (j.contains("delta")) {
        if (j.at("delta").is_null())
            c.delta.reset();
        else
            c.delta = j.at("delta").get<double>();
    }
    read(j, "out", c.out);
    return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(j, std::move(base));
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["suite"] = c.suite;
    j["modes"] = c.modes;
    j["noise_modes"] = c.noise_modes;
    j["resolution"] = c.resolution;
    j["steps"] = c.steps;
    j["t0"] = c.t0;
    j["T"] = c.terminal;
    j["paths"] = c.paths;
    j["mc_samples"] = c.mc_samples;
    j["seed"] = c.seed;
    j["family"] = c.family;
    j["drift"] = c.drift;
    j["drift_rate"] = c.drift_rate;
    j["diffusion"] = c.diffusion;
    j["initial_amplitude"] = c.initial_amplitude;
    j["field"] = c.field;
    j["phi"] = c.phi;
    j["stopping"] = c.stopping;
    j["hitting_level"] = c.hitting_level;
    j["order"] = c.order;
    j["p"] = c.p;
    j["q"] = c.q;
    j["r"] = c.r;
    j["beta"] = c.beta;
    j["eps"] = c.eps;
    j["delta"] = c.delta_or_default();
    // workers and out are left out: neither may change the results.
    return j;
}

void validate(const ExperimentConfig& c) {
    require(std::find(kSuites.begin(), kSuites.end(), c.suite) != kSuites.end(),
            "unknown suite '" + c.suite + "' (known: gamma, nemytskii, simulate, ito, dynkin, weak, all)");
    require(c.modes >= 1 && c.noise_modes >= 1, "truncation requires N >= 1 and K >= 1");
    require(c.resolution >= 2 * c.modes, "grid resolution requires J >= 2N");
    require(c.workers >= 1, "workers must be >= 1");
    require(c.mc_samples >= 2, "Monte-Carlo γ-norms need at least 2 samples");
    try {
        (void)field_by_name(c.field);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    if (uses(c, "gamma")) {
        require(c.r > 0.25, "smoothing γ-bound requires r > ¼ (got r = " + num(c.r) + ")");
        require(c.p >= 2.0, "γ(H, L^p) bounds require p >= 2 (got p = " + num(c.p) + ")");
        require(c.eps >= 0.0, "embedding requires ε >= 0 (got ε = " + num(c.eps) + ")");
        require(c.beta + c.eps < -0.25,
                "embedding requires β + ε < −¼ (got β = " + num(c.beta) + ", ε = " + num(c.eps) + ")");
        require(c.p > 2.0 && c.beta <= -1.0 / (2.0 * c.p),
                "multiplication lemma requires p > 2 and β <= −1/(2p) (got p = " + num(c.p) + ", β = " +
                    num(c.beta) + ")");
    }
    if (uses(c, "nemytskii")) {
        const auto& f = field_by_name(c.field);
        require(f.order() >= 2, "Nemytskii derivative checks need a field of order >= 2");
        require(c.p >= 1.0, "Nemytskii operator requires p >= 1");
        // The Nemytskii checks use n = 2 for the operator F itself.
        require(c.q > 2.0 * c.p, "Nemytskii operator requires q > n p with n = 2 (got q = " + num(c.q) +
                                     ", p = " + num(c.p) + ")");
        validate_diffusion(c);
    }

    const bool process = uses(c, "simulate") || uses(c, "ito") || uses(c, "dynkin") || uses(c, "weak");
    if (process) {
        require(c.t0 >= 0.0 && c.terminal > c.t0, "time window requires 0 <= t0 < T");
        require(c.steps >= 1, "time grid requires M_t >= 1");
        require(c.paths >= 2, "Monte Carlo requires at least 2 paths");
        require(c.family == "heat" || c.family == "identity", "family must be 'heat' or 'identity'");
        require(c.drift == "zero" || c.drift == "nemytskii" || c.drift == "linear",
                "drift must be 'zero', 'nemytskii' or 'linear'");
        require(c.diffusion == "identity" || c.diffusion == "zero" || c.diffusion == "coefficient",
                "diffusion must be 'identity', 'zero' or 'coefficient'");
        require(std::isfinite(c.initial_amplitude) && std::isfinite(c.drift_rate),
                "initial amplitude and drift rate must be finite");
        if (c.diffusion == "coefficient") validate_diffusion(c);
        const auto names = test_function_names();
        require(std::find(names.begin(), names.end(), c.phi) != names.end(),
                "unknown test function '" + c.phi + "'");
        require(c.stopping == "terminal" || c.stopping == "hitting", "stopping must be 'terminal' or 'hitting'");
        require(!(c.hitting_level < 0.0), "hitting level must be >= 0");
    }
    if (uses(c, "ito"))
        require(c.steps % 4 == 0, "self-convergence uses M_t/4, M_t/2, M_t: M_t must be divisible by 4");
}

DiffusionCoefficient build_diffusion(const ExperimentConfig& c) {
    DiffusionCoefficient B;
    B.field = &field_by_name(c.field);
    B.order = c.order;
    B.p = c.p;
    B.beta = c.beta;
    B.delta = c.delta_or_default();
    B.modes = c.modes;
    B.noise_modes = c.noise_modes;
    B.resolution = c.resolution;
    B.validate();
    return B;
}

MildItoProcessSpec build_process(const ExperimentConfig& c) {
    const auto kind = c.family == "identity" ? EvolutionKind::identity : EvolutionKind::heat_semigroup;
    DriftMap drift = DriftMap::zero();
    if (c.drift == "nemytskii") drift = DriftMap::nemytskii(field_by_name(c.field), c.modes, c.resolution);
    if (c.drift == "linear") drift = DriftMap::linear(c.drift_rate);
    DiffusionMap diffusion = DiffusionMap::truncated_identity(c.modes, c.noise_modes);
    if (c.diffusion == "zero") diffusion = DiffusionMap::zero();
    if (c.diffusion == "coefficient") diffusion = DiffusionMap::from_coefficient(build_diffusion(c));
    Vector x0 = Vector::Zero(c.modes);
    x0[0] = c.initial_amplitude;
    return MildItoProcessSpec{EvolutionFamily(kind, c.modes, c.t0, c.terminal), SineBasisVector(std::move(x0)),
                              std::move(drift), std::move(diffusion), c.noise_modes};
}

StoppingRule build_stopping(const ExperimentConfig& c) {
    if (c.stopping == "hitting") return StoppingRule::hitting(c.hitting_level);
    return StoppingRule::terminal();
}

}  // namespace mildito::cli
