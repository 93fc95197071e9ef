#include "svgap/dynamics.hpp"

#include "svgap/error.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace svgap {

namespace {

void require_finite(double value, const char* name, const char* code) {
    if (!std::isfinite(value)) {
        throw Error(code, std::string(name) + " must be finite", name);
    }
}

// Derivative of (u_s, u_v) for a given energy.
struct Rates {
    double du_s;
    double du_v;
};

}  // namespace

void validate(const DynamicsParams& p) {
    require_finite(p.alpha, "alpha", "invalid_params");
    require_finite(p.beta, "beta", "invalid_params");
    require_finite(p.k, "k", "invalid_params");
    require_finite(p.b, "b", "invalid_params");
    require_finite(p.gamma, "gamma", "invalid_params");
    if (p.beta < 0.0) {
        throw Error("invalid_params", "beta must be nonnegative", "beta");
    }
    if (!(p.alpha > p.beta)) {
        throw Error("invalid_params", "alpha must exceed beta", "alpha");
    }
    if (!(p.k * (p.alpha - p.beta) > 0.0)) {
        throw Error("invalid_params", "k * (alpha - beta) must be positive", "k");
    }
}

void validate(const InitialState& init) {
    require_finite(init.u_s0, "u_s0", "invalid_initial_state");
    require_finite(init.u_v0, "u_v0", "invalid_initial_state");
    if (!(init.u_s0 > init.u_v0)) {
        throw Error("invalid_initial_state", "solver uncertainty must exceed verifier uncertainty at t=0",
                    "u_s0");
    }
}

double gap_potential(const DynamicsParams& params, double g) { return params.k * g - params.b; }

DerivedConstants derive_constants(const DynamicsParams& params, const InitialState& init) {
    validate(params);
    validate(init);

    const double rate_diff = params.alpha - params.beta;
    DerivedConstants c;
    c.g_inf = params.b / params.k;
    c.delta = init.gap() - c.g_inf;
    c.lambda = params.k * rate_diff;
    c.alpha_prime = params.alpha * c.delta / rate_diff;
    c.beta_prime = params.beta * c.delta / rate_diff;
    c.u_s_inf = init.u_s0 - c.alpha_prime;
    c.u_v_inf = init.u_v0 - c.beta_prime;
    return c;
}

CapabilityState closed_form_state(const DynamicsParams& params, const InitialState& init, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw Error("invalid_epoch", "epoch must be finite and nonnegative", "t");
    }
    const DerivedConstants c = derive_constants(params, init);
    const double decay = std::exp(-c.lambda * t);

    CapabilityState s;
    s.t = t;
    s.u_s = c.alpha_prime * decay + c.u_s_inf;
    s.u_v = c.beta_prime * decay + c.u_v_inf;
    s.gap = s.u_s - s.u_v;
    s.energy = params.k * c.delta * decay;
    return s;
}

double sensitivity_final_to_gap(const DynamicsParams& params) {
    if (params.alpha == params.beta) {
        throw Error("invalid_params", "alpha must differ from beta", "alpha");
    }
    return -params.alpha / (params.alpha - params.beta);
}

double epochs_to_tolerance(const DynamicsParams& params, const InitialState& init, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw Error("invalid_tolerance", "epsilon must be positive", "epsilon");
    }
    const DerivedConstants c = derive_constants(params, init);
    if (!(c.delta > 0.0)) {
        throw Error("no_excess_gap", "initial gap is already at or below its limit b/k", "u_s0");
    }
    if (epsilon >= c.delta) {
        return 0.0;
    }
    return std::log(c.delta / epsilon) / c.lambda;
}

std::vector<CapabilityState> integrate_ode(const DynamicsParams& params, const InitialState& init,
                                           double t_end, double step, const EnergyFn& energy) {
    validate(params);
    require_finite(init.u_s0, "u_s0", "invalid_initial_state");
    require_finite(init.u_v0, "u_v0", "invalid_initial_state");
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw Error("invalid_step", "step must be positive", "step");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw Error("invalid_epoch", "t_end must be finite and nonnegative", "t_end");
    }

    const auto energy_of = [&](double gap) {
        return energy ? energy(gap) : gap_potential(params, gap);
    };
    const auto rates = [&](double u_s, double u_v) {
        const double e = energy_of(u_s - u_v);
        return Rates{-params.alpha * e, -params.beta * e};
    };
    const auto record = [&](double t, double u_s, double u_v) {
        const double gap = u_s - u_v;
        return CapabilityState{t, u_s, u_v, gap, energy_of(gap)};
    };

    // Step count chosen so that n * step covers t_end; the last step absorbs the remainder.
    const auto full_steps = static_cast<std::size_t>(std::floor(t_end / step));
    const double remainder = t_end - static_cast<double>(full_steps) * step;
    const bool partial = remainder > step * 1e-9;
    const std::size_t n = full_steps + (partial ? 1 : 0);

    std::vector<CapabilityState> out;
    out.reserve(n + 1);
    double u_s = init.u_s0;
    double u_v = init.u_v0;
    out.push_back(record(0.0, u_s, u_v));

    for (std::size_t i = 0; i < n; ++i) {
        const double h = (i + 1 == n && partial) ? remainder : step;
        const Rates k1 = rates(u_s, u_v);
        const Rates k2 = rates(u_s + 0.5 * h * k1.du_s, u_v + 0.5 * h * k1.du_v);
        const Rates k3 = rates(u_s + 0.5 * h * k2.du_s, u_v + 0.5 * h * k2.du_v);
        const Rates k4 = rates(u_s + h * k3.du_s, u_v + h * k3.du_v);
        u_s += h / 6.0 * (k1.du_s + 2.0 * k2.du_s + 2.0 * k3.du_s + k4.du_s);
        u_v += h / 6.0 * (k1.du_v + 2.0 * k2.du_v + 2.0 * k3.du_v + k4.du_v);

        const double t = (i + 1 == n) ? t_end : static_cast<double>(i + 1) * step;
        if (!std::isfinite(u_s) || !std::isfinite(u_v)) {
            std::ostringstream msg;
            msg << "integration diverged at t=" << t;
            throw Error("diverged", msg.str(), "t");
        }
        out.push_back(record(t, u_s, u_v));
    }
    return out;
}

}  // namespace svgap
