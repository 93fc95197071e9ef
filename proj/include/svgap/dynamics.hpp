#pragma once

#include <functional>
#include <vector>

namespace svgap {

/// Constants of the solver/verifier gap dynamics.
///
/// dU_s/dt = -alpha * E, dU_v/dt = -beta * E with E = k * G - b in the
/// linearised model. `gamma` only matters for cross-improvement.
struct DynamicsParams {
    double alpha = 0.0;
    double beta = 0.0;
    double k = 1.0;
    double b = 0.0;
    double gamma = 0.0;

    bool operator==(const DynamicsParams&) const = default;
};

struct InitialState {
    double u_s0 = 0.0;
    double u_v0 = 0.0;

    double gap() const { return u_s0 - u_v0; }
    bool operator==(const InitialState&) const = default;
};

/// Coefficients of the exponential closed form.
struct DerivedConstants {
    double delta = 0.0;        // initial excess gap G_0 - b/k
    double lambda = 0.0;       // shared decay rate k(alpha - beta)
    double alpha_prime = 0.0;  // solver amplitude
    double beta_prime = 0.0;   // verifier amplitude
    double g_inf = 0.0;
    double u_s_inf = 0.0;
    double u_v_inf = 0.0;
};

struct CapabilityState {
    double t = 0.0;
    double u_s = 0.0;
    double u_v = 0.0;
    double gap = 0.0;
    double energy = 0.0;
};

/// Energy as a function of the gap. Any differentiable, monotonically
/// increasing map is admissible for numeric integration.
using EnergyFn = std::function<double(double)>;

/// Throws Error("invalid_params") unless alpha > beta >= 0, k(alpha - beta) > 0
/// and every field is finite. The error's field() names the culprit.
void validate(const DynamicsParams& params);

/// Throws Error("invalid_initial_state") unless u_s0 > u_v0, both finite.
void validate(const InitialState& init);

/// Linearised gap potential k*g - b.
double gap_potential(const DynamicsParams& params, double g);

DerivedConstants derive_constants(const DynamicsParams& params, const InitialState& init);

/// Exact solution of the linear-energy system at epoch t >= 0.
CapabilityState closed_form_state(const DynamicsParams& params, const InitialState& init, double t);

/// dU_s,inf / dG_0 with U_s,0 held fixed: -alpha / (alpha - beta).
double sensitivity_final_to_gap(const DynamicsParams& params);

/// Smallest t with |G(t) - G_inf| <= epsilon, i.e. ln(delta/epsilon)/lambda,
/// clamped at 0 when epsilon >= delta. Callers round up to whole epochs.
double epochs_to_tolerance(const DynamicsParams& params, const InitialState& init, double epsilon);

/// Fixed-step classical RK4 over [0, t_end]. Returns every step, first entry at
/// t = 0 and last exactly at t_end (the final step is shortened if needed).
/// With an empty `energy` the linear gap potential is used.
std::vector<CapabilityState> integrate_ode(const DynamicsParams& params, const InitialState& init,
                                           double t_end, double step, const EnergyFn& energy = {});

}  // namespace svgap
