#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace svgap {

struct TrajectoryPoint {
    double t = 0.0;
    double u_s = 0.0;
    double u_v = 0.0;

    bool operator==(const TrajectoryPoint&) const = default;
};

/// Observed per-epoch uncertainties, epochs strictly increasing.
struct Trajectory {
    std::vector<TrajectoryPoint> points;
    std::string label;

    std::vector<double> epochs() const;
    std::vector<double> solver() const;
    std::vector<double> verifier() const;
    std::vector<double> gaps() const;

    bool operator==(const Trajectory&) const = default;
};

/// Throws Error("invalid_trajectory") unless epochs strictly increase and all
/// values are finite.
void validate(const Trajectory& trajectory);

enum class FitStatus {
    ok,
    degenerate_series,  // y constant; rate unidentifiable
    no_decay,           // best rate sits at the lower end of the search range
};

std::string to_string(FitStatus status);
FitStatus parse_fit_status(const std::string& text);

/// y(t) ~= amplitude * exp(-rate * t) + offset
struct ExpFit {
    double amplitude = 0.0;
    double rate = 0.0;
    double offset = 0.0;
    double r_squared = 0.0;
    double residual_norm = 0.0;  // sqrt of the sum of squared residuals
    bool converged = false;
    int iterations = 0;
    FitStatus status = FitStatus::ok;

    double predict(double t) const;
    bool operator==(const ExpFit&) const = default;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;

    bool operator==(const LinearFit&) const = default;
};

/// Identifiable combinations of the dynamics constants, with alpha, beta and b
/// reported under the normalisation k = 1.
struct RecoveredParams {
    double lambda = 0.0;
    std::optional<double> alpha_over_beta;  // absent when the verifier amplitude is 0
    double g_inf = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double b = 0.0;
    bool identifiable = false;

    bool operator==(const RecoveredParams&) const = default;
};

/// 1 - SSR/SST. Throws Error("zero_variance") for a constant `observed`.
double r_squared(std::span<const double> observed, std::span<const double> predicted);

/// Least-squares fit of A exp(-lambda t) + C.
///
/// A log-spaced grid over lambda in [1e-3, 10] is scanned with (A, C) solved
/// linearly at each node; the best node seeds a damped Gauss-Newton
/// refinement of lambda on the projected residual. Degenerate inputs are
/// reported through `status` rather than thrown; malformed inputs (fewer than
/// four points, non-increasing t, non-finite values) throw.
ExpFit fit_exponential(std::span<const double> t, std::span<const double> y);

/// Finite-difference estimate of dG/dt on a uniform grid: central differences
/// inside, second-order one-sided differences at the two ends.
std::vector<double> gap_rates(std::span<const double> t, std::span<const double> g);

/// OLS of dG/dt against G. Under the linear model the slope is -k(alpha-beta)
/// and the intercept (alpha-beta) b.
LinearFit fit_gap_linear(std::span<const double> t, std::span<const double> g);

/// Inverts the closed-form coefficients from one fit per channel.
///
/// A degenerate verifier fit (constant channel, amplitude 0) is accepted and
/// means beta = 0. Throws Error("rate_mismatch") when the channels disagree on
/// the decay rate beyond `rate_tolerance`, Error("non_model") when the
/// amplitudes or offsets are inconsistent with alpha > beta, and
/// Error("not_converged") when a fit did not converge.
RecoveredParams recover_params(const ExpFit& fit_s, const ExpFit& fit_v, double rate_tolerance);

}  // namespace svgap
