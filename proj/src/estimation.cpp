#include "svgap/estimation.hpp"

#include "svgap/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace svgap {

namespace {

constexpr double kRateMin = 1e-3;
constexpr double kRateMax = 10.0;
constexpr int kGridSize = 200;
constexpr int kMaxIterations = 100;
constexpr double kStepTolerance = 1e-10;

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

void check_series(std::span<const double> t, std::span<const double> y, std::size_t min_points) {
    if (t.size() != y.size()) {
        throw Error("invalid_series", "time and value sequences differ in length");
    }
    if (t.size() < min_points) {
        std::ostringstream msg;
        msg << "at least " << min_points << " points are required, got " << t.size();
        throw Error("too_few_points", msg.str());
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(y[i])) {
            throw Error("invalid_series", "series contains a non-finite value");
        }
        if (i > 0 && !(t[i] > t[i - 1])) {
            throw Error("invalid_series", "epochs must be strictly increasing");
        }
    }
}

// Linear least squares for (A, C) at a fixed rate, on shifted times tau = t - t0.
struct Projection {
    double amplitude = 0.0;
    double offset = 0.0;
    double ssr = std::numeric_limits<double>::infinity();
    bool ok = false;
};

Projection project(std::span<const double> tau, std::span<const double> y, double rate) {
    const std::size_t n = tau.size();
    std::vector<double> phi(n);
    for (std::size_t i = 0; i < n; ++i) phi[i] = std::exp(-rate * tau[i]);
    const double phi_bar = mean(phi);
    const double y_bar = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (phi[i] - phi_bar) * (phi[i] - phi_bar);
        sxy += (phi[i] - phi_bar) * (y[i] - y_bar);
    }
    Projection p;
    if (!(sxx > 0.0) || !std::isfinite(sxx)) return p;
    p.amplitude = sxy / sxx;
    p.offset = y_bar - p.amplitude * phi_bar;
    p.ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (p.amplitude * phi[i] + p.offset);
        p.ssr += r * r;
    }
    p.ok = std::isfinite(p.ssr);
    return p;
}

// Undamped Gauss-Newton increment for the rate, using the derivative of the
// model projected onto the orthogonal complement of span{phi, 1}.
struct RateStep {
    double numerator = 0.0;    // J^T r
    double curvature = 0.0;    // J^T J
};

RateStep rate_step(std::span<const double> tau, std::span<const double> y, double rate, const Projection& p) {
    const std::size_t n = tau.size();
    std::vector<double> phi(n), dm(n);
    for (std::size_t i = 0; i < n; ++i) {
        phi[i] = std::exp(-rate * tau[i]);
        dm[i] = -p.amplitude * tau[i] * phi[i];
    }
    // Remove the component of dm lying in span{phi, 1}.
    const double phi_bar = mean(phi);
    const double dm_bar = mean(dm);
    double sxx = 0.0;
    double sxd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (phi[i] - phi_bar) * (phi[i] - phi_bar);
        sxd += (phi[i] - phi_bar) * (dm[i] - dm_bar);
    }
    const double coef = sxx > 0.0 ? sxd / sxx : 0.0;
    RateStep s;
    for (std::size_t i = 0; i < n; ++i) {
        const double j = (dm[i] - dm_bar) - coef * (phi[i] - phi_bar);
        const double r = y[i] - (p.amplitude * phi[i] + p.offset);
        s.numerator += j * r;
        s.curvature += j * j;
    }
    return s;
}

ExpFit finish(ExpFit fit, double t0, std::span<const double> t, std::span<const double> y) {
    // Move the amplitude back from shifted time to absolute time.
    fit.amplitude *= std::exp(fit.rate * t0);
    std::vector<double> predicted(t.size());
    double ssr = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        predicted[i] = fit.predict(t[i]);
        ssr += (y[i] - predicted[i]) * (y[i] - predicted[i]);
    }
    fit.residual_norm = std::sqrt(ssr);
    fit.r_squared = r_squared(y, predicted);
    return fit;
}

}  // namespace

std::vector<double> Trajectory::epochs() const {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.t);
    return v;
}

std::vector<double> Trajectory::solver() const {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.u_s);
    return v;
}

std::vector<double> Trajectory::verifier() const {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.u_v);
    return v;
}

std::vector<double> Trajectory::gaps() const {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.u_s - p.u_v);
    return v;
}

void validate(const Trajectory& trajectory) {
    for (std::size_t i = 0; i < trajectory.points.size(); ++i) {
        const auto& p = trajectory.points[i];
        if (!std::isfinite(p.t) || !std::isfinite(p.u_s) || !std::isfinite(p.u_v)) {
            throw Error("invalid_trajectory", "trajectory contains a non-finite value");
        }
        if (i > 0 && !(p.t > trajectory.points[i - 1].t)) {
            throw Error("invalid_trajectory", "trajectory epochs must be strictly increasing");
        }
    }
}

std::string to_string(FitStatus status) {
    switch (status) {
        case FitStatus::ok: return "ok";
        case FitStatus::degenerate_series: return "degenerate_series";
        case FitStatus::no_decay: return "no_decay";
    }
    return "ok";
}

FitStatus parse_fit_status(const std::string& text) {
    if (text == "ok") return FitStatus::ok;
    if (text == "degenerate_series") return FitStatus::degenerate_series;
    if (text == "no_decay") return FitStatus::no_decay;
    throw Error("invalid_fit_status", "unknown fit status '" + text + "'");
}

double ExpFit::predict(double t) const { return amplitude * std::exp(-rate * t) + offset; }

double r_squared(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size() || observed.size() < 2) {
        throw Error("invalid_series", "r_squared needs two equal-length sequences of at least 2 values");
    }
    const double o_bar = mean(observed);
    double ssr = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        ssr += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
        sst += (observed[i] - o_bar) * (observed[i] - o_bar);
    }
    if (!(sst > 0.0)) {
        throw Error("zero_variance", "observed values are constant");
    }
    return 1.0 - ssr / sst;
}

ExpFit fit_exponential(std::span<const double> t, std::span<const double> y) {
    check_series(t, y, 4);

    const auto [y_min, y_max] = std::minmax_element(y.begin(), y.end());
    if (*y_max - *y_min <= 1e-12) {
        ExpFit fit;
        fit.amplitude = 0.0;
        fit.rate = 0.0;
        fit.offset = mean(y);
        fit.r_squared = 0.0;
        fit.converged = false;
        fit.status = FitStatus::degenerate_series;
        double ssr = 0.0;
        for (double v : y) ssr += (v - fit.offset) * (v - fit.offset);
        fit.residual_norm = std::sqrt(ssr);
        return fit;
    }

    const double t0 = t.front();
    std::vector<double> tau(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) tau[i] = t[i] - t0;

    // Coarse scan.
    int best_index = -1;
    double best_rate = 0.0;
    Projection best;
    const double log_span = std::log(kRateMax / kRateMin);
    for (int i = 0; i < kGridSize; ++i) {
        const double rate = kRateMin * std::exp(log_span * i / (kGridSize - 1));
        const Projection p = project(tau, y, rate);
        if (p.ok && p.ssr < best.ssr) {
            best = p;
            best_rate = rate;
            best_index = i;
        }
    }
    if (best_index < 0) {
        throw Error("fit_failed", "no rate in the search range admits a finite fit");
    }

    ExpFit fit;
    fit.rate = best_rate;
    fit.amplitude = best.amplitude;
    fit.offset = best.offset;
    if (best_index == 0) {
        fit.status = FitStatus::no_decay;
        fit.converged = false;
        return finish(fit, t0, t, y);
    }

    // Damped Gauss-Newton on the rate; (A, C) re-projected after every move.
    double rate = best_rate;
    Projection current = best;
    double damping = 1e-2;
    int iterations = 0;
    bool converged = false;
    while (iterations < kMaxIterations) {
        ++iterations;
        const RateStep s = rate_step(tau, y, rate, current);
        if (!(s.curvature > 0.0) || current.ssr == 0.0) {
            converged = true;
            break;
        }
        const double full_step = s.numerator / s.curvature;
        if (std::abs(full_step) <= kStepTolerance * rate) {
            converged = true;
            break;
        }
        const double candidate = rate + full_step / (1.0 + damping);
        const Projection trial = candidate > 0.0 ? project(tau, y, candidate) : Projection{};
        if (trial.ok && trial.ssr <= current.ssr) {
            const double moved = std::abs(candidate - rate);
            rate = candidate;
            current = trial;
            damping *= 0.5;
            if (moved <= kStepTolerance * rate) {
                converged = true;
                break;
            }
        } else {
            damping *= 2.0;
            if (damping > 1e12) break;
        }
    }

    fit.rate = rate;
    fit.amplitude = current.amplitude;
    fit.offset = current.offset;
    fit.iterations = iterations;
    fit.converged = converged;
    if (rate < kRateMin) {
        fit.status = FitStatus::no_decay;
        fit.converged = false;
    }
    return finish(fit, t0, t, y);
}

std::vector<double> gap_rates(std::span<const double> t, std::span<const double> g) {
    check_series(t, g, 3);
    const std::size_t n = t.size();
    const double h = (t.back() - t.front()) / static_cast<double>(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * h) {
            std::ostringstream msg;
            msg << "epochs are not uniformly spaced (interval " << i << ")";
            throw Error("non_uniform_spacing", msg.str());
        }
    }

    std::vector<double> rates(n);
    for (std::size_t i = 1; i + 1 < n; ++i) rates[i] = (g[i + 1] - g[i - 1]) / (2.0 * h);
    rates[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
    rates[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * h);
    return rates;
}

LinearFit fit_gap_linear(std::span<const double> t, std::span<const double> g) {
    const std::vector<double> rates = gap_rates(t, g);

    const double g_bar = mean(g);
    const double r_bar = mean(rates);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        sxx += (g[i] - g_bar) * (g[i] - g_bar);
        sxy += (g[i] - g_bar) * (rates[i] - r_bar);
    }
    if (!(sxx > 0.0)) {
        throw Error("degenerate_regressor", "gap values are constant; slope is undefined");
    }

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = r_bar - fit.slope * g_bar;

    double ssr = 0.0;
    double sst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = rates[i] - (fit.slope * g[i] + fit.intercept);
        ssr += r * r;
        sst += (rates[i] - r_bar) * (rates[i] - r_bar);
        scale += rates[i] * rates[i];
    }
    // A response that is constant up to rounding is fully explained by the intercept.
    fit.r_squared = sst <= 1e-24 * std::max(1.0, scale) ? 1.0 : 1.0 - ssr / sst;
    return fit;
}

RecoveredParams recover_params(const ExpFit& fit_s, const ExpFit& fit_v, double rate_tolerance) {
    if (!(rate_tolerance >= 0.0)) {
        throw Error("invalid_tolerance", "rate tolerance must be nonnegative", "rate_tolerance");
    }
    if (!fit_s.converged || fit_s.status != FitStatus::ok) {
        throw Error("not_converged", "solver fit did not converge (" + to_string(fit_s.status) + ")", "u_s");
    }
    const bool frozen_verifier = fit_v.status == FitStatus::degenerate_series;
    if (!frozen_verifier && (!fit_v.converged || fit_v.status != FitStatus::ok)) {
        throw Error("not_converged", "verifier fit did not converge (" + to_string(fit_v.status) + ")", "u_v");
    }

    RecoveredParams out;
    if (frozen_verifier) {
        out.lambda = fit_s.rate;
    } else {
        const double hi = std::max(fit_s.rate, fit_v.rate);
        if (std::abs(fit_s.rate - fit_v.rate) > rate_tolerance * hi) {
            std::ostringstream msg;
            msg << "channel decay rates disagree: " << fit_s.rate << " vs " << fit_v.rate;
            throw Error("rate_mismatch", msg.str());
        }
        // Inverse residual variance weights; both channels share the sample count.
        const double var_s = fit_s.residual_norm * fit_s.residual_norm;
        const double var_v = fit_v.residual_norm * fit_v.residual_norm;
        constexpr double tiny = std::numeric_limits<double>::min();
        if (var_s <= tiny && var_v <= tiny) {
            out.lambda = 0.5 * (fit_s.rate + fit_v.rate);
        } else {
            const double w_s = 1.0 / std::max(var_s, tiny);
            const double w_v = 1.0 / std::max(var_v, tiny);
            out.lambda = (w_s * fit_s.rate + w_v * fit_v.rate) / (w_s + w_v);
        }
    }

    const double a_s = fit_s.amplitude;
    const double a_v = frozen_verifier ? 0.0 : fit_v.amplitude;
    if (!(a_s > a_v)) {
        throw Error("non_model", "solver amplitude must exceed verifier amplitude");
    }
    if (fit_s.offset < fit_v.offset) {
        throw Error("non_model", "solver limit lies below verifier limit");
    }

    out.g_inf = fit_s.offset - fit_v.offset;
    if (a_v != 0.0) out.alpha_over_beta = a_s / a_v;
    out.alpha = out.lambda * a_s / (a_s - a_v);
    out.beta = out.lambda * a_v / (a_s - a_v);
    out.b = out.g_inf;
    out.identifiable = out.beta >= 0.0 && a_s > 0.0;
    return out;
}

}  // namespace svgap
