#include "svgap/discrete.hpp"

#include "svgap/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace svgap {

Mat3 Mat3::identity() {
    Mat3 i;
    i(0, 0) = i(1, 1) = i(2, 2) = 1.0;
    return i;
}

Mat3 operator+(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] = a.m[i] + b.m[i];
    return r;
}

Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] = a.m[i] - b.m[i];
    return r;
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 r;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double s = 0.0;
            for (std::size_t l = 0; l < 3; ++l) s += a(i, l) * b(l, j);
            r(i, j) = s;
        }
    }
    return r;
}

Mat3 operator*(double s, const Mat3& a) {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] = s * a.m[i];
    return r;
}

double norm_inf(const Mat3& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        best = std::max(best, std::abs(a(i, 0)) + std::abs(a(i, 1)) + std::abs(a(i, 2)));
    }
    return best;
}

Mat3 expm(const Mat3& a) {
    // Scale until ||A / 2^s|| < 0.5, sum the series, then square s times.
    int squarings = 0;
    double scale = 1.0;
    const double n = norm_inf(a);
    if (!std::isfinite(n)) {
        throw Error("non_finite_matrix", "matrix exponential of a non-finite matrix");
    }
    while (n * scale >= 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const Mat3 scaled = scale * a;

    Mat3 sum = Mat3::identity();
    Mat3 term = Mat3::identity();
    for (int j = 1; j < 64; ++j) {
        term = (1.0 / j) * (term * scaled);
        sum = sum + term;
        if (norm_inf(term) < 1e-16 * norm_inf(sum)) break;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

UncertaintyVector operator*(const Mat3& a, const UncertaintyVector& u) {
    return {a(0, 0) * u.u_v + a(0, 1) * u.u_s + a(0, 2) * u.one,
            a(1, 0) * u.u_v + a(1, 1) * u.u_s + a(1, 2) * u.one,
            a(2, 0) * u.u_v + a(2, 1) * u.u_s + a(2, 2) * u.one};
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::early: return "early";
        case ScheduleKind::uniform: return "uniform";
        case ScheduleKind::late: return "late";
        case ScheduleKind::custom: return "custom";
    }
    return "custom";
}

ScheduleKind parse_schedule_kind(const std::string& text) {
    if (text == "early") return ScheduleKind::early;
    if (text == "uniform") return ScheduleKind::uniform;
    if (text == "late") return ScheduleKind::late;
    if (text == "custom") return ScheduleKind::custom;
    throw Error("invalid_schedule", "unknown schedule kind '" + text + "'", "schedule");
}

double Schedule::total() const { return std::accumulate(eta.begin(), eta.end(), 0.0); }

void validate(const Schedule& schedule) {
    if (schedule.eta.empty()) {
        throw Error("invalid_schedule", "schedule horizon must be at least 1", "T");
    }
    for (std::size_t i = 0; i < schedule.eta.size(); ++i) {
        const double e = schedule.eta[i];
        if (!(e >= 0.0 && e <= 1.0)) {
            std::ostringstream msg;
            msg << "eta at epoch " << (i + 1) << " is outside [0, 1]";
            throw Error("invalid_schedule", msg.str(), "eta");
        }
    }
    if (schedule.total() > 1.0 + 1e-12) {
        throw Error("invalid_schedule", "schedule fractions sum to more than 1", "eta");
    }
    if (schedule.budget && *schedule.budget <= 0) {
        throw Error("invalid_schedule", "external-data budget must be positive", "budget");
    }
}

Schedule make_schedule(ScheduleKind kind, std::size_t horizon, double total, std::span<const double> custom_eta,
                       std::size_t late_epoch) {
    if (horizon == 0) {
        throw Error("invalid_schedule", "schedule horizon must be at least 1", "T");
    }
    if (!(total >= 0.0 && total <= 1.0)) {
        throw Error("invalid_schedule", "schedule total must lie in [0, 1]", "total");
    }

    Schedule s;
    s.eta.assign(horizon, 0.0);
    switch (kind) {
        case ScheduleKind::early:
            s.eta.front() = total;
            break;
        case ScheduleKind::uniform:
            std::fill(s.eta.begin(), s.eta.end(), total / static_cast<double>(horizon));
            break;
        case ScheduleKind::late:
            if (late_epoch < 1 || late_epoch > horizon) {
                throw Error("invalid_schedule", "late epoch must lie in [1, T]", "late_epoch");
            }
            s.eta[late_epoch - 1] = total;
            break;
        case ScheduleKind::custom: {
            if (custom_eta.size() != horizon) {
                throw Error("invalid_schedule", "custom schedule length must equal T", "eta");
            }
            s.eta.assign(custom_eta.begin(), custom_eta.end());
            const double sum = std::accumulate(s.eta.begin(), s.eta.end(), 0.0);
            if (std::abs(sum - total) > 1e-9) {
                throw Error("invalid_schedule", "custom schedule does not sum to the requested total", "eta");
            }
            break;
        }
    }
    validate(s);
    return s;
}

Schedule self_improvement_schedule(std::size_t horizon) { return make_schedule(ScheduleKind::uniform, horizon, 0.0); }

StepMatrix build_step_matrix(const DynamicsParams& p, double eta_t) {
    if (!(eta_t >= 0.0 && eta_t <= 1.0)) {
        throw Error("invalid_schedule", "eta must lie in [0, 1]", "eta");
    }
    const double boost = 1.0 + p.gamma * eta_t;
    if (!(boost > 0.0)) {
        throw Error("singular_boost", "1 + gamma * eta must be positive", "gamma");
    }
    StepMatrix d;
    d(0, 0) = 1.0 - (1.0 + p.beta * p.k) / boost;
    d(0, 1) = p.beta * p.k;
    d(0, 2) = -p.beta * p.b;
    d(1, 0) = -p.alpha * p.k / boost;
    d(1, 1) = p.alpha * p.k;
    d(1, 2) = -p.alpha * p.b;
    return d;
}

UncertaintyVector DiscreteRun::final_state(const InitialState& init) const {
    if (records.empty()) return UncertaintyVector::from(init);
    return {records.back().post_u_v, records.back().post_u_s, 1.0};
}

DiscreteRun simulate_discrete(const DynamicsParams& params, const InitialState& init, const Schedule& schedule) {
    validate(params);
    validate(schedule);
    if (!std::isfinite(init.u_s0) || !std::isfinite(init.u_v0)) {
        throw Error("invalid_initial_state", "initial uncertainties must be finite", "u_s0");
    }

    DiscreteRun run;
    const double contraction = 1.0 - params.k * (params.alpha - params.beta);
    if (std::abs(contraction) >= 1.0) {
        std::ostringstream msg;
        msg << "unit-step contraction factor |1 - k(alpha - beta)| = " << std::abs(contraction)
            << " >= 1; the discrete map may oscillate or diverge";
        run.warnings.push_back(msg.str());
    }

    run.records.reserve(schedule.horizon());
    double u_s = init.u_s0;
    double u_v = init.u_v0;
    for (std::size_t i = 0; i < schedule.horizon(); ++i) {
        const std::size_t epoch = i + 1;
        const double boost = 1.0 + params.gamma * schedule.eta[i];
        if (!(boost > 0.0)) {
            std::ostringstream msg;
            msg << "1 + gamma * eta must be positive (epoch " << epoch << ")";
            throw Error("singular_boost", msg.str(), "gamma");
        }
        StepRecord r;
        r.t = epoch;
        r.pre_cross_u_s = u_s;
        r.pre_cross_u_v = u_v / boost;
        r.gap_c = r.pre_cross_u_s - r.pre_cross_u_v;
        r.energy = gap_potential(params, r.gap_c);
        r.post_u_s = r.pre_cross_u_s - params.alpha * r.energy;
        r.post_u_v = r.pre_cross_u_v - params.beta * r.energy;
        u_s = r.post_u_s;
        u_v = r.post_u_v;
        run.records.push_back(r);
    }
    return run;
}

UncertaintyVector exact_product_state(const DynamicsParams& params, const InitialState& init,
                                      const Schedule& schedule) {
    validate(schedule);
    UncertaintyVector u = UncertaintyVector::from(init);
    for (std::size_t i = 0; i < schedule.horizon(); ++i) {
        u = (Mat3::identity() - build_step_matrix(params, schedule.eta[i])) * u;
    }
    return u;
}

StepMatrix aggregate_matrix(const DynamicsParams& p, const Schedule& schedule) {
    validate(schedule);
    const double horizon = static_cast<double>(schedule.horizon());
    const double reduced = horizon - p.gamma * schedule.total();
    StepMatrix d;
    d(0, 0) = horizon - (1.0 + p.beta * p.k) * reduced;
    d(0, 1) = horizon * p.beta * p.k;
    d(0, 2) = -horizon * p.beta * p.b;
    d(1, 0) = -p.alpha * p.k * reduced;
    d(1, 1) = horizon * p.alpha * p.k;
    d(1, 2) = -horizon * p.alpha * p.b;
    return d;
}

UncertaintyVector approx_final_state(const DynamicsParams& params, const InitialState& init,
                                     const Schedule& schedule) {
    return expm(-1.0 * aggregate_matrix(params, schedule)) * UncertaintyVector::from(init);
}

namespace {

ScheduleOutcome evaluate(const DynamicsParams& params, const InitialState& init, const NamedSchedule& named) {
    ScheduleOutcome o;
    o.name = named.name;
    o.schedule = named.schedule;
    o.exact = simulate_discrete(params, init, named.schedule).final_state(init);
    o.approx = approx_final_state(params, init, named.schedule);
    o.discrepancy = std::max(std::abs(o.exact.u_v - o.approx.u_v), std::abs(o.exact.u_s - o.approx.u_s));
    return o;
}

}  // namespace

ScheduleComparison compare_schedules(const DynamicsParams& params, const InitialState& init,
                                     std::span<const NamedSchedule> schedules) {
    if (schedules.empty()) {
        throw Error("invalid_schedule", "at least one schedule is required", "schedule");
    }
    const std::size_t horizon = schedules.front().schedule.horizon();
    for (const auto& s : schedules) {
        if (s.schedule.horizon() != horizon) {
            throw Error("mixed_horizons", "schedule '" + s.name + "' has a different horizon", "T");
        }
    }

    ScheduleComparison cmp;
    cmp.outcomes.reserve(schedules.size());
    for (const auto& s : schedules) cmp.outcomes.push_back(evaluate(params, init, s));
    cmp.baseline = evaluate(params, init, {"self-improvement", self_improvement_schedule(horizon)});

    const auto [lo, hi] = std::minmax_element(cmp.outcomes.begin(), cmp.outcomes.end(),
                                              [](const auto& a, const auto& b) { return a.exact.u_s < b.exact.u_s; });
    cmp.spread = hi->exact.u_s - lo->exact.u_s;
    return cmp;
}

}  // namespace svgap
