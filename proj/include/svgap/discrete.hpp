#pragma once

#include "svgap/dynamics.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace svgap {

/// Row-major 3x3 matrix acting on the affine state (u_v, u_s, 1).
struct Mat3 {
    std::array<double, 9> m{};

    static Mat3 identity();
    static Mat3 zero() { return {}; }

    double& operator()(std::size_t r, std::size_t c) { return m[r * 3 + c]; }
    double operator()(std::size_t r, std::size_t c) const { return m[r * 3 + c]; }

    bool operator==(const Mat3&) const = default;
};

Mat3 operator+(const Mat3& a, const Mat3& b);
Mat3 operator-(const Mat3& a, const Mat3& b);
Mat3 operator*(const Mat3& a, const Mat3& b);
Mat3 operator*(double s, const Mat3& a);

/// Max absolute row sum.
double norm_inf(const Mat3& a);

/// Matrix exponential by scaling and squaring over a truncated Taylor series.
Mat3 expm(const Mat3& a);

/// Per-epoch matrix Delta_t of the map U(t) = (I - Delta_t) U(t-1). Its third
/// row is always zero.
using StepMatrix = Mat3;

struct UncertaintyVector {
    double u_v = 0.0;
    double u_s = 0.0;
    double one = 1.0;

    static UncertaintyVector from(const InitialState& init) { return {init.u_v0, init.u_s0, 1.0}; }
    bool operator==(const UncertaintyVector&) const = default;
};

UncertaintyVector operator*(const Mat3& a, const UncertaintyVector& u);

enum class ScheduleKind { early, uniform, late, custom };

std::string to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(const std::string& text);

/// Fractions eta_1..eta_T of the external-data budget spent in each epoch.
struct Schedule {
    std::vector<double> eta;
    std::optional<long long> budget;  // total external examples M, informational

    std::size_t horizon() const { return eta.size(); }
    double total() const;
    bool operator==(const Schedule&) const = default;
};

/// Throws Error("invalid_schedule") unless horizon >= 1, every eta in [0, 1]
/// and the sum is at most 1 (+1e-12).
void validate(const Schedule& schedule);

Schedule make_schedule(ScheduleKind kind, std::size_t horizon, double total = 1.0,
                       std::span<const double> custom_eta = {}, std::size_t late_epoch = 8);

/// All-zero schedule: plain self-improvement.
Schedule self_improvement_schedule(std::size_t horizon);

StepMatrix build_step_matrix(const DynamicsParams& params, double eta_t);

/// One epoch of cross-improvement, as intermediate and final values.
struct StepRecord {
    std::size_t t = 0;
    double pre_cross_u_s = 0.0;
    double pre_cross_u_v = 0.0;
    double post_u_s = 0.0;
    double post_u_v = 0.0;
    double gap_c = 0.0;
    double energy = 0.0;
};

struct DiscreteRun {
    std::vector<StepRecord> records;
    std::vector<std::string> warnings;

    UncertaintyVector final_state(const InitialState& init) const;
};

/// Iterates boost, energy and update for t = 1..T. Unlike the continuous
/// model, any finite initial state is accepted.
DiscreteRun simulate_discrete(const DynamicsParams& params, const InitialState& init, const Schedule& schedule);

/// Product of (I - Delta_t) for t = T..1 applied to U(0).
UncertaintyVector exact_product_state(const DynamicsParams& params, const InitialState& init,
                                      const Schedule& schedule);

/// Delta' = sum of the linearised Delta_t; depends on the schedule only
/// through its sum.
StepMatrix aggregate_matrix(const DynamicsParams& params, const Schedule& schedule);

/// exp(-Delta') U(0).
UncertaintyVector approx_final_state(const DynamicsParams& params, const InitialState& init,
                                     const Schedule& schedule);

struct NamedSchedule {
    std::string name;
    Schedule schedule;
};

struct ScheduleOutcome {
    std::string name;
    Schedule schedule;
    UncertaintyVector exact;
    UncertaintyVector approx;
    double discrepancy = 0.0;  // inf-norm of exact - approx

    bool operator==(const ScheduleOutcome&) const = default;
};

struct ScheduleComparison {
    std::vector<ScheduleOutcome> outcomes;
    ScheduleOutcome baseline;  // all-zero eta
    double spread = 0.0;       // max - min of exact final u_s over `outcomes`

    bool operator==(const ScheduleComparison&) const = default;
};

ScheduleComparison compare_schedules(const DynamicsParams& params, const InitialState& init,
                                     std::span<const NamedSchedule> schedules);

}  // namespace svgap
