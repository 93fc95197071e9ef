#pragma once

#include "svgap/discrete.hpp"
#include "svgap/dynamics.hpp"
#include "svgap/estimation.hpp"
#include "svgap/selection.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace svgap {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Trajectory CSV: header `epoch,u_s,u_v`, one row per epoch.

Trajectory read_trajectory(std::istream& in, const std::string& source = "<stream>");
Trajectory read_trajectory(const std::filesystem::path& path);
void write_trajectory(std::ostream& out, const Trajectory& trajectory);
void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory);

/// Per-epoch detail of a discrete run as CSV.
void write_step_records(const std::filesystem::path& path, std::span<const StepRecord> records);

// Candidate CSV: header `prompt_id,nll,length,score`. Rows of one prompt may be
// interleaved with others; sets come back in order of first appearance.
std::vector<CandidateSet> read_candidates(std::istream& in, const std::string& source = "<stream>");
std::vector<CandidateSet> read_candidates(const std::filesystem::path& path);

// Solver CSV: header `prompt_id,nll`, one row per prompt.
std::vector<std::pair<std::string, double>> read_solver_nlls(const std::filesystem::path& path);

// Correctness matrix: no header, one row of 0/1 values per prompt.
CorrectnessMatrix read_correctness(std::istream& in, const std::string& source = "<stream>");
CorrectnessMatrix read_correctness(const std::filesystem::path& path);

// Reports.

struct ReportInput {
    std::string source;
    std::string label;
    long long points = 0;
    std::optional<DynamicsParams> params;
    std::optional<InitialState> initial;

    bool operator==(const ReportInput&) const = default;
};

struct ChannelFits {
    std::optional<ExpFit> u_s;
    std::optional<ExpFit> u_v;
    std::optional<LinearFit> gap_linear;
    std::vector<std::string> notes;

    bool operator==(const ChannelFits&) const = default;
};

struct Limits {
    double u_s_inf = 0.0;
    double u_v_inf = 0.0;
    double g_inf = 0.0;

    bool operator==(const Limits&) const = default;
};

struct Budget {
    double epsilon = 0.0;
    double epochs = 0.0;
    long long whole_epochs = 0;

    bool operator==(const Budget&) const = default;
};

/// Serialised as a JSON object with sorted keys `input`, `fits`,
/// `recovered_params`, `limits`, `budget` and `schedules`; absent sections
/// are written as null.
struct ReportDocument {
    ReportInput input;
    std::optional<ChannelFits> fits;
    std::optional<RecoveredParams> recovered_params;
    std::optional<Limits> limits;
    std::optional<Budget> budget;
    std::optional<ScheduleComparison> schedules;

    bool operator==(const ReportDocument&) const = default;
};

/// Canonical text of a report. Throws Error("non_finite_field") if any
/// number is NaN or infinite.
std::string render_report(const ReportDocument& report);
ReportDocument parse_report(const std::string& text);

void write_report(const ReportDocument& report, const std::filesystem::path& path);
ReportDocument read_report(const std::filesystem::path& path);

/// Writes `text` to `path`, wrapping stream failures in Error("io_error").
void write_text(const std::filesystem::path& path, const std::string& text);

// Plots.

enum class PlotStyle { line, markers };

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
    PlotStyle style = PlotStyle::line;
};

struct PlotOptions {
    std::string title;
    std::string x_label = "epoch";
    std::string y_label;
};

/// SVG chart with one layer per series plus `<stem>.points.csv` next to it.
void emit_plot(std::span<const PlotSeries> series, const std::filesystem::path& path, const PlotOptions& options = {});

/// Path of the CSV written alongside a plot.
std::filesystem::path plot_points_path(const std::filesystem::path& svg_path);

}  // namespace svgap
