#include "svgap/cli.hpp"

#include "svgap/discrete.hpp"
#include "svgap/dynamics.hpp"
#include "svgap/error.hpp"
#include "svgap/estimation.hpp"
#include "svgap/io.hpp"
#include "svgap/selection.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace svgap::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Bad flags or inputs detected before any computation starts.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::string output = ".";
    bool plot = false;
    std::uint64_t seed = 0;
    bool quiet = false;
};

struct ModelOptions {
    double alpha = 0.0;
    double beta = 0.0;
    double k = 1.0;
    double b = 0.0;
    double gamma = 0.0;
    double us0 = 0.0;
    double uv0 = 0.0;
    long long horizon = 10;

    DynamicsParams params() const { return {alpha, beta, k, b, gamma}; }
    InitialState initial() const { return {us0, uv0}; }
};

struct SimulateOptions {
    std::string mode = "closed-form";
    double step = 1e-3;
    std::string schedule = "none";
    double total = 1.0;
    std::vector<double> eta;
    long long late_epoch = 8;
    double noise = 0.0;
    std::string label = "simulated";
};

struct FitOptions {
    std::string input;
    std::optional<double> epsilon;
    double rate_tolerance = 0.05;
};

struct SchedulesOptions {
    double total = 1.0;
    std::vector<double> eta;
    long long late_epoch = 8;
    std::optional<long long> budget;
};

struct MetricsOptions {
    std::string candidates;
    std::string solver;
    std::string correctness;
    double sigma = 0.0;
    std::vector<std::size_t> k_values;
};

std::string flag_for(const std::string& field) {
    static const std::map<std::string, std::string> flags = {
        {"alpha", "--alpha"},     {"beta", "--beta"},   {"k", "--k"},
        {"b", "--b"},             {"gamma", "--gamma"}, {"u_s0", "--us0"},
        {"u_v0", "--uv0"},        {"T", "--T"},         {"eta", "--eta"},
        {"total", "--total"},     {"late_epoch", "--late-epoch"},
        {"step", "--step"},       {"epsilon", "--epsilon"},
        {"rate_tolerance", "--rate-tolerance"},         {"budget", "--budget"},
        {"schedule", "--schedule"}, {"sigma", "--sigma"}, {"k_values", "--K"}};
    const auto it = flags.find(field);
    return it == flags.end() ? field : it->second;
}

// Runs a precondition check, turning any failure into a usage error naming the flag.
template <typename Check>
void precondition(Check&& check) {
    try {
        check();
    } catch (const Error& e) {
        const std::string flag = e.field().empty() ? std::string() : flag_for(e.field()) + ": ";
        throw UsageError(flag + e.what());
    }
}

// Uniform double in [0, 1) with 53 random bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void add_model_options(CLI::App* cmd, ModelOptions& m, bool with_gamma) {
    cmd->add_option("--alpha", m.alpha, "solver rate coefficient")->required();
    cmd->add_option("--beta", m.beta, "verifier rate coefficient")->required();
    cmd->add_option("--k", m.k, "energy slope")->capture_default_str();
    cmd->add_option("--b", m.b, "energy intercept")->capture_default_str();
    if (with_gamma) cmd->add_option("--gamma", m.gamma, "cross-improvement effect")->capture_default_str();
    cmd->add_option("--us0", m.us0, "initial solver uncertainty")->required();
    cmd->add_option("--uv0", m.uv0, "initial verifier uncertainty")->required();
    cmd->add_option("--T", m.horizon, "number of epochs")->capture_default_str();
}

std::size_t checked_horizon(long long horizon) {
    if (horizon < 1) throw UsageError("--T: must be at least 1");
    return static_cast<std::size_t>(horizon);
}

Schedule build_schedule(const std::string& kind_text, std::size_t horizon, double total, const std::vector<double>& eta,
                        long long late_epoch) {
    if (kind_text == "none") return self_improvement_schedule(horizon);
    if (late_epoch < 1) throw UsageError("--late-epoch: must be at least 1");
    const ScheduleKind kind = parse_schedule_kind(kind_text);
    return make_schedule(kind, horizon, total, eta, static_cast<std::size_t>(late_epoch));
}

fs::path prepare_output(const GlobalOptions& g) {
    const fs::path dir(g.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("io_error", "cannot create output directory '" + dir.string() + "': " + ec.message(), g.output);
    return dir;
}

// simulate

int cmd_simulate(const GlobalOptions& g, const ModelOptions& m, const SimulateOptions& o, std::ostream& out,
                 std::ostream& err) {
    const std::size_t horizon = checked_horizon(m.horizon);
    const DynamicsParams params = m.params();
    const InitialState init = m.initial();
    Schedule schedule;

    if (o.mode != "closed-form" && o.mode != "ode" && o.mode != "discrete") {
        throw UsageError("--mode: expected closed-form, ode or discrete");
    }
    precondition([&] {
        validate(params);
        if (o.mode == "discrete") {
            schedule = build_schedule(o.schedule, horizon, o.total, o.eta, o.late_epoch);
        } else {
            validate(init);
        }
        if (o.mode == "ode" && !(o.step > 0.0 && std::isfinite(o.step))) {
            throw Error("invalid_step", "step must be positive", "step");
        }
    });
    if (!(o.noise >= 0.0 && std::isfinite(o.noise))) throw UsageError("--noise: must be nonnegative");

    const fs::path dir = prepare_output(g);
    Trajectory traj;
    traj.label = o.label;
    std::vector<StepRecord> records;

    if (o.mode == "closed-form") {
        for (std::size_t e = 0; e <= horizon; ++e) {
            const CapabilityState s = closed_form_state(params, init, static_cast<double>(e));
            traj.points.push_back({s.t, s.u_s, s.u_v});
        }
    } else if (o.mode == "ode") {
        const auto states = integrate_ode(params, init, static_cast<double>(horizon), o.step);
        for (std::size_t e = 0; e <= horizon; ++e) {
            const auto nearest = std::min_element(states.begin(), states.end(), [&](const auto& a, const auto& b) {
                return std::abs(a.t - static_cast<double>(e)) < std::abs(b.t - static_cast<double>(e));
            });
            traj.points.push_back({static_cast<double>(e), nearest->u_s, nearest->u_v});
        }
    } else {
        DiscreteRun run = simulate_discrete(params, init, schedule);
        for (const auto& w : run.warnings) {
            if (!g.quiet) err << "warning: " << w << '\n';
        }
        traj.points.push_back({0.0, init.u_s0, init.u_v0});
        for (const auto& r : run.records) traj.points.push_back({static_cast<double>(r.t), r.post_u_s, r.post_u_v});
        records = std::move(run.records);
    }

    if (o.noise > 0.0) {
        std::mt19937_64 rng(g.seed);
        for (auto& p : traj.points) {
            p.u_s += o.noise * (unit_uniform(rng) - 0.5);
            p.u_v += o.noise * (unit_uniform(rng) - 0.5);
        }
    }

    write_trajectory(dir / "trajectory.csv", traj);
    if (!records.empty()) write_step_records(dir / "steps.csv", records);
    if (g.plot) {
        PlotSeries s{"u_s", {}, PlotStyle::line};
        PlotSeries v{"u_v", {}, PlotStyle::line};
        for (const auto& p : traj.points) {
            s.points.emplace_back(p.t, p.u_s);
            v.points.emplace_back(p.t, p.u_v);
        }
        const std::vector<PlotSeries> series = {s, v};
        emit_plot(series, dir / "trajectory.svg", {"Simulated uncertainty (" + o.mode + ")", "epoch", "uncertainty"});
    }
    if (!g.quiet) {
        const auto& last = traj.points.back();
        out << "simulate (" << o.mode << "): " << traj.points.size() << " rows -> " << (dir / "trajectory.csv").string()
            << "\nfinal epoch " << format_double(last.t) << ": u_s=" << format_double(last.u_s)
            << " u_v=" << format_double(last.u_v) << '\n';
    }
    return success;
}

// fit

std::optional<ExpFit> try_fit(std::span<const double> t, std::span<const double> y, const std::string& channel,
                              std::vector<std::string>& notes) {
    const ExpFit fit = fit_exponential(t, y);
    if (fit.status != FitStatus::ok) notes.push_back(channel + ": " + to_string(fit.status));
    return fit;
}

int cmd_fit(const GlobalOptions& g, const FitOptions& o, std::ostream& out) {
    precondition([&] {
        if (o.epsilon && !(*o.epsilon > 0.0 && std::isfinite(*o.epsilon))) {
            throw Error("invalid_tolerance", "must be positive", "epsilon");
        }
        if (!(o.rate_tolerance >= 0.0)) throw Error("invalid_tolerance", "must be nonnegative", "rate_tolerance");
    });

    const Trajectory traj = read_trajectory(fs::path(o.input));
    if (traj.points.size() < 4) {
        throw Error("too_few_points", "at least 4 trajectory rows are required for fitting", "input");
    }
    const fs::path dir = prepare_output(g);

    const std::vector<double> t = traj.epochs();
    const std::vector<double> us = traj.solver();
    const std::vector<double> uv = traj.verifier();
    const std::vector<double> gap = traj.gaps();

    ReportDocument report;
    report.input.source = o.input;
    report.input.label = traj.label;
    report.input.points = static_cast<long long>(traj.points.size());

    ChannelFits fits;
    fits.u_s = try_fit(t, us, "u_s", fits.notes);
    fits.u_v = try_fit(t, uv, "u_v", fits.notes);
    try {
        fits.gap_linear = fit_gap_linear(t, gap);
    } catch (const Error& e) {
        fits.notes.push_back(std::string("gap_linear: ") + e.code() + ": " + e.what());
    }

    try {
        const RecoveredParams rp = recover_params(*fits.u_s, *fits.u_v, o.rate_tolerance);
        report.recovered_params = rp;
        report.limits = Limits{fits.u_s->offset, fits.u_v->offset, rp.g_inf};
        if (o.epsilon) {
            if (rp.identifiable) {
                const DynamicsParams params{rp.alpha, rp.beta, 1.0, rp.b, 0.0};
                const InitialState init{fits.u_s->predict(0.0), fits.u_v->predict(0.0)};
                const double epochs = epochs_to_tolerance(params, init, *o.epsilon);
                report.budget = Budget{*o.epsilon, epochs, static_cast<long long>(std::ceil(epochs))};
            } else {
                fits.notes.push_back("budget: recovered parameters are not identifiable");
            }
        }
    } catch (const Error& e) {
        fits.notes.push_back(std::string("recovered_params: ") + e.code() + ": " + e.what());
    }
    report.fits = fits;

    const fs::path report_path = dir / "report.json";
    write_report(report, report_path);

    if (g.plot) {
        std::vector<PlotSeries> series;
        const auto add_channel = [&](const std::string& name, const std::vector<double>& y, const ExpFit& f) {
            PlotSeries observed{name + " observed", {}, PlotStyle::markers};
            for (std::size_t i = 0; i < t.size(); ++i) observed.points.emplace_back(t[i], y[i]);
            PlotSeries fitted{name + " fit", {}, PlotStyle::line};
            constexpr int samples = 200;
            for (int i = 0; i <= samples; ++i) {
                const double x = t.front() + (t.back() - t.front()) * i / samples;
                fitted.points.emplace_back(x, f.predict(x));
            }
            series.push_back(std::move(observed));
            series.push_back(std::move(fitted));
        };
        add_channel("u_s", us, *fits.u_s);
        add_channel("u_v", uv, *fits.u_v);
        emit_plot(series, dir / "fit.svg", {"Exponential fit", "epoch", "uncertainty"});

        if (fits.gap_linear) {
            const std::vector<double> rates = gap_rates(t, gap);
            PlotSeries observed{"dG/dt", {}, PlotStyle::markers};
            for (std::size_t i = 0; i < gap.size(); ++i) observed.points.emplace_back(gap[i], rates[i]);
            const auto [g_lo, g_hi] = std::minmax_element(gap.begin(), gap.end());
            PlotSeries line{"linear fit", {}, PlotStyle::line};
            for (double x : {*g_lo, *g_hi}) line.points.emplace_back(x, fits.gap_linear->slope * x + fits.gap_linear->intercept);
            const std::vector<PlotSeries> gap_series = {observed, line};
            emit_plot(gap_series, dir / "gap_rate.svg", {"Gap rate vs gap", "G", "dG/dt"});
        }
    }

    if (!g.quiet) {
        out << "fit: " << traj.points.size() << " points from " << o.input << '\n';
        for (const auto& [name, f] : {std::pair{"u_s", *fits.u_s}, std::pair{"u_v", *fits.u_v}}) {
            out << "  " << name << ": A=" << format_double(f.amplitude) << " lambda=" << format_double(f.rate)
                << " C=" << format_double(f.offset) << " R2=" << format_double(f.r_squared) << " ["
                << to_string(f.status) << "]\n";
        }
        if (report.recovered_params) {
            const auto& rp = *report.recovered_params;
            out << "  recovered (k=1): alpha=" << format_double(rp.alpha) << " beta=" << format_double(rp.beta)
                << " b=" << format_double(rp.b) << '\n';
        }
        if (report.budget) {
            out << "  budget: " << format_double(report.budget->epochs) << " epochs (" << report.budget->whole_epochs
                << " whole)\n";
        }
        for (const auto& n : fits.notes) out << "  note: " << n << '\n';
        out << "report -> " << report_path.string() << '\n';
    }
    return success;
}

// schedules

int cmd_schedules(const GlobalOptions& g, const ModelOptions& m, const SchedulesOptions& o, std::ostream& out) {
    const std::size_t horizon = checked_horizon(m.horizon);
    const DynamicsParams params = m.params();
    const InitialState init = m.initial();
    std::vector<NamedSchedule> schedules;
    precondition([&] {
        validate(params);
        if (o.late_epoch < 1) throw Error("invalid_schedule", "must be at least 1", "late_epoch");
        const auto late = static_cast<std::size_t>(o.late_epoch);
        Schedule early = make_schedule(ScheduleKind::early, horizon, o.total);
        Schedule uniform = make_schedule(ScheduleKind::uniform, horizon, o.total);
        Schedule late_s = make_schedule(ScheduleKind::late, horizon, o.total, {}, late);
        schedules = {{"early", early}, {"uniform", uniform}, {"late", late_s}};
        if (!o.eta.empty()) schedules.push_back({"custom", make_schedule(ScheduleKind::custom, horizon, o.total, o.eta)});
        for (auto& s : schedules) {
            s.schedule.budget = o.budget;
            validate(s.schedule);
        }
        for (const auto& s : schedules) {
            for (double eta : s.schedule.eta) build_step_matrix(params, eta);
        }
    });

    const fs::path dir = prepare_output(g);
    const ScheduleComparison cmp = compare_schedules(params, init, schedules);

    ReportDocument report;
    report.input.source = "schedules";
    report.input.label = "cross-improvement allocation comparison";
    report.input.points = static_cast<long long>(horizon);
    report.input.params = params;
    report.input.initial = init;
    report.schedules = cmp;
    const fs::path report_path = dir / "schedules.json";
    write_report(report, report_path);

    if (g.plot) {
        std::vector<PlotSeries> series;
        const auto add = [&](const std::string& name, const Schedule& s) {
            PlotSeries ps{name, {{0.0, init.u_s0}}, PlotStyle::line};
            for (const auto& r : simulate_discrete(params, init, s).records) {
                ps.points.emplace_back(static_cast<double>(r.t), r.post_u_s);
            }
            series.push_back(std::move(ps));
        };
        for (const auto& s : schedules) add(s.name, s.schedule);
        add("self-improvement", cmp.baseline.schedule);
        emit_plot(series, dir / "schedules.svg", {"Solver uncertainty by allocation schedule", "epoch", "u_s"});
    }

    if (!g.quiet) {
        out << "schedules: T=" << horizon << " gamma=" << format_double(params.gamma) << '\n';
        const auto row = [&](const ScheduleOutcome& s) {
            out << "  " << s.name << ": exact u_s=" << format_double(s.exact.u_s)
                << " approx u_s=" << format_double(s.approx.u_s) << " discrepancy=" << format_double(s.discrepancy)
                << '\n';
        };
        for (const auto& s : cmp.outcomes) row(s);
        row(cmp.baseline);
        out << "  spread of exact final u_s: " << format_double(cmp.spread) << '\n';
        out << "report -> " << report_path.string() << '\n';
    }
    return success;
}

// metrics

struct MetricsResult {
    int status = success;
    json error;
};

MetricsResult cmd_metrics(const GlobalOptions& g, const MetricsOptions& o, std::ostream& out) {
    if (o.candidates.empty() && o.correctness.empty()) {
        throw UsageError("metrics needs --candidates and/or --correctness");
    }
    precondition([&] {
        if (!(o.sigma >= 0.0 && o.sigma <= 1.0)) throw Error("invalid_threshold", "must lie in [0, 1]", "sigma");
    });

    std::vector<CandidateSet> sets;
    if (!o.candidates.empty()) {
        std::error_code ec;
        if (fs::is_regular_file(o.candidates, ec) && fs::file_size(o.candidates, ec) == 0 && !ec) {
            throw UsageError("--candidates: file is empty");
        }
        sets = read_candidates(fs::path(o.candidates));
        if (sets.empty()) throw UsageError("--candidates: file contains no candidates");
        precondition([&] {
            for (const auto& s : sets) validate(s);
        });
    }
    std::optional<CorrectnessMatrix> matrix;
    if (!o.correctness.empty()) {
        matrix = read_correctness(fs::path(o.correctness));
        for (std::size_t k : o.k_values) {
            if (k < 1 || k > matrix->samples()) throw UsageError("--K: every value must lie in [1, N]");
        }
    }

    const fs::path dir = prepare_output(g);
    json doc = json::object();
    doc["sigma"] = o.sigma;
    json failures = json::array();

    if (!sets.empty()) {
        std::vector<double> solver_nlls;
        if (!o.solver.empty()) {
            std::map<std::string, double> by_prompt;
            for (const auto& [id, nll] : read_solver_nlls(fs::path(o.solver))) by_prompt[id] = nll;
            for (const auto& s : sets) {
                const auto it = by_prompt.find(s.prompt_id);
                if (it == by_prompt.end()) {
                    throw Error("missing_solver_response", "no solver response for prompt '" + s.prompt_id + "'",
                                s.prompt_id);
                }
                solver_nlls.push_back(it->second);
            }
        } else {
            for (const auto& s : sets) solver_nlls.push_back(s.candidates.front().nll);
        }

        json bon = json::array();
        for (const auto& s : sets) {
            try {
                const std::size_t idx = select_bon(s, o.sigma);
                bon.push_back({{"prompt_id", s.prompt_id}, {"index", idx}, {"nll", s.candidates[idx].nll}});
            } catch (const Error& e) {
                bon.push_back({{"prompt_id", s.prompt_id}, {"error", e.code()}});
                failures.push_back({{"prompt_id", s.prompt_id}, {"code", e.code()}, {"message", e.what()}});
            }
        }
        doc["bon"] = std::move(bon);
        doc["solver_uncertainty"] = solver_uncertainty(solver_nlls);
        if (failures.empty()) {
            doc["verifier_uncertainty"] = verifier_uncertainty(sets, o.sigma);
            doc["capability_gap"] = capability_gap(solver_nlls, sets, o.sigma);
        } else {
            doc["verifier_uncertainty"] = nullptr;
            doc["capability_gap"] = nullptr;
        }
    }

    if (matrix) {
        std::vector<std::size_t> ks = o.k_values;
        if (ks.empty()) {
            for (std::size_t k = 1; k <= matrix->samples(); ++k) ks.push_back(k);
        }
        json pass = json::object();
        for (std::size_t k : ks) pass[std::to_string(k)] = pass_at_k(*matrix, k);
        doc["pass_at_k"] = std::move(pass);
    }
    doc["errors"] = failures;

    const fs::path path = dir / "metrics.json";
    write_text(path, doc.dump(2) + "\n");

    if (!g.quiet) {
        out << "metrics -> " << path.string() << '\n';
        if (doc.contains("bon")) {
            for (const auto& b : doc["bon"]) {
                out << "  " << b["prompt_id"].get<std::string>() << ": ";
                if (b.contains("index")) {
                    out << "BoN index " << b["index"].get<std::size_t>() << '\n';
                } else {
                    out << b["error"].get<std::string>() << '\n';
                }
            }
        }
        if (doc.contains("capability_gap") && !doc["capability_gap"].is_null()) {
            out << "  U_s=" << format_double(doc["solver_uncertainty"].get<double>())
                << " U_v=" << format_double(doc["verifier_uncertainty"].get<double>())
                << " G=" << format_double(doc["capability_gap"].get<double>()) << '\n';
        }
        if (doc.contains("pass_at_k")) {
            for (const auto& [k, v] : doc["pass_at_k"].items()) out << "  pass@" << k << " = " << v.get<double>() << '\n';
        }
    }

    MetricsResult result;
    if (!failures.empty()) {
        result.status = computation_error;
        result.error = {{"error", {{"code", "all_below_threshold"},
                                   {"message", "BoN selection failed for some prompts"},
                                   {"prompts", failures}}}};
    }
    return result;
}

void report_error(std::ostream& err, const std::string& code, const std::string& message, const std::string& field) {
    json doc = {{"error", {{"code", code}, {"message", message}}}};
    if (!field.empty()) doc["error"]["field"] = field;
    err << doc.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Solver-verifier gap dynamics toolkit: simulate, fit, compare schedules, compute selection metrics"};
    app.name("svgap");
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--output", global.output, "output directory")->capture_default_str();
    app.add_flag("--plot", global.plot, "also write SVG plots");
    app.add_option("--seed", global.seed, "seed for randomized steps")->capture_default_str();
    app.add_flag("--quiet", global.quiet, "suppress progress output");

    ModelOptions sim_model;
    SimulateOptions sim;
    CLI::App* simulate = app.add_subcommand("simulate", "generate a trajectory from known parameters");
    add_model_options(simulate, sim_model, true);
    simulate->add_option("--mode", sim.mode, "closed-form, ode or discrete")->capture_default_str();
    simulate->add_option("--step", sim.step, "RK4 step for --mode ode")->capture_default_str();
    simulate->add_option("--schedule", sim.schedule, "none, early, uniform, late or custom (discrete mode)")
        ->capture_default_str();
    simulate->add_option("--total", sim.total, "sum of eta for the schedule")->capture_default_str();
    simulate->add_option("--eta", sim.eta, "custom eta values, comma separated")->delimiter(',');
    simulate->add_option("--late-epoch", sim.late_epoch, "epoch receiving all data for --schedule late")
        ->capture_default_str();
    simulate->add_option("--noise", sim.noise, "width of zero-mean uniform noise added to each value")
        ->capture_default_str();
    simulate->add_option("--label", sim.label, "trajectory label")->capture_default_str();

    FitOptions fit_opts;
    CLI::App* fit = app.add_subcommand("fit", "fit the exponential law to a trajectory CSV");
    fit->add_option("--input", fit_opts.input, "trajectory CSV (epoch,u_s,u_v)")->required();
    fit->add_option("--epsilon", fit_opts.epsilon, "gap tolerance for the epoch budget");
    fit->add_option("--rate-tolerance", fit_opts.rate_tolerance, "allowed relative mismatch of channel rates")
        ->capture_default_str();

    ModelOptions sch_model;
    SchedulesOptions sch;
    CLI::App* schedules = app.add_subcommand("schedules", "compare early/uniform/late external-data allocation");
    add_model_options(schedules, sch_model, true);
    schedules->add_option("--total", sch.total, "sum of eta for every schedule")->capture_default_str();
    schedules->add_option("--eta", sch.eta, "additional custom schedule, comma separated")->delimiter(',');
    schedules->add_option("--late-epoch", sch.late_epoch, "epoch receiving all data in the late schedule")
        ->capture_default_str();
    schedules->add_option("--budget", sch.budget, "total external examples M (informational)");

    MetricsOptions met;
    CLI::App* metrics = app.add_subcommand("metrics", "BoN selection, uncertainties and Pass@K from sample files");
    metrics->add_option("--candidates", met.candidates, "CSV prompt_id,nll,length,score");
    metrics->add_option("--solver", met.solver, "CSV prompt_id,nll of solver responses (default: first candidate)");
    metrics->add_option("--correctness", met.correctness, "CSV of 0/1 rows, one per prompt");
    metrics->add_option("--sigma", met.sigma, "verifier score threshold")->capture_default_str();
    metrics->add_option("--K", met.k_values, "Pass@K values, comma separated (default: 1..N)")->delimiter(',');

    for (CLI::App* sub : {simulate, fit, schedules, metrics}) sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage_error;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(global, sim_model, sim, out, err);
        if (fit->parsed()) return cmd_fit(global, fit_opts, out);
        if (schedules->parsed()) return cmd_schedules(global, sch_model, sch, out);
        if (metrics->parsed()) {
            const MetricsResult r = cmd_metrics(global, met, out);
            if (r.status != success) err << r.error.dump() << '\n';
            return r.status;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return usage_error;
    } catch (const Error& e) {
        report_error(err, e.code(), e.what(), e.field());
        return computation_error;
    } catch (const std::exception& e) {
        report_error(err, "internal_error", e.what(), {});
        return computation_error;
    }
    return usage_error;
}

}  // namespace svgap::cli
