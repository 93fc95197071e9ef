#include "svgap/io.hpp"

#include "svgap/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace svgap {

using nlohmann::json;

namespace {

std::string location(const std::string& source, std::size_t line, std::size_t column = 0) {
    std::ostringstream os;
    os << source << ", line " << line;
    if (column > 0) os << ", column " << column;
    return os.str();
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool parse_finite(std::string_view text, double& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_integer(std::string_view text, long long& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("io_error", "cannot open '" + path.string() + "' for reading", path.string());
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("io_error", "cannot open '" + path.string() + "' for writing", path.string());
    }
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw Error("io_error", "failed while writing '" + path.string() + "'", path.string());
    }
}

// Rejects NaN/inf anywhere in a document before it reaches disk.
void check_finite(const json& j, const std::string& where) {
    if (j.is_number_float()) {
        if (!std::isfinite(j.get<double>())) {
            throw Error("non_finite_field", "report field '" + where + "' is not finite", where);
        }
    } else if (j.is_object()) {
        for (const auto& [key, value] : j.items()) check_finite(value, where.empty() ? key : where + "." + key);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) check_finite(j[i], where + "[" + std::to_string(i) + "]");
    }
}

json params_json(const DynamicsParams& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"k", p.k}, {"b", p.b}, {"gamma", p.gamma}};
}

DynamicsParams params_from(const json& j) {
    return {j.at("alpha").get<double>(), j.at("beta").get<double>(), j.at("k").get<double>(), j.at("b").get<double>(),
            j.at("gamma").get<double>()};
}

json exp_fit_json(const ExpFit& f) {
    return {{"amplitude", f.amplitude},         {"rate", f.rate},
            {"offset", f.offset},               {"r_squared", f.r_squared},
            {"residual_norm", f.residual_norm}, {"converged", f.converged},
            {"iterations", f.iterations},       {"status", to_string(f.status)}};
}

ExpFit exp_fit_from(const json& j) {
    ExpFit f;
    f.amplitude = j.at("amplitude").get<double>();
    f.rate = j.at("rate").get<double>();
    f.offset = j.at("offset").get<double>();
    f.r_squared = j.at("r_squared").get<double>();
    f.residual_norm = j.at("residual_norm").get<double>();
    f.converged = j.at("converged").get<bool>();
    f.iterations = j.at("iterations").get<int>();
    f.status = parse_fit_status(j.at("status").get<std::string>());
    return f;
}

json vector_json(const UncertaintyVector& u) { return {{"u_s", u.u_s}, {"u_v", u.u_v}}; }

UncertaintyVector vector_from(const json& j) {
    return {j.at("u_v").get<double>(), j.at("u_s").get<double>(), 1.0};
}

json outcome_json(const ScheduleOutcome& o) {
    json j = {{"name", o.name},
              {"eta", o.schedule.eta},
              {"exact", vector_json(o.exact)},
              {"approx", vector_json(o.approx)},
              {"discrepancy", o.discrepancy}};
    if (o.schedule.budget) j["budget"] = *o.schedule.budget;
    return j;
}

ScheduleOutcome outcome_from(const json& j) {
    ScheduleOutcome o;
    o.name = j.at("name").get<std::string>();
    o.schedule.eta = j.at("eta").get<std::vector<double>>();
    if (j.contains("budget")) o.schedule.budget = j.at("budget").get<long long>();
    o.exact = vector_from(j.at("exact"));
    o.approx = vector_from(j.at("approx"));
    o.discrepancy = j.at("discrepancy").get<double>();
    return o;
}

json to_document(const ReportDocument& r) {
    json doc = json::object();

    json input = {{"source", r.input.source}, {"label", r.input.label}, {"points", r.input.points}};
    input["params"] = r.input.params ? params_json(*r.input.params) : json(nullptr);
    input["initial"] = r.input.initial ? json{{"u_s0", r.input.initial->u_s0}, {"u_v0", r.input.initial->u_v0}}
                                       : json(nullptr);
    doc["input"] = std::move(input);

    if (r.fits) {
        const ChannelFits& f = *r.fits;
        json fits = json::object();
        fits["u_s"] = f.u_s ? exp_fit_json(*f.u_s) : json(nullptr);
        fits["u_v"] = f.u_v ? exp_fit_json(*f.u_v) : json(nullptr);
        fits["gap_linear"] = f.gap_linear ? json{{"slope", f.gap_linear->slope},
                                                 {"intercept", f.gap_linear->intercept},
                                                 {"r_squared", f.gap_linear->r_squared}}
                                          : json(nullptr);
        fits["notes"] = f.notes;
        doc["fits"] = std::move(fits);
    } else {
        doc["fits"] = nullptr;
    }

    if (r.recovered_params) {
        const RecoveredParams& p = *r.recovered_params;
        doc["recovered_params"] = {{"lambda", p.lambda},
                                   {"alpha_over_beta", p.alpha_over_beta ? json(*p.alpha_over_beta) : json(nullptr)},
                                   {"g_inf", p.g_inf},
                                   {"alpha", p.alpha},
                                   {"beta", p.beta},
                                   {"b", p.b},
                                   {"k", 1.0},
                                   {"identifiable", p.identifiable}};
    } else {
        doc["recovered_params"] = nullptr;
    }

    doc["limits"] = r.limits ? json{{"u_s_inf", r.limits->u_s_inf},
                                    {"u_v_inf", r.limits->u_v_inf},
                                    {"g_inf", r.limits->g_inf}}
                             : json(nullptr);
    doc["budget"] = r.budget ? json{{"epsilon", r.budget->epsilon},
                                    {"epochs", r.budget->epochs},
                                    {"whole_epochs", r.budget->whole_epochs}}
                             : json(nullptr);

    if (r.schedules) {
        json outcomes = json::array();
        for (const auto& o : r.schedules->outcomes) outcomes.push_back(outcome_json(o));
        doc["schedules"] = {{"outcomes", std::move(outcomes)},
                            {"baseline", outcome_json(r.schedules->baseline)},
                            {"spread", r.schedules->spread}};
    } else {
        doc["schedules"] = nullptr;
    }
    return doc;
}

ReportDocument from_document(const json& doc) {
    ReportDocument r;
    const json& in = doc.at("input");
    r.input.source = in.at("source").get<std::string>();
    r.input.label = in.at("label").get<std::string>();
    r.input.points = in.at("points").get<long long>();
    if (!in.at("params").is_null()) r.input.params = params_from(in.at("params"));
    if (!in.at("initial").is_null()) {
        r.input.initial = InitialState{in.at("initial").at("u_s0").get<double>(), in.at("initial").at("u_v0").get<double>()};
    }

    if (const json& f = doc.at("fits"); !f.is_null()) {
        ChannelFits fits;
        if (!f.at("u_s").is_null()) fits.u_s = exp_fit_from(f.at("u_s"));
        if (!f.at("u_v").is_null()) fits.u_v = exp_fit_from(f.at("u_v"));
        if (const json& g = f.at("gap_linear"); !g.is_null()) {
            fits.gap_linear = LinearFit{g.at("slope").get<double>(), g.at("intercept").get<double>(),
                                        g.at("r_squared").get<double>()};
        }
        fits.notes = f.at("notes").get<std::vector<std::string>>();
        r.fits = std::move(fits);
    }

    if (const json& p = doc.at("recovered_params"); !p.is_null()) {
        RecoveredParams rp;
        rp.lambda = p.at("lambda").get<double>();
        if (!p.at("alpha_over_beta").is_null()) rp.alpha_over_beta = p.at("alpha_over_beta").get<double>();
        rp.g_inf = p.at("g_inf").get<double>();
        rp.alpha = p.at("alpha").get<double>();
        rp.beta = p.at("beta").get<double>();
        rp.b = p.at("b").get<double>();
        rp.identifiable = p.at("identifiable").get<bool>();
        r.recovered_params = rp;
    }

    if (const json& l = doc.at("limits"); !l.is_null()) {
        r.limits = Limits{l.at("u_s_inf").get<double>(), l.at("u_v_inf").get<double>(), l.at("g_inf").get<double>()};
    }
    if (const json& b = doc.at("budget"); !b.is_null()) {
        r.budget = Budget{b.at("epsilon").get<double>(), b.at("epochs").get<double>(),
                          b.at("whole_epochs").get<long long>()};
    }
    if (const json& s = doc.at("schedules"); !s.is_null()) {
        ScheduleComparison cmp;
        for (const auto& o : s.at("outcomes")) cmp.outcomes.push_back(outcome_from(o));
        cmp.baseline = outcome_from(s.at("baseline"));
        cmp.spread = s.at("spread").get<double>();
        r.schedules = std::move(cmp);
    }
    return r;
}

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed2(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

std::string tick_label(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

struct Range {
    double lo;
    double hi;
};

// 5% padding each side; a zero-width range becomes a unit span around the value.
Range padded(double lo, double hi) {
    if (hi - lo <= 0.0) return {lo - 0.5, hi + 0.5};
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) {
        throw Error("format_error", "cannot format floating-point value");
    }
    return std::string(buf.data(), ptr);
}

Trajectory read_trajectory(std::istream& in, const std::string& source) {
    Trajectory traj;
    traj.label = source;
    std::string line;
    if (!std::getline(in, line) || line != "epoch,u_s,u_v") {
        throw Error("bad_header", location(source, 1) + ": expected header 'epoch,u_s,u_v'", source);
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_commas(line);
        std::array<double, 3> values{};
        for (std::size_t c = 0; c < 3; ++c) {
            if (c >= fields.size() || !parse_finite(fields[c], values[c])) {
                throw Error("unparseable_field", location(source, line_no, c + 1) + ": expected a finite decimal",
                            source);
            }
        }
        if (fields.size() > 3) {
            throw Error("unparseable_field", location(source, line_no, 4) + ": unexpected extra field", source);
        }
        if (!traj.points.empty() && !(values[0] > traj.points.back().t)) {
            throw Error("non_monotone_epoch",
                        location(source, line_no) + ": epoch " + std::string(fields[0]) +
                            " does not exceed the previous epoch",
                        source);
        }
        traj.points.push_back({values[0], values[1], values[2]});
    }
    return traj;
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    return read_trajectory(in, path.string());
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
    validate(trajectory);
    out << "epoch,u_s,u_v\n";
    for (const auto& p : trajectory.points) {
        out << format_double(p.t) << ',' << format_double(p.u_s) << ',' << format_double(p.u_v) << '\n';
    }
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory) {
    std::ofstream out = open_output(path);
    write_trajectory(out, trajectory);
    finish_output(out, path);
}

void write_step_records(const std::filesystem::path& path, std::span<const StepRecord> records) {
    std::ofstream out = open_output(path);
    out << "epoch,pre_cross_u_s,pre_cross_u_v,post_u_s,post_u_v,gap_c,energy\n";
    for (const auto& r : records) {
        out << r.t << ',' << format_double(r.pre_cross_u_s) << ',' << format_double(r.pre_cross_u_v) << ','
            << format_double(r.post_u_s) << ',' << format_double(r.post_u_v) << ',' << format_double(r.gap_c) << ','
            << format_double(r.energy) << '\n';
    }
    finish_output(out, path);
}

std::vector<CandidateSet> read_candidates(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line) || line != "prompt_id,nll,length,score") {
        throw Error("bad_header", location(source, 1) + ": expected header 'prompt_id,nll,length,score'", source);
    }
    std::vector<CandidateSet> sets;
    std::map<std::string, std::size_t> index;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_commas(line);
        if (fields.size() != 4 || fields[0].empty()) {
            throw Error("unparseable_field", location(source, line_no) + ": expected 4 fields", source);
        }
        Candidate c;
        if (!parse_finite(fields[1], c.nll)) {
            throw Error("unparseable_field", location(source, line_no, 2) + ": expected a finite decimal", source);
        }
        if (!parse_integer(fields[2], c.length)) {
            throw Error("unparseable_field", location(source, line_no, 3) + ": expected an integer", source);
        }
        if (!parse_finite(fields[3], c.score)) {
            throw Error("unparseable_field", location(source, line_no, 4) + ": expected a finite decimal", source);
        }
        const std::string id(fields[0]);
        auto [it, inserted] = index.try_emplace(id, sets.size());
        if (inserted) sets.push_back({id, {}});
        sets[it->second].candidates.push_back(c);
    }
    return sets;
}

std::vector<CandidateSet> read_candidates(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    return read_candidates(in, path.string());
}

std::vector<std::pair<std::string, double>> read_solver_nlls(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    const std::string source = path.string();
    std::string line;
    if (!std::getline(in, line) || line != "prompt_id,nll") {
        throw Error("bad_header", location(source, 1) + ": expected header 'prompt_id,nll'", source);
    }
    std::vector<std::pair<std::string, double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_commas(line);
        double nll = 0.0;
        if (fields.size() != 2 || fields[0].empty() || !parse_finite(fields[1], nll)) {
            throw Error("unparseable_field", location(source, line_no) + ": expected 'prompt_id,nll'", source);
        }
        rows.emplace_back(std::string(fields[0]), nll);
    }
    return rows;
}

CorrectnessMatrix read_correctness(std::istream& in, const std::string& source) {
    std::vector<std::vector<bool>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_commas(line);
        std::vector<bool> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (fields[c] == "1") {
                row.push_back(true);
            } else if (fields[c] == "0") {
                row.push_back(false);
            } else {
                throw Error("unparseable_field", location(source, line_no, c + 1) + ": expected 0 or 1", source);
            }
        }
        rows.push_back(std::move(row));
    }
    return CorrectnessMatrix(std::move(rows));
}

CorrectnessMatrix read_correctness(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    return read_correctness(in, path.string());
}

std::string render_report(const ReportDocument& report) {
    const json doc = to_document(report);
    check_finite(doc, "");
    return doc.dump(2) + "\n";
}

ReportDocument parse_report(const std::string& text) {
    try {
        return from_document(json::parse(text));
    } catch (const json::exception& e) {
        throw Error("bad_report", std::string("malformed report: ") + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out = open_output(path);
    out << text;
    finish_output(out, path);
}

void write_report(const ReportDocument& report, const std::filesystem::path& path) {
    write_text(path, render_report(report));
}

ReportDocument read_report(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_report(buf.str());
}

std::filesystem::path plot_points_path(const std::filesystem::path& svg_path) {
    return svg_path.parent_path() / (svg_path.stem().string() + ".points.csv");
}

void emit_plot(std::span<const PlotSeries> series, const std::filesystem::path& path, const PlotOptions& options) {
    if (series.empty()) {
        throw Error("empty_series", "nothing to plot");
    }
    double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
    for (const auto& s : series) {
        if (s.points.empty()) {
            throw Error("empty_series", "series '" + s.name + "' has no points");
        }
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                throw Error("non_finite_field", "series '" + s.name + "' has a non-finite point");
            }
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
    }
    const Range xr = padded(x_lo, x_hi);
    const Range yr = padded(y_lo, y_hi);

    constexpr double width = 720.0, height = 440.0;
    constexpr double left = 70.0, right = 170.0, top = 40.0, bottom = 50.0;
    constexpr double plot_w = width - left - right;
    constexpr double plot_h = height - top - bottom;
    const auto sx = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    const auto sy = [&](double y) { return top + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    static constexpr std::array<const char*, 8> palette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                           "#9467bd", "#8c564b", "#e377c2", "#17becf"};

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << fixed2(left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
            << xml_escape(options.title) << "</text>\n";
    }

    // Axes and ticks.
    svg << "<line class=\"axis\" x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top + plot_h) << "\" x2=\""
        << fixed2(left + plot_w) << "\" y2=\"" << fixed2(top + plot_h) << "\" stroke=\"black\"/>\n"
        << "<line class=\"axis\" x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top) << "\" x2=\"" << fixed2(left)
        << "\" y2=\"" << fixed2(top + plot_h) << "\" stroke=\"black\"/>\n";
    constexpr int ticks = 5;
    for (int i = 0; i < ticks; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / (ticks - 1);
        const double fy = yr.lo + (yr.hi - yr.lo) * i / (ticks - 1);
        svg << "<line x1=\"" << fixed2(sx(fx)) << "\" y1=\"" << fixed2(top + plot_h) << "\" x2=\"" << fixed2(sx(fx))
            << "\" y2=\"" << fixed2(top + plot_h + 5) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << fixed2(sx(fx)) << "\" y=\"" << fixed2(top + plot_h + 18)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(fx) << "</text>\n"
            << "<line x1=\"" << fixed2(left - 5) << "\" y1=\"" << fixed2(sy(fy)) << "\" x2=\"" << fixed2(left)
            << "\" y2=\"" << fixed2(sy(fy)) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << fixed2(left - 8) << "\" y=\"" << fixed2(sy(fy) + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(fy) << "</text>\n";
    }
    if (!options.x_label.empty()) {
        svg << "<text x=\"" << fixed2(left + plot_w / 2) << "\" y=\"" << fixed2(height - 10)
            << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(options.x_label) << "</text>\n";
    }
    if (!options.y_label.empty()) {
        svg << "<text x=\"16\" y=\"" << fixed2(top + plot_h / 2) << "\" text-anchor=\"middle\" font-size=\"12\" "
            << "transform=\"rotate(-90 16 " << fixed2(top + plot_h / 2) << ")\">" << xml_escape(options.y_label)
            << "</text>\n";
    }

    // Data layers.
    for (std::size_t i = 0; i < series.size(); ++i) {
        const PlotSeries& s = series[i];
        const char* color = palette[i % palette.size()];
        if (s.style == PlotStyle::line) {
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t p = 0; p < s.points.size(); ++p) {
                svg << (p ? " " : "") << fixed2(sx(s.points[p].first)) << ',' << fixed2(sy(s.points[p].second));
            }
            svg << "\"/>\n";
        } else {
            for (const auto& [x, y] : s.points) {
                svg << "<circle cx=\"" << fixed2(sx(x)) << "\" cy=\"" << fixed2(sy(y)) << "\" r=\"3\" fill=\"" << color
                    << "\"/>\n";
            }
        }
    }

    // Legend.
    const double legend_x = left + plot_w + 15;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = palette[i % palette.size()];
        const double y = top + 10 + 20.0 * static_cast<double>(i);
        if (series[i].style == PlotStyle::line) {
            svg << "<line x1=\"" << fixed2(legend_x) << "\" y1=\"" << fixed2(y) << "\" x2=\"" << fixed2(legend_x + 20)
                << "\" y2=\"" << fixed2(y) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        } else {
            svg << "<circle cx=\"" << fixed2(legend_x + 10) << "\" cy=\"" << fixed2(y) << "\" r=\"3\" fill=\"" << color
                << "\"/>\n";
        }
        svg << "<text x=\"" << fixed2(legend_x + 26) << "\" y=\"" << fixed2(y + 4) << "\" font-size=\"11\">"
            << xml_escape(series[i].name) << "</text>\n";
    }
    svg << "</svg>\n";
    write_text(path, svg.str());

    std::ostringstream csv;
    csv << "series,x,y\n";
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) csv << s.name << ',' << format_double(x) << ',' << format_double(y) << '\n';
    }
    write_text(plot_points_path(path), csv.str());
}

}  // namespace svgap
