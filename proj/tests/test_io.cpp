#include "svgap/error.hpp"
#include "svgap/io.hpp"

#include "temp_dir.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

using namespace svgap;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

Error read_error(const std::string& text) {
    std::istringstream in(text);
    try {
        read_trajectory(in, "mem");
    } catch (const Error& e) {
        return e;
    }
    FAIL("expected a parse error");
    return Error("none", "");
}

ReportDocument sample_report() {
    ReportDocument r;
    r.input = {"traj.csv", "unit", 11, DynamicsParams{2, 1, 1, 0.5, 0}, InitialState{3, 1}};
    ChannelFits fits;
    fits.u_s = ExpFit{3.0000000000000004, 0.1 + 0.2, 1e-17, 0.9999999999, 1e-9, true, 7, FitStatus::ok};
    fits.u_v = ExpFit{0.0, 0.0, 2.0, 0.0, 0.0, false, 0, FitStatus::degenerate_series};
    fits.gap_linear = LinearFit{-1.0, 0.5, 0.99};
    fits.notes = {"u_v: degenerate_series"};
    r.fits = fits;
    r.recovered_params = RecoveredParams{1.0, std::nullopt, 0.5, 1.0, 0.0, 0.5, true};
    r.limits = Limits{0.0, -0.5, 0.5};
    r.budget = Budget{0.015, std::log(100.0), 5};
    ScheduleComparison cmp;
    cmp.outcomes.push_back({"early", Schedule{{1.0, 0.0}, 40}, {0.1, 0.2, 1.0}, {0.11, 0.19, 1.0}, 0.01});
    cmp.baseline = {"self-improvement", Schedule{{0.0, 0.0}, {}}, {0.3, 0.4, 1.0}, {0.3, 0.4, 1.0}, 0.0};
    cmp.spread = 0.0;
    r.schedules = cmp;
    return r;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("reads a well-formed trajectory") {
    std::istringstream in("epoch,u_s,u_v\n0,3,1\n0.5,2.5,0.75\n1,2.1,-0.5e-1\n");
    const Trajectory t = read_trajectory(in, "mem");
    REQUIRE(t.points.size() == 3);
    CHECK(t.points[1] == TrajectoryPoint{0.5, 2.5, 0.75});
    CHECK(t.points[2].u_v == -0.05);
}

TEST_CASE("trajectory parse errors") {
    CHECK(read_error("t,us,uv\n0,1,0\n").code() == "bad_header");
    CHECK(read_error("").code() == "bad_header");
    CHECK(read_error("epoch,u_s,u_v\r\n0,1,0\n").code() == "bad_header");

    const Error order = read_error("epoch,u_s,u_v\n0,3,1\n2,2,1\n1,1,1\n");
    CHECK(order.code() == "non_monotone_epoch");
    CHECK(std::string(order.what()).find("line 4") != std::string::npos);

    const Error field = read_error("epoch,u_s,u_v\n0,3,1\n1,abc,1\n");
    CHECK(field.code() == "unparseable_field");
    CHECK(std::string(field.what()).find("line 3, column 2") != std::string::npos);

    CHECK(read_error("epoch,u_s,u_v\n0,3\n").code() == "unparseable_field");
    CHECK(read_error("epoch,u_s,u_v\n0,3,1,4\n").code() == "unparseable_field");
    CHECK(read_error("epoch,u_s,u_v\n0,inf,1\n").code() == "unparseable_field");
    CHECK(read_error("epoch,u_s,u_v\n0,nan,1\n").code() == "unparseable_field");
    CHECK(read_error("epoch,u_s,u_v\n0, 3,1\n").code() == "unparseable_field");
    CHECK(read_error("epoch,u_s,u_v\n0,3,1\n\n").code() == "unparseable_field");
}

TEST_CASE("reader accepts exactly the valid files") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> pick(0, 5);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + trial % 7;
        std::vector<TrajectoryPoint> pts;
        double t = u(rng);
        for (int i = 0; i < n; ++i) {
            pts.push_back({t, u(rng), u(rng)});
            t += 0.1 + std::abs(u(rng));
        }
        std::vector<std::string> t_text, s_text, v_text;
        for (const auto& p : pts) {
            t_text.push_back(format_double(p.t));
            s_text.push_back(format_double(p.u_s));
            v_text.push_back(format_double(p.u_v));
        }
        // Corrupt at most one thing; remember whether the file should be rejected.
        const int mutation = pick(rng);
        const std::size_t row = static_cast<std::size_t>(trial) % pts.size();
        bool valid = true;
        std::string header = "epoch,u_s,u_v";
        switch (mutation) {
            case 1: header = "epoch,u_v,u_s"; valid = false; break;
            case 2: s_text[row] = "x1"; valid = false; break;
            case 3:
                if (pts.size() > 1) {
                    t_text[1] = t_text[0];
                    valid = false;
                }
                break;
            case 4: v_text[row] = "1e999"; valid = false; break;
            default: break;
        }
        std::ostringstream os;
        os << header << '\n';
        for (std::size_t i = 0; i < pts.size(); ++i) os << t_text[i] << ',' << s_text[i] << ',' << v_text[i] << '\n';
        std::istringstream in(os.str());
        if (valid) {
            const Trajectory got = read_trajectory(in, "gen");
            CHECK(got.points == pts);
        } else {
            CHECK_THROWS_AS(read_trajectory(in, "gen"), Error);
        }
    }
}

TEST_CASE("trajectory write/read round trip") {
    TempDir dir("io");
    Trajectory t;
    t.points = {{0, 1.0 / 3.0, 0.1}, {0.5, 2e-300, -7.25}, {1, 1e300, 0}};
    write_trajectory(dir / "t.csv", t);
    CHECK(read_trajectory(dir / "t.csv").points == t.points);
    CHECK_THROWS_AS(read_trajectory(dir / "missing.csv"), Error);
}

TEST_CASE("reports round-trip exactly and canonically") {
    TempDir dir("report");
    const ReportDocument r = sample_report();
    write_report(r, dir / "a.json");
    write_report(r, dir / "b.json");
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    CHECK(read_report(dir / "a.json") == r);

    const std::string text = slurp(dir / "a.json");
    // Top-level keys appear in lexicographic order.
    const auto pos = [&](const std::string& k) { return text.find("\n  \"" + k + "\""); };
    CHECK(pos("budget") < pos("fits"));
    CHECK(pos("fits") < pos("input"));
    CHECK(pos("input") < pos("limits"));
    CHECK(pos("limits") < pos("recovered_params"));
    CHECK(pos("recovered_params") < pos("schedules"));

    ReportDocument sparse;
    sparse.input.source = "x";
    write_report(sparse, dir / "c.json");
    CHECK(read_report(dir / "c.json") == sparse);
}

TEST_CASE("non-finite report fields are rejected before writing") {
    TempDir dir("nan");
    ReportDocument r = sample_report();
    r.limits->g_inf = NAN;
    try {
        write_report(r, dir / "nan.json");
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.code() == "non_finite_field");
        CHECK(e.field() == "limits.g_inf");
    }
    CHECK_FALSE(std::filesystem::exists(dir / "nan.json"));
    CHECK_THROWS_AS(write_report(sample_report(), dir.path() / "no" / "such" / "dir.json"), Error);
}

TEST_CASE("plot with a single series") {
    TempDir dir("plot");
    PlotSeries s{"u_s", {}, PlotStyle::line};
    for (int i = 0; i <= 10; ++i) s.points.emplace_back(i, std::exp(-0.3 * i));
    const std::vector<PlotSeries> series{s};
    emit_plot(series, dir / "one.svg");
    const std::string svg = slurp(dir / "one.svg");
    CHECK(count(svg, "<polyline") == 1);
    CHECK(count(svg, "<circle") == 0);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("u_s") != std::string::npos);
    // 5% margin: first tick sits at -0.5 on the x axis.
    CHECK(svg.find(">-0.5<") != std::string::npos);
    const std::string csv = slurp(dir / "one.points.csv");
    CHECK(count(csv, "\n") == 12);
}

TEST_CASE("plot layers and degenerate ranges") {
    TempDir dir("plot2");
    const std::vector<PlotSeries> layered{{"observed", {{0, 1}, {1, 2}, {2, 3}}, PlotStyle::markers},
                                          {"fit", {{0, 1}, {2, 3}}, PlotStyle::line}};
    emit_plot(layered, dir / "two.svg");
    const std::string svg = slurp(dir / "two.svg");
    CHECK(count(svg, "<circle") == 4);  // three markers plus the legend swatch
    CHECK(count(svg, "<polyline") == 1);

    const std::vector<PlotSeries> single{{"p", {{2.0, 5.0}}, PlotStyle::markers}};
    emit_plot(single, dir / "pt.svg");
    const std::string pt = slurp(dir / "pt.svg");
    CHECK(pt.find(">1.5<") != std::string::npos);
    CHECK(pt.find(">2.5<") != std::string::npos);
    CHECK(pt.find(">4.5<") != std::string::npos);

    CHECK_THROWS_AS(emit_plot(std::vector<PlotSeries>{}, dir / "e.svg"), Error);
    CHECK_THROWS_AS(emit_plot(std::vector<PlotSeries>{{"empty", {}, PlotStyle::line}}, dir / "e.svg"), Error);
}

TEST_CASE("candidate and correctness files") {
    std::istringstream cand("prompt_id,nll,length,score\na,10,5,0.9\nb,1,1,1\na,2,10,0.3\n");
    const auto sets = read_candidates(cand, "mem");
    REQUIRE(sets.size() == 2);
    CHECK(sets[0].prompt_id == "a");
    CHECK(sets[0].candidates.size() == 2);
    CHECK(sets[0].candidates[1].length == 10);

    std::istringstream bad("prompt_id,nll,length,score\na,1,x,0.5\n");
    CHECK_THROWS_AS(read_candidates(bad, "mem"), Error);

    std::istringstream m("1,0,0\n0,0,0\n1,1,1\n");
    const CorrectnessMatrix cm = read_correctness(m, "mem");
    CHECK(cm.prompts() == 3);
    CHECK(cm.samples() == 3);
    std::istringstream bad_m("1,2\n");
    CHECK_THROWS_AS(read_correctness(bad_m, "mem"), Error);
}

}
