#include "ddweaver/report.hpp"

#include "ddweaver/error.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace ddweaver {

using nlohmann::json;

std::string sweep_csv(const std::vector<SweepResult>& results) {
    std::string out = "experiment,strategy,k,p0,stderr\n";
    for (const auto& r : results)
        for (std::size_t i = 0; i < r.ks.size(); ++i)
            out += fmt::format("{},{},{},{:.10f},{:.10f}\n", r.experiment, strategy_name(r.strategy), r.ks[i], r.p0[i],
                               r.std_error[i]);
    return out;
}

namespace {

json series_json(const SweepResult& r) {
    return json{
        {"experiment", r.experiment},
        {"strategy", strategy_name(r.strategy)},
        {"label", strategy_label(r.strategy)},
        {"k", r.ks},
        {"p0", r.p0},
        {"stderr", r.std_error},
        {"device", r.device},
        {"mapping", r.mapping.physical},
        {"toggles", render_toggles(r.toggles)},
        {"samples", r.samples},
        {"seed", r.seed},
    };
}

SweepResult series_from_json(const json& j) {
    SweepResult r;
    r.experiment = j.at("experiment").get<std::string>();
    auto s = parse_strategy(j.at("strategy").get<std::string>());
    if (!s)
        throw ParseError(0, "unknown strategy in results file");
    r.strategy = *s;
    r.ks = j.at("k").get<std::vector<std::size_t>>();
    r.p0 = j.at("p0").get<std::vector<double>>();
    r.std_error = j.at("stderr").get<std::vector<double>>();
    r.device = j.at("device").get<std::string>();
    r.mapping.physical = j.at("mapping").get<std::vector<std::size_t>>();
    r.toggles = parse_toggles(j.at("toggles").get<std::string>() == "none" ? "none"
                                                                            : "none," + j.at("toggles").get<std::string>());
    r.samples = j.at("samples").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (r.p0.size() != r.ks.size() || r.std_error.size() != r.ks.size())
        throw ParseError(0, "series lengths disagree in results file");
    return r;
}

} // namespace

std::string sweep_json(const std::vector<SweepResult>& results) {
    json arr = json::array();
    for (const auto& r : results)
        arr.push_back(series_json(r));
    return json{{"series", arr}}.dump(2) + "\n";
}

std::vector<SweepResult> sweep_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(0, e.what());
    }
    std::vector<SweepResult> out;
    try {
        for (const auto& s : j.at("series"))
            out.push_back(series_from_json(s));
    } catch (const json::exception& e) {
        throw ParseError(0, e.what());
    }
    return out;
}

std::string summary_table(const std::vector<SweepResult>& results) {
    std::string out = fmt::format("{:<14} {:<10} {:>10} {:>10}\n", "experiment", "strategy", "p0(k_max)", "mean p0");
    for (const auto& r : results) {
        if (r.p0.empty())
            continue;
        out += fmt::format("{:<14} {:<10} {:>10.4f} {:>10.4f}\n", r.experiment, strategy_label(r.strategy), r.p0.back(),
                           r.mean_p0());
    }
    return out;
}

std::string svg_plot(std::string_view title, const std::vector<SweepResult>& results) {
    constexpr double W = 640, H = 420, left = 60, right = 150, top = 40, bottom = 50;
    static constexpr std::string_view colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                  "#9467bd", "#8c564b", "#e377c2"};
    double kmin = 1e300, kmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& r : results)
        for (std::size_t i = 0; i < r.ks.size(); ++i) {
            kmin = std::min(kmin, double(r.ks[i]));
            kmax = std::max(kmax, double(r.ks[i]));
            ymin = std::min(ymin, r.p0[i]);
            ymax = std::max(ymax, r.p0[i]);
        }
    if (kmin > kmax) {
        kmin = 0, kmax = 1, ymin = 0, ymax = 1;
    }
    if (kmax == kmin)
        kmax = kmin + 1;
    const double pad = std::max((ymax - ymin) * 0.05, 1e-3);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double k) { return left + (k - kmin) / (kmax - kmin) * (W - left - right); };
    auto py = [&](double y) { return H - bottom - (y - ymin) / (ymax - ymin) * (H - top - bottom); };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        W, H);
    svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", W, H);
    svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                       (left + W - right) / 2, title);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", left, H - bottom,
                       W - right);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", left, top, H - bottom);
    for (int i = 0; i <= 4; ++i) {
        const double y = ymin + (ymax - ymin) * i / 4;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3f}</text>\n", left - 6, py(y) + 4, y);
        const double k = kmin + (kmax - kmin) * i / 4;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.0f}</text>\n", px(k),
                           H - bottom + 18, k);
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">repetitions k</text>\n",
                       (left + W - right) / 2, H - 12);
    svg += fmt::format("<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">P(|0&gt;)</text>\n",
                       (top + H - bottom) / 2, (top + H - bottom) / 2);

    for (std::size_t s = 0; s < results.size(); ++s) {
        const auto& r = results[s];
        const auto color = colors[s % std::size(colors)];
        std::string pts;
        for (std::size_t i = 0; i < r.ks.size(); ++i)
            pts += fmt::format("{}{:.1f},{:.1f}", pts.empty() ? "" : " ", px(double(r.ks[i])), py(r.p0[i]));
        svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, pts);
        for (std::size_t i = 0; i < r.ks.size(); ++i)
            svg += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", px(double(r.ks[i])),
                               py(r.p0[i]), color);
        const double ly = top + 10 + 18 * static_cast<double>(s);
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                           W - right + 10, ly, W - right + 30, color);
        svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", W - right + 36, ly + 4,
                           r.strategy == Strategy::Baseline && r.experiment.rfind("ramsey", 0) == 0
                               ? r.experiment
                               : std::string(strategy_label(r.strategy)));
    }
    svg += "</svg>\n";
    return svg;
}

std::string ramsey_summary(const RamseyReport& report) {
    static constexpr std::string_view what[] = {"q1=|0>", "q1=|1>", "q1=|0> + CNOT", "q1=|1> + CNOT"};
    std::string out = fmt::format("repetition time {} ns\n", report.rep_ns);
    out += fmt::format("{:<8} {:<15} {:>12} {:>10} {:>10}\n", "variant", "context", "f (cyc/rep)", "f (kHz)", "+/- kHz");
    for (std::size_t v = 0; v < 4; ++v)
        out += fmt::format("{:<8} {:<15} {:>12.6f} {:>10.3f} {:>10.3f}\n", v + 1, what[v], report.fits[v].frequency,
                           report.frequency_khz[v], report.frequency_stderr_khz[v]);
    out += fmt::format("ZZ shift |f2-f1| = {:.3f} kHz\n", report.zz_shift_khz);
    out += fmt::format("CR shift |f3-f1| = {:.3f} kHz\n", report.cr_shift_khz);
    return out;
}

std::string ramsey_json(const RamseyReport& report) {
    json fits = json::array();
    for (std::size_t v = 0; v < 4; ++v) {
        const auto& f = report.fits[v];
        fits.push_back(json{{"variant", v + 1},
                            {"frequency_cycles", f.frequency},
                            {"frequency_khz", report.frequency_khz[v]},
                            {"frequency_stderr_khz", report.frequency_stderr_khz[v]},
                            {"amplitude", f.amplitude},
                            {"decay", f.decay},
                            {"phase", f.phase},
                            {"offset", f.offset},
                            {"residual", f.residual},
                            {"converged", f.converged}});
    }
    json series = json::array();
    for (const auto& s : report.series)
        series.push_back(series_json(s));
    return json{{"rep_ns", report.rep_ns},
                {"zz_shift_khz", report.zz_shift_khz},
                {"cr_shift_khz", report.cr_shift_khz},
                {"fits", fits},
                {"series", series}}
               .dump(2) +
           "\n";
}

} // namespace ddweaver
