#include "sdyn/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace sdyn {

std::string format_value(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(const Trajectory& traj, const SecondOrderSystem& sys,
                          std::ostream& out) {
    const int n = sys.dof();
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",q_" << i;
    for (int i = 1; i <= n; ++i) out << ",v_" << i;
    for (int i = 1; i <= n; ++i) out << ",a_" << i;
    out << ",energy\n";
    for (const auto& s : traj.states) {
        out << format_value(s.t);
        for (int i = 0; i < n; ++i) out << "," << format_value(s.q[i]);
        for (int i = 0; i < n; ++i) out << "," << format_value(s.v[i]);
        for (int i = 0; i < n; ++i) out << "," << format_value(s.a[i]);
        out << "," << format_value(total_energy(sys, s.q, s.v)) << "\n";
    }
}

void write_convergence_csv(const ConvergenceReport& report, std::ostream& out) {
    out << "method,dt,error_q,error_v,floor\n";
    for (const auto& m : report.methods)
        for (const auto& r : m.rows)
            out << m.label << "," << format_value(r.dt) << "," << format_value(r.error_q)
                << "," << format_value(r.error_v) << "," << (r.floor ? 1 : 0) << "\n";
}

void write_energy_csv(
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>&
        traces,
    std::ostream& out) {
    out << "method,t,energy\n";
    for (const auto& [label, trace] : traces)
        for (const auto& [t, e] : trace)
            out << label << "," << format_value(t) << "," << format_value(e) << "\n";
}

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
    out << "method,dt,steps,error,max_seconds,per_step_seconds,build_seconds\n";
    for (const auto& r : rows)
        out << r.label << "," << format_value(r.dt) << "," << r.steps << ","
            << format_value(r.error) << "," << format_value(r.seconds) << ","
            << format_value(r.seconds / std::max<long>(1, r.steps)) << ","
            << format_value(r.build_seconds) << "\n";
}

namespace {

constexpr int kWidth = 860, kHeight = 520;
constexpr int kMarginL = 70, kMarginR = 170, kMarginT = 40, kMarginB = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

double transform(double v, bool log_axis) { return log_axis ? std::log10(v) : v; }

}  // namespace

void write_svg_plot(const std::vector<PlotSeries>& series, const std::string& title,
                    bool log_x, bool log_y, std::ostream& out) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if ((log_x && !(x > 0)) || (log_y && !(y > 0))) continue;
            xmin = std::min(xmin, transform(x, log_x));
            xmax = std::max(xmax, transform(x, log_x));
            ymin = std::min(ymin, transform(y, log_y));
            ymax = std::max(ymax, transform(y, log_y));
        }
    if (!(xmax > xmin)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymax > ymin)) { ymin -= 0.5; ymax += 0.5; }

    const auto sx = [&](double x) {
        return kMarginL + (transform(x, log_x) - xmin) / (xmax - xmin) *
                              (kWidth - kMarginL - kMarginR);
    };
    const auto sy = [&](double y) {
        return kHeight - kMarginB - (transform(y, log_y) - ymin) / (ymax - ymin) *
                                        (kHeight - kMarginT - kMarginB);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    // axes
    out << "<line x1=\"" << kMarginL << "\" y1=\"" << kHeight - kMarginB << "\" x2=\""
        << kWidth - kMarginR << "\" y2=\"" << kHeight - kMarginB
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT << "\" x2=\"" << kMarginL
        << "\" y2=\"" << kHeight - kMarginB << "\" stroke=\"black\"/>\n";

    int color = 0;
    int legend_y = kMarginT + 10;
    for (const auto& s : series) {
        const char* stroke = kPalette[color % 8];
        out << "<polyline fill=\"none\" stroke=\"" << stroke
            << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if ((log_x && !(x > 0)) || (log_y && !(y > 0))) continue;
            out << sx(x) << "," << sy(y) << " ";
        }
        out << "\"/>\n";
        out << "<text x=\"" << kWidth - kMarginR + 12 << "\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << stroke
            << "\">" << s.name << "</text>\n";
        legend_y += 18;
        ++color;
    }
    out << "</svg>\n";
}

}  // namespace sdyn
