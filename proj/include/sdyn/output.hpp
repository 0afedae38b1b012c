#pragma once

/**
 * @file output.hpp
 * @brief CSV and SVG emission. Data files are deterministic byte streams:
 *        17-significant-digit values, no timestamps.
 */

#include "sdyn/harness.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sdyn {

/// Trajectory CSV with header `t,q_1..q_n,v_1..v_n,a_1..a_n,energy`; the
/// energy column uses the given (original) system's M and K.
void write_trajectory_csv(const Trajectory& traj, const SecondOrderSystem& sys,
                          std::ostream& out);

/// Convergence CSV: `method,dt,error_q,error_v,floor` rows.
void write_convergence_csv(const ConvergenceReport& report, std::ostream& out);

/// Energy CSV: `method,t,energy` rows for each labelled trace.
void write_energy_csv(
    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>&
        traces,
    std::ostream& out);

/// Benchmark CSV: `method,dt,steps,error,max_seconds,per_step_seconds,build_seconds`.
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

/// Standalone SVG line plot. Each series is a named polyline; axes are
/// linear or log10 per flag. Non-finite and (on log axes) nonpositive points
/// are dropped.
struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

void write_svg_plot(const std::vector<PlotSeries>& series, const std::string& title,
                    bool log_x, bool log_y, std::ostream& out);

std::string format_value(double x);  // %.17g

}  // namespace sdyn
