// Command-line driver: run scenarios, convergence studies, energy traces,
// benchmarks, and compensated/distorted matrix dumps.

#include "sdyn/bea.hpp"
#include "sdyn/compensation.hpp"
#include "sdyn/harness.hpp"
#include "sdyn/matrix_market.hpp"
#include "sdyn/output.hpp"
#include "sdyn/scenario_config.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace sdyn;

namespace {

struct CommonOpts {
    std::string config;
    std::string preset;
    std::string out_dir;
    std::string format;  // csv | svg | both
    bool ci = false;
};

ScenarioDocument resolve_scenario(const CommonOpts& opts) {
    if (!opts.preset.empty()) {
        ScenarioDocument doc{preset_scenario(opts.preset), "out", {"csv"}};
        return doc;
    }
    if (opts.config.empty())
        throw ConfigError("either --config or --preset is required");
    return load_scenario(opts.config);
}

fs::path ensure_out_dir(const ScenarioDocument& doc, const CommonOpts& opts) {
    std::string dir = opts.out_dir.empty() ? doc.output_directory : opts.out_dir;
    if (const char* env = std::getenv("SDYN_OUT_DIR"); env && opts.out_dir.empty())
        dir = env;
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

bool want(const ScenarioDocument& doc, const CommonOpts& opts, const std::string& fmt) {
    if (!opts.format.empty())
        return opts.format == fmt || opts.format == "both";
    for (const auto& f : doc.output_formats)
        if (f == fmt) return true;
    return false;
}

std::string sanitize(std::string s) {
    for (auto& c : s)
        if (c == '/' || c == ' ') c = '_';
    return s;
}

void write_manifest(const fs::path& dir, const nlohmann::json& extra) {
    nlohmann::json m = extra;
    const auto now = std::chrono::system_clock::now();
    m["written_unix_time"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    std::ofstream out(dir / "manifest.json");
    out << m.dump(2) << "\n";
}

int cmd_run(const CommonOpts& opts) {
    ScenarioDocument doc = resolve_scenario(opts);
    const fs::path dir = ensure_out_dir(doc, opts);
    auto results = run_scenario(doc.scenario);
    Trajectory ref = reference_solution(doc.scenario.system, doc.scenario.dts.front(),
                                        doc.scenario.t_end);
    std::vector<PlotSeries> series;
    for (const auto& r : results) {
        if (want(doc, opts, "csv")) {
            std::ofstream out(dir / (sanitize(r.label) + ".csv"));
            write_trajectory_csv(r.trajectory, doc.scenario.system, out);
        }
        PlotSeries ps{r.label, {}};
        for (const auto& s : r.trajectory.states) ps.points.emplace_back(s.t, s.q[0]);
        series.push_back(std::move(ps));
        std::cout << r.label << ": " << r.trajectory.steps() << " steps, "
                  << r.seconds << " s\n";
    }
    if (want(doc, opts, "csv")) {
        std::ofstream out(dir / "reference.csv");
        write_trajectory_csv(ref, doc.scenario.system, out);
    }
    {
        PlotSeries ps{"reference", {}};
        for (const auto& s : ref.states) ps.points.emplace_back(s.t, s.q[0]);
        series.push_back(std::move(ps));
    }
    if (want(doc, opts, "svg")) {
        std::ofstream out(dir / "trajectory.svg");
        write_svg_plot(series, doc.scenario.name + ": first position component", false,
                       false, out);
    }
    return 0;
}

int cmd_converge(const CommonOpts& opts) {
    ScenarioDocument doc = resolve_scenario(opts);
    const fs::path dir = ensure_out_dir(doc, opts);
    ConvergenceReport report = convergence_study(doc.scenario);
    if (want(doc, opts, "csv")) {
        std::ofstream out(dir / "report.csv");
        write_convergence_csv(report, out);
    }
    if (want(doc, opts, "svg")) {
        std::vector<PlotSeries> series;
        for (const auto& m : report.methods) {
            PlotSeries q{m.label + " (q)", {}};
            for (const auto& r : m.rows) q.points.emplace_back(r.dt, r.error_q);
            series.push_back(std::move(q));
        }
        std::ofstream out(dir / "convergence.svg");
        write_svg_plot(series, doc.scenario.name + ": error vs dt", true, true, out);
    }

    bool ok = true;
    for (const auto& m : report.methods)
        std::cout << m.label << ": slope_q " << m.slope_q << ", slope_v " << m.slope_v
                  << "\n";
    for (const auto& a : doc.scenario.assertions) {
        const auto& m = report.at(a.label);
        const double slope = a.variable == "q" ? m.slope_q : m.slope_v;
        const bool pass = slope >= a.min && slope <= a.max;
        ok = ok && pass;
        std::cout << (pass ? "pass" : "FAIL") << ": " << a.label << " " << a.variable
                  << "-slope " << slope << " in [" << a.min << ", " << a.max << "]\n";
    }
    if (!ok && opts.ci) return 1;
    return 0;
}

int cmd_energy(const CommonOpts& opts) {
    ScenarioDocument doc = resolve_scenario(opts);
    const fs::path dir = ensure_out_dir(doc, opts);
    auto results = run_scenario(doc.scenario);
    Trajectory ref = reference_solution(doc.scenario.system, doc.scenario.dts.front(),
                                        doc.scenario.t_end);
    std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> traces;
    for (const auto& r : results)
        traces.emplace_back(r.label, energy_trace(r.trajectory, doc.scenario.system));
    traces.emplace_back("reference", energy_trace(ref, doc.scenario.system));
    if (want(doc, opts, "csv")) {
        std::ofstream out(dir / "energy.csv");
        write_energy_csv(traces, out);
    }
    if (want(doc, opts, "svg")) {
        std::vector<PlotSeries> series;
        for (const auto& [label, trace] : traces) series.push_back({label, trace});
        std::ofstream out(dir / "energy.svg");
        write_svg_plot(series, doc.scenario.name + ": total energy", false, false, out);
    }
    for (const auto& [label, trace] : traces)
        std::cout << label << ": E(0) " << trace.front().second << ", E(end) "
                  << trace.back().second << "\n";
    return 0;
}

int cmd_bench(const CommonOpts& opts) {
    ScenarioDocument doc = resolve_scenario(opts);
    const fs::path dir = ensure_out_dir(doc, opts);
    auto rows = accuracy_runtime_benchmark(doc.scenario);
    if (want(doc, opts, "csv")) {
        std::ofstream out(dir / "bench.csv");
        write_bench_csv(rows, out);
    }
    for (const auto& r : rows)
        std::cout << r.label << " dt=" << r.dt << " steps=" << r.steps
                  << " error=" << r.error << " max_seconds=" << r.seconds << "\n";
    return 0;
}

int cmd_compensate(const CommonOpts& opts, const std::string& kind, double dt,
                   double gamma, double beta, int samples) {
    ScenarioDocument doc = resolve_scenario(opts);
    const fs::path dir = ensure_out_dir(doc, opts);
    const SecondOrderSystem& sys = doc.scenario.system;
    const double use_dt = dt > 0 ? dt : doc.scenario.dts.front();

    nlohmann::json manifest{{"kind", kind},
                            {"dt", use_dt},
                            {"gamma", gamma},
                            {"beta", beta},
                            {"note", "matrices are specific to this dt; do not reuse"}};

    std::function<Vec(double)> f_of_t;
    if (kind == "damping") {
        StepperConfig cfg;
        cfg.dt = use_dt; cfg.gamma = gamma; cfg.beta = beta;
        auto comp = damping_compensation(sys, cfg);
        save_matrix_market(comp.damping(), (dir / "C_hat.mtx").string());
        save_matrix_market(sys.stiffness(), (dir / "K_hat.mtx").string());
        f_of_t = [comp](double t) { return comp.base().forcing()(t); };
    } else if (kind == "fourth-order") {
        auto comp = fourth_order_compensation(sys, use_dt);
        save_matrix_market(comp.damping(), (dir / "C_hat.mtx").string());
        save_matrix_market(comp.stiffness(), (dir / "K_hat.mtx").string());
        f_of_t = [comp, use_dt](double t) {
            return compensated_forcing_eval(comp, t, use_dt);
        };
    } else if (kind == "distorted") {
        StepperConfig cfg;
        cfg.dt = use_dt; cfg.gamma = gamma; cfg.beta = beta;
        auto dist = distorted_system(sys, cfg);
        save_matrix_market(SquareMat(dist.damping()), (dir / "C_tilde.mtx").string());
        save_matrix_market(SquareMat(dist.stiffness()), (dir / "K_tilde.mtx").string());
        f_of_t = [dist](double t) { return dist.forcing(t); };
    } else {
        throw ConfigError("unknown --kind '" + kind + "'");
    }

    if (samples > 0) {
        std::ofstream out(dir / "forcing_samples.csv");
        out << "t";
        for (int i = 1; i <= sys.dof(); ++i) out << ",f_" << i;
        out << "\n";
        for (int k = 0; k <= samples; ++k) {
            const double t = k * use_dt;
            const Vec f = f_of_t(t);
            out << format_value(t);
            for (int i = 0; i < sys.dof(); ++i) out << "," << format_value(f[i]);
            out << "\n";
        }
    }
    write_manifest(dir, manifest);
    std::cout << "wrote " << kind << " matrices for dt=" << use_dt << " to " << dir
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sdyn: Newmark-family time integration with "
                 "backward-error-analysis compensation"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--config", opts.config, "scenario config (JSON)");
    app.add_option("--preset", opts.preset, "named built-in scenario");
    app.add_option("--out", opts.out_dir, "output directory");
    app.add_option("--format", opts.format, "csv | svg | both");
    app.add_flag("--ci", opts.ci, "turn slope assertions into exit-code failures");

    auto* run = app.add_subcommand("run", "integrate and dump trajectories");
    auto* converge = app.add_subcommand("converge", "convergence study");
    auto* energy = app.add_subcommand("energy", "energy traces");
    auto* bench = app.add_subcommand("bench", "accuracy vs runtime benchmark");
    auto* compensate =
        app.add_subcommand("compensate", "emit compensated matrices + manifest");
    auto* distort =
        app.add_subcommand("distort", "emit distorted matrices + forcing samples");
    auto* presets = app.add_subcommand("presets", "list built-in scenarios");

    std::string comp_kind = "fourth-order";
    double comp_dt = 0.0, comp_gamma = 0.5, comp_beta = 1.0 / 6.0;
    int comp_samples = 0;
    compensate->add_option("--kind", comp_kind, "damping | fourth-order");
    for (auto* cmd : {compensate, distort}) {
        cmd->add_option("--dt", comp_dt, "time step the matrices are built for");
        cmd->add_option("--gamma", comp_gamma, "Newmark gamma");
        cmd->add_option("--beta", comp_beta, "Newmark beta");
        cmd->add_option("--samples", comp_samples, "also dump N forcing samples");
    }

    if (argc <= 1) {
        std::cerr << app.help() << std::endl;
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::endl;
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(opts);
        if (converge->parsed()) return cmd_converge(opts);
        if (energy->parsed()) return cmd_energy(opts);
        if (bench->parsed()) return cmd_bench(opts);
        if (compensate->parsed())
            return cmd_compensate(opts, comp_kind, comp_dt, comp_gamma, comp_beta,
                                  comp_samples);
        if (distort->parsed())
            return cmd_compensate(opts, "distorted", comp_dt, comp_gamma, comp_beta,
                                  comp_samples);
        if (presets->parsed()) {
            for (const auto& p : list_presets()) std::cout << p << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 2;
}
