#include "sdyn/scenario_config.hpp"

#include "sdyn/matrix_market.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>

namespace sdyn {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

double number_at(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required field");
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

Vec vec_at(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    Vec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(path, "expected an array of numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

Mat mat_at(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a 2-D array");
    const size_t rows = v.size();
    const size_t cols = v[0].is_array() ? v[0].size() : 0;
    Mat out(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (!v[i].is_array() || v[i].size() != cols)
            fail(path, "ragged or non-numeric 2-D array");
        for (size_t j = 0; j < cols; ++j) out(i, j) = v[i][j].get<double>();
    }
    return out;
}

SquareMat matrix_source(const json& v, const std::string& path,
                        const std::string& base_dir) {
    if (v.is_string()) {
        std::filesystem::path p = v.get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        return load_matrix_market(p.string());
    }
    if (v.is_array()) return SquareMat(mat_at(v, path));
    fail(path, "expected a Matrix Market path or an inline 2-D array");
}

Forcing parse_forcing(const json& f, const std::string& path, int n) {
    require_keys(f, path,
                 {"kind", "amplitude", "omega", "phase", "mu", "cutoff", "times",
                  "values", "interpolation_order", "derivative_mode"});
    if (!f.contains("kind")) fail(path + ".kind", "missing required field");
    const std::string kind = f["kind"].get<std::string>();

    Forcing out = Forcing::zero(n);
    if (kind == "zero") {
        // nothing further
    } else if (kind == "sinusoid-bank") {
        Vec amp = vec_at(f.at("amplitude"), path + ".amplitude");
        Vec omega = vec_at(f.at("omega"), path + ".omega");
        Vec phase;
        if (f.contains("phase")) phase = vec_at(f["phase"], path + ".phase");
        out = Forcing::sinusoid_bank(amp, omega, phase);
    } else if (kind == "square-wave-bank") {
        out = Forcing::square_wave_bank(vec_at(f.at("amplitude"), path + ".amplitude"),
                                        vec_at(f.at("omega"), path + ".omega"));
    } else if (kind == "pulse") {
        out = Forcing::pulse(vec_at(f.at("amplitude"), path + ".amplitude"),
                             number_at(f, path, "mu"), number_at(f, path, "cutoff"));
    } else if (kind == "sampled") {
        out = Forcing::sampled(
            vec_at(f.at("times"), path + ".times"),
            mat_at(f.at("values"), path + ".values"),
            f.contains("interpolation_order") ? f["interpolation_order"].get<int>() : 1);
    } else {
        fail(path + ".kind", "unknown forcing kind '" + kind + "'");
    }

    if (f.contains("derivative_mode")) {
        const std::string mode = f["derivative_mode"].get<std::string>();
        if (mode == "analytic")
            out = out.with_derivative_mode(DerivativeMode::analytic);
        else if (mode == "central-difference")
            out = out.with_derivative_mode(DerivativeMode::central_difference);
        else
            fail(path + ".derivative_mode", "expected 'analytic' or 'central-difference'");
    }
    if (out.dim() != n) fail(path, "forcing dimension does not match the system");
    return out;
}

Method parse_method_name(const std::string& name, const std::string& path) {
    if (name == "newmark") return Method::newmark;
    if (name == "generalized-alpha" || name == "generalized_alpha")
        return Method::generalized_alpha;
    if (name == "rk4") return Method::rk4;
    if (name == "explicit-euler" || name == "explicit_euler")
        return Method::explicit_euler;
    fail(path, "unknown method '" + name + "'");
}

}  // namespace

double parse_parameter(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return std::stod(s);
            return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
        } catch (const std::exception&) {
            fail(path, "cannot parse '" + s + "' as a number or rational");
        }
    }
    fail(path, "expected a number or a rational string like \"1/6\"");
}

ScenarioDocument parse_scenario(const json& doc, const std::string& base_dir) {
    require_keys(doc, "$",
                 {"system", "forcing", "initial_conditions", "methods", "compensation",
                  "run", "output", "assertions", "benchmark", "name"});

    // ---- system ----
    if (!doc.contains("system")) fail("$.system", "missing required field");
    const json& jsys = doc["system"];
    require_keys(jsys, "$.system",
                 {"builtin", "undamped", "matrices", "storage", "fe_dof"});

    std::optional<SecondOrderSystem> sys;
    if (jsys.contains("builtin")) {
        const std::string name = jsys["builtin"].get<std::string>();
        if (name == "paper-3dof") {
            const bool undamped = jsys.value("undamped", false);
            sys = paper_3dof(!undamped);
        } else if (name == "oscillator-1dof") {
            sys = oscillator_1dof();
        } else if (name == "fe-beam-synthetic") {
            sys = fe_beam_synthetic(jsys.value("fe_dof", 400));
        } else {
            fail("$.system.builtin", "unknown builtin system '" + name + "'");
        }
    } else if (jsys.contains("matrices")) {
        const json& jm = jsys["matrices"];
        require_keys(jm, "$.system.matrices", {"M", "C", "K"});
        if (!jm.contains("M") || !jm.contains("K"))
            fail("$.system.matrices", "M and K are required");
        SquareMat M = matrix_source(jm["M"], "$.system.matrices.M", base_dir);
        SquareMat K = matrix_source(jm["K"], "$.system.matrices.K", base_dir);
        SquareMat C = jm.contains("C")
                          ? matrix_source(jm["C"], "$.system.matrices.C", base_dir)
                          : SquareMat::zero(M.rows(), M.storage());
        const std::string storage = jsys.value("storage", "");
        if (storage == "dense") {
            M = SquareMat(M.to_dense());
            C = SquareMat(C.to_dense());
            K = SquareMat(K.to_dense());
        } else if (storage == "sparse") {
            M = SquareMat(SpMat(M.to_dense().sparseView()));
            C = SquareMat(SpMat(C.to_dense().sparseView()));
            K = SquareMat(SpMat(K.to_dense().sparseView()));
        } else if (!storage.empty()) {
            fail("$.system.storage", "expected 'dense' or 'sparse'");
        }

        if (!doc.contains("initial_conditions"))
            fail("$.initial_conditions", "missing required field");
        const json& jic = doc["initial_conditions"];
        require_keys(jic, "$.initial_conditions", {"q0", "v0"});
        Vec q0 = vec_at(jic.at("q0"), "$.initial_conditions.q0");
        Vec v0 = vec_at(jic.at("v0"), "$.initial_conditions.v0");

        Forcing f = doc.contains("forcing")
                        ? parse_forcing(doc["forcing"], "$.forcing", M.rows())
                        : Forcing::zero(M.rows());
        sys = SecondOrderSystem(std::move(M), std::move(C), std::move(K), std::move(f),
                                std::move(q0), std::move(v0));
    } else {
        fail("$.system", "needs either 'builtin' or 'matrices'");
    }

    // builtin overrides
    if (jsys.contains("builtin")) {
        if (doc.contains("forcing"))
            sys = sys->with_forcing(parse_forcing(doc["forcing"], "$.forcing", sys->dof()));
        if (doc.contains("initial_conditions")) {
            const json& jic = doc["initial_conditions"];
            require_keys(jic, "$.initial_conditions", {"q0", "v0"});
            sys = SecondOrderSystem(sys->mass(), sys->damping(), sys->stiffness(),
                                    sys->forcing(),
                                    vec_at(jic.at("q0"), "$.initial_conditions.q0"),
                                    vec_at(jic.at("v0"), "$.initial_conditions.v0"));
        }
    }

    // ---- methods ----
    if (!doc.contains("methods")) fail("$.methods", "missing required field");
    const json& jmethods = doc["methods"];
    if (!jmethods.is_array() || jmethods.empty())
        fail("$.methods", "expected a non-empty array");
    std::vector<MethodSpec> methods;
    for (size_t i = 0; i < jmethods.size(); ++i) {
        const std::string path = "$.methods[" + std::to_string(i) + "]";
        const json& jm = jmethods[i];
        require_keys(jm, path,
                     {"name", "gamma", "beta", "rho_inf", "compensated", "label"});
        if (!jm.contains("name")) fail(path + ".name", "missing required field");
        MethodSpec m;
        m.method = parse_method_name(jm["name"].get<std::string>(), path + ".name");
        if (jm.contains("gamma")) m.gamma = parse_parameter(jm["gamma"], path + ".gamma");
        if (jm.contains("beta")) m.beta = parse_parameter(jm["beta"], path + ".beta");
        if (jm.contains("rho_inf")) m.rho_inf = jm["rho_inf"].get<double>();
        if (m.method == Method::generalized_alpha && !m.rho_inf) m.rho_inf = 1.0;
        m.compensated = jm.value("compensated", false);
        m.label = jm.value("label", "");
        methods.push_back(std::move(m));
    }

    // ---- compensation ----
    ScenarioCompensation comp = ScenarioCompensation::none;
    if (doc.contains("compensation")) {
        const json& jc = doc["compensation"];
        require_keys(jc, "$.compensation", {"kind"});
        const std::string kind = jc.value("kind", "none");
        if (kind == "none")
            comp = ScenarioCompensation::none;
        else if (kind == "damping")
            comp = ScenarioCompensation::damping;
        else if (kind == "fourth-order")
            comp = ScenarioCompensation::fourth_order;
        else
            fail("$.compensation.kind", "expected none, damping or fourth-order");
    }

    // ---- run ----
    if (!doc.contains("run")) fail("$.run", "missing required field");
    const json& jrun = doc["run"];
    require_keys(jrun, "$.run", {"t_end", "t_eval", "dt", "dts", "halvings"});
    const double t_end = number_at(jrun, "$.run", "t_end");
    const double t_eval = jrun.contains("t_eval") ? number_at(jrun, "$.run", "t_eval")
                                                  : t_end;

    std::vector<double> dts;
    if (jrun.contains("dts")) {
        Vec v = vec_at(jrun["dts"], "$.run.dts");
        dts.assign(v.data(), v.data() + v.size());
    } else if (jrun.contains("dt")) {
        const double dt0 = number_at(jrun, "$.run", "dt");
        const int halvings = jrun.value("halvings", 0);
        if (halvings < 0) fail("$.run.halvings", "must be nonnegative");
        dts = Scenario::halving_schedule(dt0, halvings);
    } else {
        fail("$.run", "needs either 'dt' (with optional 'halvings') or 'dts'");
    }
    for (double dt : dts) {
        if (!(dt > 0.0)) fail("$.run", "dt values must be positive");
        try {
            step_count(dt, t_end);
        } catch (const IntegrationError& e) {
            fail("$.run", std::string(e.what()) + " (dt=" + std::to_string(dt) + ")");
        }
    }

    // ---- assertions / benchmark / output ----
    std::vector<SlopeAssertion> assertions;
    if (doc.contains("assertions")) {
        const json& ja = doc["assertions"];
        if (!ja.is_array()) fail("$.assertions", "expected an array");
        for (size_t i = 0; i < ja.size(); ++i) {
            const std::string path = "$.assertions[" + std::to_string(i) + "]";
            require_keys(ja[i], path, {"method", "variable", "min", "max"});
            SlopeAssertion a;
            a.label = ja[i].at("method").get<std::string>();
            a.variable = ja[i].at("variable").get<std::string>();
            if (a.variable != "q" && a.variable != "v")
                fail(path + ".variable", "expected 'q' or 'v'");
            a.min = number_at(ja[i], path, "min");
            a.max = number_at(ja[i], path, "max");
            assertions.push_back(std::move(a));
        }
    }

    double bench_target = 0.0;
    int bench_repeats = 5;
    if (doc.contains("benchmark")) {
        const json& jb = doc["benchmark"];
        require_keys(jb, "$.benchmark", {"error_target", "repeats"});
        if (jb.contains("error_target")) bench_target = jb["error_target"].get<double>();
        if (jb.contains("repeats")) bench_repeats = jb["repeats"].get<int>();
    }

    ScenarioDocument out{
        Scenario{doc.value("name", "scenario"), std::move(*sys), std::move(methods),
                 comp, t_end, t_eval, std::move(dts), bench_target, bench_repeats,
                 std::move(assertions)},
        "out",
        {"csv"}};

    if (doc.contains("output")) {
        const json& jo = doc["output"];
        require_keys(jo, "$.output", {"directory", "formats"});
        out.output_directory = jo.value("directory", "out");
        if (jo.contains("formats")) {
            out.output_formats.clear();
            for (const auto& f : jo["formats"]) {
                const std::string fmt = f.get<std::string>();
                if (fmt != "csv" && fmt != "svg")
                    fail("$.output.formats", "expected 'csv' or 'svg'");
                out.output_formats.push_back(fmt);
            }
        }
    }
    return out;
}

ScenarioDocument load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario config " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_scenario(doc, std::filesystem::path(path).parent_path().string());
}

}  // namespace sdyn
