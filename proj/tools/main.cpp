// netlqr command line: generate network systems, solve feedback-control
// costs, evaluate performance bounds, select actuator subsets, and run the
// seeded experiment suites.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "netlqr/bounds.hpp"
#include "netlqr/experiments.hpp"
#include "netlqr/gramian.hpp"
#include "netlqr/lqr.hpp"
#include "netlqr/selection.hpp"
#include "netlqr/system.hpp"
#include "netlqr/version.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using nlohmann::json;
using namespace netlqr;

void write_output(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream file(out);
    if (!file) throw Error(Errc::io, "cannot write output file: " + out);
    file << text;
    if (!text.empty() && text.back() != '\n') file << '\n';
}

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

ActuatorSet parse_actuators(const std::string& text, int catalog_size) {
    if (text == "all") return ActuatorSet::all(catalog_size);
    if (text == "none" || text.empty()) return ActuatorSet::none();
    std::vector<int> indices;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        indices.push_back(std::stoi(token));
    }
    return ActuatorSet::from_unsorted(std::move(indices));
}

json matrix_rowmajor(const Matrix& M) {
    json a = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) a.push_back(M(i, j));
    }
    return a;
}

int run_gen(const std::string& graph, int n, double rho, double p, std::uint64_t seed,
            std::optional<double> scale_to, const std::string& out) {
    NetworkSystem sys = [&] {
        if (graph == "path") {
            NetworkSystem base = build_path_system(n, rho);
            if (scale_to) return base.with_dynamics(spectral_scale(base.A(), *scale_to));
            return base;
        }
        if (graph == "er") return build_er_system(n, p, seed, scale_to);
        throw Error(Errc::invalid_argument, "gen: graph must be path or er");
    }();
    write_output(system_to_json(sys), out);
    return 0;
}

int run_cost(const std::string& system_path, const std::string& actuators,
             const std::string& horizon, double tol, long max_iter, const std::string& out,
             const std::string& format) {
    const NetworkSystem sys = load_system(system_path);
    const ActuatorSet S = parse_actuators(actuators, sys.catalog_size());

    CostSolution solution;
    if (horizon == "inf" || horizon == "infinite") {
        solution = solve_are(sys, S, tol, max_iter);
    } else {
        const int T = std::stoi(horizon);
        solution.P = riccati_recursion(sys, S, T).front();
        solution.horizon = T;
        solution.iterations = T;
        solution.converged = true;
        solution.method = "recursion";
    }
    const CostFunctionals f = cost_functionals(solution.P, sys.X0());

    if (format == "json") {
        json doc;
        doc["n"] = sys.n();
        doc["horizon"] = solution.horizon ? json(*solution.horizon) : json("infinite");
        doc["actuators"] = S.indices();
        doc["P"] = matrix_rowmajor(solution.P);
        doc["functionals"] = {{"lambda_max", f.lambda_max},
                              {"trace", f.trace},
                              {"average", f.average}};
        doc["diagnostics"] = {{"iterations", solution.iterations},
                              {"residual", solution.residual},
                              {"converged", solution.converged},
                              {"method", solution.method}};
        write_output(doc.dump(2), out);
    } else {
        std::ostringstream csv;
        csv << "lambda_max,trace,average,iterations,residual,converged,method\n";
        csv << format_double(f.lambda_max) << ',' << format_double(f.trace) << ','
            << format_double(f.average) << ',' << solution.iterations << ','
            << format_double(solution.residual) << ',' << (solution.converged ? 1 : 0) << ','
            << solution.method << '\n';
        write_output(csv.str(), out);
    }
    return solution.converged ? 0 : 2;
}

json unstable_report_json(const UnstableBoundReport& report) {
    json per_eta = json::array();
    for (const auto& c : report.per_eta) {
        per_eta.push_back({{"eta", c.eta}, {"n_bar", c.n_bar}, {"bound", c.bound}});
    }
    return {{"bound", report.bound},
            {"eta", report.eta},
            {"n_bar", report.n_bar},
            {"cond_V", report.cond_V},
            {"k", report.k},
            {"lambda_max_magnitude", report.lambda_max_magnitude},
            {"detectable", report.detectable},
            {"per_eta", std::move(per_eta)}};
}

int run_bound(const std::string& system_path, int k, const std::string& which,
              const std::string& out, const std::string& format) {
    const NetworkSystem sys = load_system(system_path);
    const SystemDiagnostics diag = validate_system(sys, ActuatorSet::none());

    json doc;
    doc["k"] = k;
    doc["hypotheses"] = {{"spectral_radius", diag.spectral_radius},
                         {"schur_stable", diag.schur_stable},
                         {"diagonalizable", diag.diagonalizable},
                         {"detectable", diag.detectable},
                         {"dynamics_invertible", diag.dynamics_invertible},
                         {"cond_V", diag.cond_V}};

    auto attempt = [&](const std::string& name, auto&& fn) {
        if (which != "all" && which != name) return;
        try {
            doc[name] = fn();
        } catch (const Error& e) {
            doc[name] = {{"error", e.what()}};
        }
    };
    attempt("unstable", [&] {
        const UnstableBoundReport report = unstable_lower_bound(sys, k);
        json j = unstable_report_json(report);
        // dual diagnostic: the ceiling on the smallest eigenvalue of the
        // inverse-dynamics Gramian at mu = 1/eta, the quantity the cost
        // floor is built from
        try {
            const GramianEigBound g = gramian_min_eig_bound(sys, k, 1.0 / report.eta);
            j["gramian"] = {{"min_eig_bound", g.bound},
                            {"mu", g.mu},
                            {"n_bar", g.n_bar},
                            {"cond_V", g.cond_V}};
        } catch (const Error& e) {
            j["gramian"] = {{"error", e.what()}};
        }
        return j;
    });
    attempt("symmetric", [&] { return unstable_report_json(symmetric_unstable_bound(sys, k)); });
    attempt("stable", [&] {
        const StableBoundReport report = stable_ratio_bound(sys, k);
        json j = {{"alpha", report.alpha},
                  {"sigma1_D", report.sigma1_D},
                  {"lambda1_max", report.lambda1_max},
                  {"lambda1_max_exact", report.lambda1_max_exact},
                  {"bound", report.bound},
                  {"k", report.k}};
        if (report.simple_bound) j["simple_bound"] = *report.simple_bound;
        return j;
    });

    if (format == "json") {
        write_output(doc.dump(2), out);
    } else {
        std::ostringstream csv;
        csv << "which,bound,eta,n_bar,cond_V,alpha,sigma1_D,lambda1_max,simple_bound,detectable,"
               "error\n";
        for (const char* name : {"unstable", "symmetric", "stable"}) {
            if (!doc.contains(name)) continue;
            const json& j = doc[name];
            auto field = [&](const char* key) {
                return j.contains(key) ? format_double(j[key].get<double>()) : std::string();
            };
            csv << name << ',' << field("bound") << ',' << field("eta") << ','
                << (j.contains("n_bar") ? std::to_string(j["n_bar"].get<int>()) : std::string())
                << ',' << field("cond_V") << ',' << field("alpha") << ',' << field("sigma1_D")
                << ',' << field("lambda1_max") << ',' << field("simple_bound") << ','
                << (j.contains("detectable") ? (j["detectable"].get<bool>() ? "1" : "0")
                                             : std::string())
                << ','
                << (j.contains("error") ? j["error"].get<std::string>() : std::string()) << '\n';
        }
        write_output(csv.str(), out);
    }
    return 0;
}

int run_select(const std::string& system_path, int k, const std::string& method,
               const std::string& objective, int trials, std::uint64_t seed,
               const std::string& out, const std::string& format) {
    const NetworkSystem sys = load_system(system_path);
    const Objective obj = objective_from_string(objective);

    json doc;
    doc["k"] = k;
    doc["objective"] = to_string(obj);
    doc["method"] = method;
    std::ostringstream csv;

    if (method == "greedy" || method == "antigreedy") {
        const Direction dir =
            method == "greedy" ? Direction::minimize : Direction::maximize;
        const SelectionResult r = greedy_select(sys, k, obj, dir);
        doc["subset"] = r.subset.indices();
        doc["value"] = r.objective_value;
        doc["feasible"] = r.feasible;
        json log = json::array();
        for (const auto& [index, value] : r.trace_log) {
            log.push_back({{"chosen", index}, {"value", value}});
        }
        doc["trace_log"] = std::move(log);
        csv << "step,chosen,value\n";
        for (std::size_t i = 0; i < r.trace_log.size(); ++i) {
            csv << (i + 1) << ',' << r.trace_log[i].first << ','
                << format_double(r.trace_log[i].second) << '\n';
        }
    } else if (method == "exhaustive") {
        const auto [best, worst] = exhaustive_select(sys, k, obj);
        doc["best"] = {{"subset", best.subset.indices()}, {"value", best.objective_value}};
        doc["worst"] = {{"subset", worst.subset.indices()}, {"value", worst.objective_value}};
        doc["infeasible_count"] = best.infeasible_count;
        csv << "which,subset,value\n";
        csv << "best,\"" << best.subset.to_string() << "\"," << format_double(best.objective_value)
            << '\n';
        csv << "worst,\"" << worst.subset.to_string() << "\","
            << format_double(worst.objective_value) << '\n';
    } else if (method == "random") {
        const std::vector<RandomTrial> list = random_subsets(sys, k, trials, seed, obj);
        doc["seed"] = seed;
        json jt = json::array();
        csv << "trial,subset,value,feasible\n";
        for (std::size_t i = 0; i < list.size(); ++i) {
            jt.push_back({{"subset", list[i].subset.indices()},
                          {"value", list[i].value},
                          {"feasible", list[i].feasible}});
            csv << i << ",\"" << list[i].subset.to_string() << "\","
                << format_double(list[i].value) << ',' << (list[i].feasible ? 1 : 0) << '\n';
        }
        doc["trials"] = std::move(jt);
    } else {
        throw Error(Errc::invalid_argument, "select: unknown method " + method);
    }

    write_output(format == "json" ? doc.dump(2) : csv.str(), out);
    return 0;
}

int run_experiment_cmd(const std::string& kind, const std::string& config_path,
                       std::optional<std::uint64_t> seed, const std::string& out_dir,
                       const std::string& format) {
    ExperimentConfig config = experiment_defaults(kind);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw Error(Errc::io, "cannot open config file: " + config_path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        config = config_from_json(buffer.str());
        if (config.kind != kind) {
            throw Error(Errc::invalid_argument,
                        "config kind '" + config.kind + "' does not match subcommand '" + kind + "'");
        }
    }
    if (seed) config.seed = *seed;

    const ExperimentResult result = run_experiment(config);
    const auto files =
        emit(result, format == "json" ? EmitFormat::json : EmitFormat::csv, out_dir);
    for (const auto& file : files) std::cout << file << '\n';
    return result.any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feedback-control cost and performance-bound toolbox for linear dynamical "
                 "networks"};
    app.set_version_flag("--version", netlqr::kVersion);
    app.require_subcommand(1);

    // gen
    std::string gen_graph = "path", gen_out;
    int gen_n = 10;
    double gen_rho = 1.0, gen_p = 0.1;
    std::uint64_t gen_seed = 0;
    double gen_scale_to = 0.0;
    auto* gen = app.add_subcommand("gen", "Generate a network system file");
    gen->add_option("--graph", gen_graph, "path or er")->required();
    gen->add_option("--n", gen_n, "node count")->required();
    gen->add_option("--rho", gen_rho, "path coupling parameter");
    gen->add_option("--p", gen_p, "ER edge probability");
    gen->add_option("--seed", gen_seed, "ER sampling seed");
    gen->add_option("--scale-to", gen_scale_to, "rescale spectral radius to this value");
    gen->add_option("--out", gen_out, "output file (stdout if omitted)");

    // cost
    std::string cost_system, cost_actuators = "all", cost_horizon = "inf", cost_out,
                cost_format = "json";
    double cost_tol = 1e-11;
    long cost_max_iter = 1000000;
    auto* cost = app.add_subcommand("cost", "Solve the optimal feedback-control cost");
    cost->add_option("--system", cost_system, "system file")->required();
    cost->add_option("--actuators", cost_actuators, "comma list | all | none");
    cost->add_option("--horizon", cost_horizon, "integer or inf");
    cost->add_option("--tol", cost_tol, "relative residual tolerance");
    cost->add_option("--max-iter", cost_max_iter, "iteration cap");
    cost->add_option("--out", cost_out, "output file (stdout if omitted)");
    cost->add_option("--format", cost_format, "csv or json");

    // bound
    std::string bound_system, bound_which = "all", bound_out, bound_format = "json";
    int bound_k = 1;
    auto* bound = app.add_subcommand("bound", "Evaluate performance bounds");
    bound->add_option("--system", bound_system, "system file")->required();
    bound->add_option("--k", bound_k, "subset size")->required();
    bound->add_option("--which", bound_which, "unstable | symmetric | stable | all");
    bound->add_option("--out", bound_out, "output file (stdout if omitted)");
    bound->add_option("--format", bound_format, "csv or json");

    // select
    std::string sel_system, sel_method = "greedy", sel_objective = "trace", sel_out,
                sel_format = "json";
    int sel_k = 1, sel_trials = 100;
    std::uint64_t sel_seed = 0;
    auto* select = app.add_subcommand("select", "Actuator subset selection");
    select->add_option("--system", sel_system, "system file")->required();
    select->add_option("--k", sel_k, "subset size")->required();
    select->add_option("--method", sel_method, "greedy | antigreedy | exhaustive | random");
    select->add_option("--objective", sel_objective, "trace | lmax | avg");
    select->add_option("--trials", sel_trials, "random method trial count");
    select->add_option("--seed", sel_seed, "random method seed");
    select->add_option("--out", sel_out, "output file (stdout if omitted)");
    select->add_option("--format", sel_format, "csv or json");

    // experiment
    std::string exp_kind, exp_config, exp_out = ".", exp_format = "csv";
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false;
    auto* experiment = app.add_subcommand("experiment", "Run a seeded experiment suite");
    experiment->add_option("kind", exp_kind, "fig1 | fig2 | fig3 | fig4")->required();
    experiment->add_option("--config", exp_config, "JSON config file");
    experiment->add_option("--seed", exp_seed, "master seed override")
        ->each([&](const std::string&) { exp_seed_set = true; });
    experiment->add_option("--out", exp_out, "output directory");
    experiment->add_option("--format", exp_format, "csv or json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            std::optional<double> scale;
            if (gen->count("--scale-to")) scale = gen_scale_to;
            return run_gen(gen_graph, gen_n, gen_rho, gen_p, gen_seed, scale, gen_out);
        }
        if (cost->parsed()) {
            return run_cost(cost_system, cost_actuators, cost_horizon, cost_tol, cost_max_iter,
                            cost_out, cost_format);
        }
        if (bound->parsed()) {
            return run_bound(bound_system, bound_k, bound_which, bound_out, bound_format);
        }
        if (select->parsed()) {
            return run_select(sel_system, sel_k, sel_method, sel_objective, sel_trials, sel_seed,
                              sel_out, sel_format);
        }
        if (experiment->parsed()) {
            std::optional<std::uint64_t> seed;
            if (exp_seed_set) seed = exp_seed;
            return run_experiment_cmd(exp_kind, exp_config, seed, exp_out, exp_format);
        }
    } catch (const netlqr::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
