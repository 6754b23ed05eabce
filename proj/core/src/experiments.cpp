#include "netlqr/experiments.hpp"

#include "netlqr/bounds.hpp"
#include "netlqr/lqr.hpp"
#include "netlqr/rng.hpp"
#include "netlqr/version.hpp"

#include "detail/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace netlqr {

using nlohmann::json;

void set_thread_count(int threads) { detail::set_thread_count(threads); }
int thread_count() { return detail::thread_count(); }

ExperimentConfig experiment_defaults(const std::string& kind) {
    ExperimentConfig c;
    c.kind = kind;
    if (kind == "fig1") {
        c.n = 50;
        c.rho_list = {0.9, 0.99, 1.0, 1.003, 1.005};
        c.m_list = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        c.graph = "path";
        c.trials = 1;
    } else if (kind == "fig2") {
        c.n = 100;
        c.m_list = {1, 5, 10, 30};
        c.graph = "both";
        c.trials = 1000;
    } else if (kind == "fig3") {
        c.n = 100;
        c.m_list = {1, 5, 10, 30};
        c.graph = "both";
        c.trials = 1000;
    } else if (kind == "fig4") {
        c.n = 100;
        c.m_list = {1, 10};
        c.graph = "path";
        c.trials = 1;
    } else {
        throw Error(Errc::invalid_argument, "unknown experiment kind: " + kind);
    }
    return c;
}

ExperimentConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::io, std::string("experiment config: invalid JSON: ") + e.what());
    }
    if (!doc.contains("kind")) throw Error(Errc::io, "experiment config: missing kind");
    ExperimentConfig c = experiment_defaults(doc.at("kind").get<std::string>());
    if (doc.contains("n")) c.n = doc.at("n").get<int>();
    if (doc.contains("rho_list")) c.rho_list = doc.at("rho_list").get<std::vector<double>>();
    if (doc.contains("graph")) c.graph = doc.at("graph").get<std::string>();
    if (doc.contains("p")) c.p = doc.at("p").get<double>();
    if (doc.contains("m_list")) c.m_list = doc.at("m_list").get<std::vector<int>>();
    if (doc.contains("trials")) c.trials = doc.at("trials").get<int>();
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("objective")) {
        c.objective = objective_from_string(doc.at("objective").get<std::string>());
    }
    return c;
}

std::string config_to_json(const ExperimentConfig& c) {
    json doc;
    doc["kind"] = c.kind;
    doc["n"] = c.n;
    doc["rho_list"] = c.rho_list;
    doc["graph"] = c.graph;
    doc["p"] = c.p;
    doc["m_list"] = c.m_list;
    doc["trials"] = c.trials;
    doc["seed"] = c.seed;
    doc["objective"] = to_string(c.objective);
    return doc.dump(2);
}

BoxStats summarize_box(const std::vector<double>& values) {
    if (values.empty()) throw Error(Errc::empty_input, "summarize_box: empty input");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, n - 1);
        const double frac = pos - static_cast<double>(lo);
        return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    };
    BoxStats box;
    box.min = sorted.front();
    box.q1 = quantile(0.25);
    box.q3 = quantile(0.75);
    box.max = sorted.back();
    box.count = static_cast<long>(n);
    double sum = 0.0;
    for (double v : sorted) sum += v;
    box.mean = sum / static_cast<double>(n);
    return box;
}

namespace {

const AreOptions kExperimentAre{1e-11, 50000, AreMethod::automatic};

void check_config(const ExperimentConfig& c) {
    if (c.n < 2) throw Error(Errc::invalid_argument, "experiment: n must be >= 2");
    if (c.trials < 1) throw Error(Errc::invalid_argument, "experiment: trials must be >= 1");
    for (int m : c.m_list) {
        if (m < 1 || m > c.n) {
            throw Error(Errc::invalid_argument, "experiment: m_list entries must lie in [1, n]");
        }
    }
    if (c.m_list.empty()) throw Error(Errc::invalid_argument, "experiment: m_list is empty");
}

/// m actuators spread evenly over the path: index floor((i+1/2) n/m).
ActuatorSet evenly_spaced(int n, int m) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i) {
        const int node = static_cast<int>((2LL * i + 1) * n / (2LL * m));
        if (idx.empty() || node > idx.back()) idx.push_back(node);
    }
    return ActuatorSet(std::move(idx));
}

NetworkSystem marginal_path(int n) {
    NetworkSystem base = build_path_system(n, 3.0);
    return base.with_dynamics(spectral_scale(base.A(), 1.0));
}

NetworkSystem marginal_er(int n, double p, std::uint64_t seed) {
    return build_er_system(n, p, seed, 1.0);
}

std::vector<std::string> graph_list(const ExperimentConfig& c) {
    if (c.graph == "both") return {"path", "er"};
    if (c.graph == "path" || c.graph == "er") return {c.graph};
    throw Error(Errc::invalid_argument, "experiment: graph must be path, er, or both");
}

NetworkSystem build_graph_system(const ExperimentConfig& c, const std::string& graph) {
    if (graph == "path") return marginal_path(c.n);
    return marginal_er(c.n, c.p, rng::derive_stream(c.seed, 0xE5ULL));
}

std::uint64_t chain(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return rng::derive_stream(rng::derive_stream(seed, a), b);
}
std::uint64_t chain(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c2) {
    return rng::derive_stream(chain(seed, a, b), c2);
}

ExperimentResult make_result(const ExperimentConfig& config) {
    ExperimentResult r;
    r.kind = config.kind;
    r.config = config;
    r.version = kVersion;
    return r;
}

struct ModeSet {
    std::vector<double> eigenvalues;   // descending |value|
    std::vector<Vector> eigenvectors;  // unit norm, largest-magnitude entry positive
};

ModeSet leading_modes(const Matrix& M, int count) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (M + M.transpose()));
    std::vector<int> order(static_cast<std::size_t>(M.rows()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ma = std::abs(solver.eigenvalues()[a]);
        const double mb = std::abs(solver.eigenvalues()[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });
    ModeSet modes;
    for (int r = 0; r < count && r < M.rows(); ++r) {
        const int i = order[static_cast<std::size_t>(r)];
        Vector v = solver.eigenvectors().col(i);
        v.normalize();
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0.0) v = -v;
        modes.eigenvalues.push_back(solver.eigenvalues()[i]);
        modes.eigenvectors.push_back(std::move(v));
    }
    return modes;
}

}  // namespace

ExperimentResult run_fig1(const ExperimentConfig& config) {
    check_config(config);
    if (config.graph != "path") {
        throw Error(Errc::invalid_argument, "fig1: graph must be path");
    }
    if (config.rho_list.empty()) {
        throw Error(Errc::invalid_argument, "fig1: rho_list is empty");
    }
    ExperimentResult result = make_result(config);

    struct CellOut {
        double trace = 0.0, lambda_max = 0.0, average = 0.0;
        std::string flag = "failed";
    };
    const std::size_t n_rho = config.rho_list.size();
    const std::size_t n_m = config.m_list.size();
    std::vector<CellOut> cells(n_rho * n_m);

    std::vector<NetworkSystem> systems;
    systems.reserve(n_rho);
    for (double rho : config.rho_list) systems.push_back(build_path_system(config.n, rho));

    detail::parallel_for(cells.size(), [&](std::size_t cell) {
        const std::size_t ri = cell / n_m;
        const std::size_t mi = cell % n_m;
        CellOut& out = cells[cell];
        try {
            const ActuatorSet S = evenly_spaced(config.n, config.m_list[mi]);
            const CostSolution sol = solve_are(systems[ri], S, kExperimentAre);
            const CostFunctionals f = cost_functionals(sol.P, systems[ri].X0());
            out.trace = f.trace;
            out.lambda_max = f.lambda_max;
            out.average = f.average;
            out.flag = sol.converged ? "ok" : "no_convergence";
        } catch (const Error&) {
            out.flag = "failed";
        }
    });

    Table curves;
    curves.name = "curves";
    curves.columns = {"rho", "m", "trace", "lambda_max", "average", "flag"};
    for (std::size_t ri = 0; ri < n_rho; ++ri) {
        for (std::size_t mi = 0; mi < n_m; ++mi) {
            const CellOut& out = cells[ri * n_m + mi];
            if (out.flag == "failed") result.any_failed = true;
            curves.rows.push_back({config.rho_list[ri],
                                   static_cast<std::int64_t>(config.m_list[mi]), out.trace,
                                   out.lambda_max, out.average, out.flag});
        }
    }
    result.tables.push_back(std::move(curves));
    return result;
}

ExperimentResult run_fig2(const ExperimentConfig& config) {
    check_config(config);
    ExperimentResult result = make_result(config);
    const std::vector<std::string> graphs = graph_list(config);

    Table box;
    box.name = "box";
    box.columns = {"graph", "m", "min", "q1", "mean", "q3", "max", "count", "infeasible"};
    Table trials_table;
    trials_table.name = "trials";
    trials_table.columns = {"graph", "m", "trial", "value", "feasible"};

    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const NetworkSystem sys = build_graph_system(config, graphs[gi]);
        for (std::size_t mi = 0; mi < config.m_list.size(); ++mi) {
            const int m = config.m_list[mi];
            const std::uint64_t stream = chain(config.seed, 0xF2ULL, gi, mi);
            const std::vector<RandomTrial> trials =
                random_subsets(sys, m, config.trials, stream, config.objective);

            std::vector<double> feasible;
            int infeasible = 0;
            for (std::size_t t = 0; t < trials.size(); ++t) {
                const RandomTrial& trial = trials[t];
                trials_table.rows.push_back({graphs[gi], static_cast<std::int64_t>(m),
                                             static_cast<std::int64_t>(t), trial.value,
                                             static_cast<std::int64_t>(trial.feasible ? 1 : 0)});
                if (trial.feasible) {
                    feasible.push_back(trial.value);
                } else {
                    ++infeasible;
                }
            }
            if (feasible.empty()) {
                result.any_failed = true;
                box.rows.push_back({graphs[gi], static_cast<std::int64_t>(m), 0.0, 0.0, 0.0, 0.0,
                                    0.0, static_cast<std::int64_t>(0),
                                    static_cast<std::int64_t>(infeasible)});
                continue;
            }
            const BoxStats stats = summarize_box(feasible);
            box.rows.push_back({graphs[gi], static_cast<std::int64_t>(m), stats.min, stats.q1,
                                stats.mean, stats.q3, stats.max,
                                static_cast<std::int64_t>(stats.count),
                                static_cast<std::int64_t>(infeasible)});
        }
    }
    result.tables.push_back(std::move(box));
    result.tables.push_back(std::move(trials_table));
    return result;
}

ExperimentResult run_fig3(const ExperimentConfig& config) {
    check_config(config);
    ExperimentResult result = make_result(config);
    const std::vector<std::string> graphs = graph_list(config);

    Table box;
    box.name = "box";
    box.columns = {"graph", "m", "selection", "min", "q1", "mean", "q3", "max", "count"};
    Table extremes;
    extremes.name = "extremes";
    extremes.columns = {"graph", "m", "selection", "subset", "lambda_min", "lambda_max"};

    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const NetworkSystem sys = build_graph_system(config, graphs[gi]);
        for (std::size_t mi = 0; mi < config.m_list.size(); ++mi) {
            const int m = config.m_list[mi];
            const SelectionResult picks[2] = {
                greedy_select(sys, m, config.objective, Direction::minimize),
                greedy_select(sys, m, config.objective, Direction::maximize)};
            const char* names[2] = {"greedy", "anti_greedy"};
            for (int sel = 0; sel < 2; ++sel) {
                const CostSolution sol = solve_are(sys, picks[sel].subset, kExperimentAre);
                if (!sol.converged) result.any_failed = true;
                Eigen::SelfAdjointEigenSolver<Matrix> eig(sol.P, Eigen::EigenvaluesOnly);
                const double lmin = eig.eigenvalues().minCoeff();
                const double lmax = eig.eigenvalues().maxCoeff();

                std::vector<double> costs(static_cast<std::size_t>(config.trials));
                detail::parallel_for(costs.size(), [&](std::size_t t) {
                    rng::Generator gen(
                        chain(config.seed, 0xF3ULL + gi, mi * 2 + static_cast<std::size_t>(sel), t));
                    Vector x0(sys.n());
                    for (Eigen::Index i = 0; i < x0.size(); ++i) x0[i] = gen.normal();
                    x0.normalize();
                    costs[t] = x0.dot(sol.P * x0);
                });

                const BoxStats stats = summarize_box(costs);
                box.rows.push_back({graphs[gi], static_cast<std::int64_t>(m),
                                    std::string(names[sel]), stats.min, stats.q1, stats.mean,
                                    stats.q3, stats.max, static_cast<std::int64_t>(stats.count)});
                extremes.rows.push_back({graphs[gi], static_cast<std::int64_t>(m),
                                         std::string(names[sel]), picks[sel].subset.to_string(),
                                         lmin, lmax});
            }
        }
    }
    result.tables.push_back(std::move(box));
    result.tables.push_back(std::move(extremes));
    return result;
}

ExperimentResult run_fig4(const ExperimentConfig& config) {
    check_config(config);
    if (config.graph != "path") {
        throw Error(Errc::invalid_argument, "fig4: graph must be path");
    }
    ExperimentResult result = make_result(config);
    const NetworkSystem sys = marginal_path(config.n);
    constexpr int kModes = 5;

    Table a_modes;
    a_modes.name = "a_modes";
    a_modes.columns = {"mode", "eigenvalue", "node", "value"};
    const ModeSet dyn = leading_modes(sys.A(), kModes);
    for (std::size_t r = 0; r < dyn.eigenvectors.size(); ++r) {
        for (int node = 0; node < sys.n(); ++node) {
            a_modes.rows.push_back({static_cast<std::int64_t>(r + 1), dyn.eigenvalues[r],
                                    static_cast<std::int64_t>(node), dyn.eigenvectors[r][node]});
        }
    }

    Table p_modes;
    p_modes.name = "p_modes";
    p_modes.columns = {"m", "selection", "mode", "eigenvalue", "node", "value"};
    Table summary;
    summary.name = "summary";
    summary.columns = {"m",           "subset_best",  "subset_worst", "lambda1_best",
                       "lambda1_worst", "ratio"};

    for (int m : config.m_list) {
        const SelectionResult best = greedy_select(sys, m, config.objective, Direction::minimize);
        const SelectionResult worst = greedy_select(sys, m, config.objective, Direction::maximize);
        const char* names[2] = {"best", "worst"};
        const SelectionResult* picks[2] = {&best, &worst};
        double lambda1[2] = {0.0, 0.0};
        for (int sel = 0; sel < 2; ++sel) {
            const CostSolution sol = solve_are(sys, picks[sel]->subset, kExperimentAre);
            if (!sol.converged) result.any_failed = true;
            const ModeSet modes = leading_modes(sol.P, kModes);
            lambda1[sel] = modes.eigenvalues.empty() ? 0.0 : modes.eigenvalues.front();
            for (std::size_t r = 0; r < modes.eigenvectors.size(); ++r) {
                for (int node = 0; node < sys.n(); ++node) {
                    p_modes.rows.push_back({static_cast<std::int64_t>(m), std::string(names[sel]),
                                            static_cast<std::int64_t>(r + 1),
                                            modes.eigenvalues[r], static_cast<std::int64_t>(node),
                                            modes.eigenvectors[r][node]});
                }
            }
        }
        summary.rows.push_back({static_cast<std::int64_t>(m), best.subset.to_string(),
                                worst.subset.to_string(), lambda1[0], lambda1[1],
                                lambda1[1] / lambda1[0]});
    }
    result.tables.push_back(std::move(a_modes));
    result.tables.push_back(std::move(p_modes));
    result.tables.push_back(std::move(summary));
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.kind == "fig1") return run_fig1(config);
    if (config.kind == "fig2") return run_fig2(config);
    if (config.kind == "fig3") return run_fig3(config);
    if (config.kind == "fig4") return run_fig4(config);
    throw Error(Errc::invalid_argument, "unknown experiment kind: " + config.kind);
}

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string format_cell(const Cell& cell) {
    char buffer[64];
    if (std::holds_alternative<std::int64_t>(cell)) {
        std::snprintf(buffer, sizeof buffer, "%lld",
                      static_cast<long long>(std::get<std::int64_t>(cell)));
        return buffer;
    }
    if (std::holds_alternative<double>(cell)) {
        std::snprintf(buffer, sizeof buffer, "%.17g", std::get<double>(cell));
        return buffer;
    }
    return csv_quote(std::get<std::string>(cell));
}

json cell_to_json(const Cell& cell) {
    if (std::holds_alternative<std::int64_t>(cell)) return std::get<std::int64_t>(cell);
    if (std::holds_alternative<double>(cell)) return std::get<double>(cell);
    return std::get<std::string>(cell);
}

}  // namespace

std::vector<std::string> emit(const ExperimentResult& result, EmitFormat format,
                              const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(Errc::io, "emit: cannot create directory " + out_dir + ": " + ec.message());

    std::vector<std::string> written;
    if (format == EmitFormat::csv) {
        for (const Table& table : result.tables) {
            const fs::path path = fs::path(out_dir) / (result.kind + "_" + table.name + ".csv");
            std::ofstream out(path);
            if (!out) throw Error(Errc::io, "emit: cannot write " + path.string());
            out << "# kind: " << result.kind << '\n';
            out << "# seed: " << result.config.seed << '\n';
            out << "# version: " << result.version << '\n';
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                if (c) out << ',';
                out << table.columns[c];
            }
            out << '\n';
            for (const auto& row : table.rows) {
                for (std::size_t c = 0; c < row.size(); ++c) {
                    if (c) out << ',';
                    out << format_cell(row[c]);
                }
                out << '\n';
            }
            written.push_back(path.string());
        }
        return written;
    }

    json doc;
    doc["kind"] = result.kind;
    doc["provenance"] = {{"seed", result.config.seed}, {"version", result.version}};
    doc["config"] = json::parse(config_to_json(result.config));
    doc["any_failed"] = result.any_failed;
    json tables = json::object();
    for (const Table& table : result.tables) {
        json rows = json::array();
        for (const auto& row : table.rows) {
            json jrow = json::array();
            for (const Cell& cell : row) jrow.push_back(cell_to_json(cell));
            rows.push_back(std::move(jrow));
        }
        tables[table.name] = {{"columns", table.columns}, {"rows", std::move(rows)}};
    }
    doc["tables"] = std::move(tables);
    const fs::path path = fs::path(out_dir) / (result.kind + ".json");
    std::ofstream out(path);
    if (!out) throw Error(Errc::io, "emit: cannot write " + path.string());
    out << doc.dump(2) << '\n';
    written.push_back(path.string());
    return written;
}

}  // namespace netlqr
