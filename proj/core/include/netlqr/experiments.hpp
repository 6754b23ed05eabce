#pragma once

#include "netlqr/selection.hpp"
#include "netlqr/system.hpp"
#include "netlqr/types.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace netlqr {

/// Parameters for one experiment. Defaults per kind follow the reference
/// protocols (see experiment_defaults); JSON configs override field-wise.
struct ExperimentConfig {
    std::string kind;  // fig1 | fig2 | fig3 | fig4
    int n = 50;
    std::vector<double> rho_list;  // fig1 only
    std::string graph = "path";    // path | er | both
    double p = 0.1;                // ER edge probability
    std::vector<int> m_list;
    int trials = 1000;
    std::uint64_t seed = 0;
    Objective objective = Objective::trace;
};

ExperimentConfig experiment_defaults(const std::string& kind);
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

/// Five-number box summary plus the mean.
struct BoxStats {
    double min = 0.0, q1 = 0.0, mean = 0.0, q3 = 0.0, max = 0.0;
    long count = 0;
};

/// Quartiles by linear interpolation between order statistics at position
/// (n-1)*q (the R-7 rule), so the summary is bit-reproducible.
BoxStats summarize_box(const std::vector<double>& values);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct ExperimentResult {
    std::string kind;
    ExperimentConfig config;
    std::vector<Table> tables;
    std::string version;
    bool any_failed = false;  // some cell carries a solver failure flag
};

ExperimentResult run_fig1(const ExperimentConfig& config);
ExperimentResult run_fig2(const ExperimentConfig& config);
ExperimentResult run_fig3(const ExperimentConfig& config);
ExperimentResult run_fig4(const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

enum class EmitFormat { csv, json };

/// Writes the result under `out_dir`: CSV emits one file per table
/// (<kind>_<table>.csv with '#'-prefixed provenance lines), JSON emits a
/// single <kind>.json embedding all tables. Doubles are printed with 17
/// significant digits so a parse round-trip is exact. Returns the paths
/// written.
std::vector<std::string> emit(const ExperimentResult& result, EmitFormat format,
                              const std::string& out_dir);

/// Thread cap for experiment/selection fan-out (<= 0 restores the hardware
/// default). Results are independent of the setting.
void set_thread_count(int threads);
int thread_count();

}  // namespace netlqr
