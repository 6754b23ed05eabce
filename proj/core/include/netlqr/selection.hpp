#pragma once

#include "netlqr/system.hpp"
#include "netlqr/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace netlqr {

enum class Objective { trace, lambda_max, average };
enum class Direction { minimize, maximize };

std::string to_string(Objective o);
Objective objective_from_string(const std::string& s);

/// Cost assigned to subsets that cannot stabilize the dynamics. Flagged,
/// never fed into bound comparisons.
inline constexpr double kInfeasibleCost = 1e300;

struct ObjectiveValue {
    double value = kInfeasibleCost;
    bool feasible = false;   // stabilizable
    bool converged = false;  // ARE solver converged
};

/// Infinite-horizon objective of a subset; infeasible subsets score the
/// sentinel instead of throwing.
ObjectiveValue evaluate_objective(const NetworkSystem& sys, const ActuatorSet& S, Objective obj);

struct SelectionResult {
    ActuatorSet subset;
    double objective_value = 0.0;
    Objective objective = Objective::trace;
    std::string method;
    /// Greedy methods: (chosen index, objective value) after each step.
    std::vector<std::pair<int, double>> trace_log;
    bool feasible = true;
    int infeasible_count = 0;  // exhaustive: subsets excluded as non-stabilizable
};

/// Incremental selection: starting from the empty set, adds at each step the
/// catalog index that best improves the objective in the given direction.
/// Ties break toward the lowest index. Non-stabilizable candidates score the
/// sentinel so stabilizing ones always win. Throws Errc::infeasible_at_k when
/// minimizing and the final subset is still non-stabilizable.
SelectionResult greedy_select(const NetworkSystem& sys, int k, Objective obj, Direction dir);

/// Exact best and worst over all stabilizable k-subsets in lexicographic
/// order (ties keep the earlier subset). Throws Errc::too_large above 1e6
/// subsets and Errc::all_infeasible when nothing is stabilizable.
std::pair<SelectionResult, SelectionResult> exhaustive_select(const NetworkSystem& sys, int k,
                                                              Objective obj);

struct RandomTrial {
    ActuatorSet subset;
    double value = 0.0;
    bool feasible = true;
};

/// `trials` uniform k-subsets, each drawn from its own stream derived from
/// (seed, trial index) so the list does not depend on evaluation order.
std::vector<RandomTrial> random_subsets(const NetworkSystem& sys, int k, int trials,
                                        std::uint64_t seed, Objective obj);

/// C(M, k) with saturation at 2^63-1.
std::uint64_t binomial(int M, int k);

}  // namespace netlqr
