#include "netlqr/selection.hpp"

#include "netlqr/lqr.hpp"
#include "netlqr/rng.hpp"

#include "detail/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace netlqr {

std::string to_string(Objective o) {
    switch (o) {
        case Objective::trace: return "trace";
        case Objective::lambda_max: return "lambda_max";
        case Objective::average: return "average";
    }
    return "trace";
}

Objective objective_from_string(const std::string& s) {
    if (s == "trace") return Objective::trace;
    if (s == "lambda_max" || s == "lmax") return Objective::lambda_max;
    if (s == "average" || s == "avg") return Objective::average;
    throw Error(Errc::invalid_argument, "unknown objective: " + s);
}

ObjectiveValue evaluate_objective(const NetworkSystem& sys, const ActuatorSet& S, Objective obj) {
    ObjectiveValue out;
    CostSolution solution;
    try {
        solution = solve_are(sys, S);
    } catch (const Error& e) {
        if (e.code() == Errc::not_stabilizable) return out;  // sentinel, flagged
        throw;
    }
    out.feasible = true;
    out.converged = solution.converged;
    const CostFunctionals f = cost_functionals(solution.P, sys.X0());
    switch (obj) {
        case Objective::trace: out.value = f.trace; break;
        case Objective::lambda_max: out.value = f.lambda_max; break;
        case Objective::average: out.value = f.average; break;
    }
    return out;
}

SelectionResult greedy_select(const NetworkSystem& sys, int k, Objective obj, Direction dir) {
    const int M = sys.catalog_size();
    if (k < 1 || k > M) throw Error(Errc::invalid_argument, "greedy_select: k out of range");

    const bool minimize = dir == Direction::minimize;
    SelectionResult result;
    result.objective = obj;
    result.method = minimize ? "greedy" : "anti_greedy";

    std::vector<int> chosen;
    std::vector<char> used(static_cast<std::size_t>(M), 0);
    ObjectiveValue final_value;

    for (int step = 0; step < k; ++step) {
        std::vector<int> candidates;
        for (int j = 0; j < M; ++j) {
            if (!used[static_cast<std::size_t>(j)]) candidates.push_back(j);
        }
        std::vector<ObjectiveValue> scores(candidates.size());
        detail::parallel_for(candidates.size(), [&](std::size_t i) {
            std::vector<int> trial = chosen;
            trial.push_back(candidates[i]);
            std::sort(trial.begin(), trial.end());
            scores[i] = evaluate_objective(sys, ActuatorSet(std::move(trial)), obj);
        });

        // Infeasible candidates carry the sentinel, so any stabilizing
        // candidate wins in the minimize direction; for maximize they are
        // pushed to the bottom instead. Ties keep the lowest index.
        int best_index = -1;
        double best_score = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const double score =
                minimize ? scores[i].value
                         : (scores[i].feasible ? scores[i].value : -kInfeasibleCost);
            if (best_index < 0 || (minimize ? score < best_score : score > best_score)) {
                best_index = static_cast<int>(i);
                best_score = score;
            }
        }
        const int pick = candidates[static_cast<std::size_t>(best_index)];
        used[static_cast<std::size_t>(pick)] = 1;
        chosen.push_back(pick);
        final_value = scores[static_cast<std::size_t>(best_index)];
        result.trace_log.emplace_back(pick, final_value.feasible ? final_value.value
                                                                 : kInfeasibleCost);
    }

    std::sort(chosen.begin(), chosen.end());
    result.subset = ActuatorSet(std::move(chosen));
    result.feasible = final_value.feasible;
    result.objective_value = final_value.feasible ? final_value.value : kInfeasibleCost;
    if (!final_value.feasible && minimize) {
        throw Error(Errc::infeasible_at_k,
                    "greedy_select: no stabilizable subset reachable at k=" + std::to_string(k));
    }
    return result;
}

std::uint64_t binomial(int M, int k) {
    if (k < 0 || k > M) return 0;
    k = std::min(k, M - k);
    long double value = 1.0L;
    for (int i = 1; i <= k; ++i) {
        value = value * static_cast<long double>(M - k + i) / static_cast<long double>(i);
        if (value > 9.2e18L) return std::numeric_limits<std::uint64_t>::max() / 2;
    }
    return static_cast<std::uint64_t>(value + 0.5L);
}

namespace {

// Lexicographically next k-combination; false once exhausted.
bool next_combination(std::vector<int>& idx, int M) {
    const int k = static_cast<int>(idx.size());
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == M - k + pos) --pos;
    if (pos < 0) return false;
    ++idx[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < k; ++i) {
        idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
    return true;
}

}  // namespace

std::pair<SelectionResult, SelectionResult> exhaustive_select(const NetworkSystem& sys, int k,
                                                              Objective obj) {
    const int M = sys.catalog_size();
    if (k < 1 || k > M) throw Error(Errc::invalid_argument, "exhaustive_select: k out of range");
    const std::uint64_t total = binomial(M, k);
    if (total > 1000000) {
        throw Error(Errc::too_large, "exhaustive_select: C(M,k) exceeds the 1e6 cap");
    }

    // Evaluate in enumeration order, then reduce sequentially so ties always
    // resolve to the lexicographically first subset.
    std::vector<std::vector<int>> subsets;
    subsets.reserve(static_cast<std::size_t>(total));
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    do {
        subsets.push_back(idx);
    } while (next_combination(idx, M));

    std::vector<ObjectiveValue> scores(subsets.size());
    detail::parallel_for(subsets.size(), [&](std::size_t i) {
        scores[i] = evaluate_objective(sys, ActuatorSet(subsets[i]), obj);
    });

    int infeasible = 0;
    std::ptrdiff_t best = -1, worst = -1;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        if (!scores[i].feasible) {
            ++infeasible;
            continue;
        }
        if (best < 0 || scores[i].value < scores[static_cast<std::size_t>(best)].value) {
            best = static_cast<std::ptrdiff_t>(i);
        }
        if (worst < 0 || scores[i].value > scores[static_cast<std::size_t>(worst)].value) {
            worst = static_cast<std::ptrdiff_t>(i);
        }
    }
    if (best < 0) {
        throw Error(Errc::all_infeasible, "exhaustive_select: no stabilizable k-subset");
    }

    auto make = [&](std::ptrdiff_t i, const char* method) {
        SelectionResult r;
        r.subset = ActuatorSet(subsets[static_cast<std::size_t>(i)]);
        r.objective_value = scores[static_cast<std::size_t>(i)].value;
        r.objective = obj;
        r.method = method;
        r.infeasible_count = infeasible;
        return r;
    };
    return {make(best, "exhaustive_best"), make(worst, "exhaustive_worst")};
}

std::vector<RandomTrial> random_subsets(const NetworkSystem& sys, int k, int trials,
                                        std::uint64_t seed, Objective obj) {
    const int M = sys.catalog_size();
    if (k < 0 || k > M) throw Error(Errc::invalid_argument, "random_subsets: k out of range");
    if (trials < 0) throw Error(Errc::invalid_argument, "random_subsets: trials must be >= 0");

    std::vector<RandomTrial> out(static_cast<std::size_t>(trials));
    detail::parallel_for(out.size(), [&](std::size_t i) {
        rng::Generator gen(rng::derive_stream(seed, static_cast<std::uint64_t>(i)));
        RandomTrial& trial = out[i];
        trial.subset = ActuatorSet(gen.sample_without_replacement(M, k));
        const ObjectiveValue value = evaluate_objective(sys, trial.subset, obj);
        trial.value = value.feasible ? value.value : kInfeasibleCost;
        trial.feasible = value.feasible;
    });
    return out;
}

}  // namespace netlqr
