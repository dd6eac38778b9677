#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hest/dataset.hpp"
#include "hest/estimators.hpp"
#include "hest/scenario.hpp"

namespace hest {

// The estimand the scenario's data-generating process identifies: with the
// event prevented, the arm contrast is b_a plus b_l1 times the between-arm
// difference in mean L1, which is lambda_a + lambda_r * (pi0 - pi1). The
// event's own pathway (b_r, b_l1r) is removed.
double true_delta(const ScenarioParams& params);

// Deterministic draw for one replicate: every record's variates come from a
// counter-based stream keyed by (seed, replicate, record), so regenerating
// with the same coordinates is bit-identical regardless of execution order.
TrialDataset generate_dataset(const ScenarioParams& params, std::uint32_t replicate_index);

struct EstimatorSummaryRow {
    EstimatorName name;
    double mean_delta = 0.0;
    double bias = 0.0;          // mean_delta - true_delta over successful replicates
    double empirical_se = 0.0;  // sample SD of the estimates (divisor successes - 1)
    double mcse_bias = 0.0;     // empirical_se / sqrt(successes)
    int n_failures = 0;
};

struct SimulationSummary {
    ScenarioParams scenario;
    std::vector<EstimatorSummaryRow> rows;
    double asy_se_pre = 0.0;      // sqrt(avar_pre / n)
    double asy_se_prepost = 0.0;  // sqrt(avar_prepost / n)
    double true_delta_value = 0.0;
};

// Per-replicate outcome for the optional replicate dump.
struct ReplicateOutcome {
    int replicate;
    EstimatorName estimator;
    bool ok;
    double delta_hat;   // meaningful only when ok
    std::string error;  // failure description when !ok
};

struct StudyOptions {
    std::vector<EstimatorName> estimators = {EstimatorName::gform_pre_unadj,
                                             EstimatorName::gest_prepost_unadj,
                                             EstimatorName::loh};
    // analysis-model interactions with R (the event-free model never has them)
    bool g2_inter_ar = false;
    bool g2_inter_l0r = false;
    bool g2_inter_l1r = false;
    int workers = 0;           // 0: all available
    bool force_serial = false; // reference path, used by tests and the benchmark
    std::vector<ReplicateOutcome>* dump = nullptr;  // optional per-replicate sink
};

// Runs the Monte Carlo study. Replicates are independent work items; results
// land in preallocated per-replicate slots and are aggregated serially, so
// the summary is bit-identical for any worker count.
SimulationSummary run_study(const ScenarioParams& params, const StudyOptions& options);

}  // namespace hest
