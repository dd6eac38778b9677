#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hest/simulator.hpp"

namespace hest {

inline constexpr const char* kArtifactVersion = "1.0.0";

// Formats value rounded to 3 decimals with banker's rounding on decimal ties.
// A result of negative zero is normalized to "0.000". Throws config_invalid
// for non-finite input.
std::string round3(double value);

// Full-precision decimal rendering that round-trips through strtod.
std::string full_precision(double value);

// Which analytic standard error applies to an estimator's summary row:
// the event-free-only fit, the all-records fit, or none.
enum class SeFamily { pre, prepost, none };
SeFamily se_family(EstimatorName name);

// Writes the machine-readable study summary. Leading '#' comment lines carry
// artifact version, master seed, generator ids, and nothing that varies with
// the execution environment, so the bytes depend only on inputs and seed.
void write_summary_csv(std::ostream& out, const std::vector<SimulationSummary>& summaries,
                       std::uint64_t master_seed);

struct SummaryCsvRow {
    std::string scenario;
    double pi0 = 0.0;
    double pi1 = 0.0;
    int n = 0;
    int n_reps = 0;
    std::uint64_t seed = 0;
    double lambda0 = 0.0;
    double lambda_a = 0.0;
    double lambda_r = 0.0;
    double sigma2_l1 = 0.0;
    double b0 = 0.0;
    double b_a = 0.0;
    double b_l1 = 0.0;
    double b_r = 0.0;
    double b_l1r = 0.0;
    double sigma2_y = 0.0;
    double true_delta = 0.0;
    double asy_se_pre = 0.0;
    double asy_se_prepost = 0.0;
    std::string estimator;
    int n_failures = 0;
    double bias = 0.0;
    double empirical_se = 0.0;
    double mcse_bias = 0.0;
    std::string bias_3dp;
    std::string empirical_se_3dp;
    std::string asy_se_3dp;
};

// Parses what write_summary_csv produced; throws data_invalid on any
// structural mismatch. Comment lines are skipped.
std::vector<SummaryCsvRow> parse_summary_csv(std::istream& in);

// Human-readable companion table; may mention the worker count because this
// artifact is not subject to the byte-identity contract.
void write_summary_markdown(std::ostream& out, const std::vector<SimulationSummary>& summaries,
                            std::uint64_t master_seed, int workers);

// Per-replicate dump: one row per (replicate, estimator) pair.
void write_replicate_csv(std::ostream& out, const std::vector<ReplicateOutcome>& outcomes);

}  // namespace hest
