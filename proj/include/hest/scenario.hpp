#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hest {

// Data-generating-process parameters for one simulation scenario:
//   A   ~ Bernoulli(1/2)
//   R|A=a ~ Bernoulli(1 - pi_a)            (pi_a = P(R=0|A=a))
//   L1|A,R ~ Normal(lambda0 + lambda_a A + lambda_r R, sigma2_l1)
//   Y|A,L1,R ~ Normal(b0 + b_a A + b_l1 L1 + b_r R + b_l1r L1 R, sigma2_y)
struct ScenarioParams {
    std::string name = "scenario";
    double pi0 = 0.4;
    double pi1 = 0.5;
    double lambda0 = 0.0;
    double lambda_a = 1.0;
    double lambda_r = 1.0;
    double sigma2_l1 = 1.0;
    double b0 = 0.0;
    double b_a = 1.0;
    double b_l1 = 1.0;
    double b_r = 1.0;
    double b_l1r = 0.0;
    double sigma2_y = 1.0;
    int n = 500;
    int n_reps = 10000;
    std::uint64_t seed = 20260825;

    void validate() const;  // throws config_invalid on domain violations
};

// Parses a flat key-value scenario file: `#` comments, blank lines, blocks
// introduced by a `[scenario]` line, `key = value` pairs. Unknown keys or
// malformed values raise config_invalid.
std::vector<ScenarioParams> parse_scenario_file(std::istream& in);

// Applies one `key = value` assignment; shared by file parsing and CLI flags.
void apply_scenario_key(ScenarioParams& params, const std::string& key, const std::string& value);

}  // namespace hest
