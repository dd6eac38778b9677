#pragma once

#include <optional>
#include <string>

#include "hest/dataset.hpp"
#include "hest/estimators.hpp"
#include "hest/glm.hpp"

namespace hest {

enum class SndeMethod { ipw, unweighted };

const char* to_string(SndeMethod method);

// One component of the saturated direct-effect model
//   E(Y^{a,r} - Y^{0,r}) = upsilon0 * a * (1 - r) + upsilon1 * a * r.
// The two estimating equations decouple, so each component succeeds or fails
// on its own.
struct SndeComponent {
    bool ok = false;
    double value = 0.0;
    std::string error;  // failure description when !ok
};

struct SndeResult {
    SndeMethod method = SndeMethod::ipw;
    SndeComponent upsilon0;  // direct effect among event-free potential outcomes
    SndeComponent upsilon1;
    std::optional<FittedLogisticModel> propensity_model;   // ipw only
    std::optional<FittedLinearModel> outcome_model_r0;     // unweighted only
    std::optional<FittedLinearModel> outcome_model_r1;     // unweighted only
    bool unit_weights_fallback = false;  // single-class R: weights fixed to one
};

// Inverse-probability-weighted G-estimator. Solves, over all records with
// Abar the sample mean of A,
//   sum_i w_i (A_i - Abar) (1 - R_i) (Y_i - u0 A_i) = 0,
//   sum_i w_i (A_i - Abar) R_i (Y_i - u1 A_i) = 0,
// with w_i = 1 / P(R_i | A_i, L1_i) from a logistic model. Baseline
// covariates are not part of this estimator's formulation.
SndeResult snde_ipw(const TrialDataset& dataset, const ModelFormula& propensity_formula);

// Unweighted G-estimator with plug-in conditional means fitted separately in
// each event stratum:
//   u0 = [ sum_{R=0} (A-Abar)(Y - m0) + P(R=0) sum_all (A-Abar) m0 ]
//        / [ P(R=0) sum_all (A-Abar) A ],
// and symmetrically for u1 with the R=1 stratum model m1.
SndeResult snde_unweighted(const TrialDataset& dataset, const ModelFormula& outcome_formula);

}  // namespace hest
