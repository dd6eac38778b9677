#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hest/dataset.hpp"
#include "hest/glm.hpp"

namespace hest {

enum class EstimatorName {
    imp_unadj,
    imp_adj,
    gform_pre_unadj,
    gform_pre_adj,
    gform_prepost_unadj,
    gform_prepost_adj,
    gest_prepost_unadj,
    gest_prepost_adj,
    loh,
};

const char* to_string(EstimatorName name);
std::vector<EstimatorName> all_estimator_names();

// Which records an outcome-model formula is fitted on.
enum class TargetSubset {
    ice_free_only,  // event-free records only (R = 0)
    all_records,    // every record, R enters the model
};

// Outcome-model formula: include flags plus interaction terms limited to
// {A*R, L0*R, L1*R}. Construction-time invariants:
//   - formulas fitted on event-free records never involve R;
//   - formulas fitted on all records include an intercept and a main effect
//     of A (the estimator equivalences below depend on this).
struct ModelFormula {
    TargetSubset target = TargetSubset::ice_free_only;
    bool intercept = true;
    bool a = true;
    bool l0 = false;
    bool l1 = true;
    bool r = false;
    bool inter_ar = false;
    bool inter_l0r = false;
    bool inter_l1r = false;

    void validate() const;  // throws config_invalid on violations

    // conventional formulas: event-free outcome model and all-records model
    static ModelFormula event_free(bool with_l0);
    static ModelFormula all_records_model(bool with_l0, bool inter_ar = false,
                                          bool inter_l0r = false, bool inter_l1r = false);

    DesignSpec design(int l0_width, int l1_width) const;
};

struct EstimateResult {
    EstimatorName estimator_name;
    double delta_hat = 0.0;
    FittedLinearModel stage1_model;
    // final-stage nuisance coefficients: (mean of arm 0, delta) for the
    // unadjusted estimators and the (intercept, A, L0...) regression
    // coefficients for the adjusted ones
    Eigen::VectorXd final_stage_coefficients;
    std::optional<FittedLogisticModel> propensity_model;  // propensity-augmented estimator only
    bool p_column_dropped = false;  // collinear fitted-probability column was removed
};

// Conditional-mean imputation: fit the event-free outcome model, substitute
// fitted means for post-event records, and take the arm-mean difference of
// the hybrid outcome (divisor: all randomized patients per arm).
EstimateResult estimate_imp_unadj(const TrialDataset& dataset, const ModelFormula& g1_formula);

// Imputation with baseline adjustment: regress the hybrid outcome on
// (1, A, L0); delta is the A coefficient. With an empty L0 block this
// coincides with the unadjusted version.
EstimateResult estimate_imp_adj(const TrialDataset& dataset, const ModelFormula& g1_formula);

// Standardization over the event-free outcome model: predict every patient's
// event-free outcome in their own arm and difference the arm means.
EstimateResult estimate_gform_pre_unadj(const TrialDataset& dataset, const ModelFormula& g1_formula);
EstimateResult estimate_gform_pre_adj(const TrialDataset& dataset, const ModelFormula& g1_formula);

// Standardization over the all-records outcome model with the event
// indicator set to zero in predictions.
EstimateResult estimate_gform_prepost_unadj(const TrialDataset& dataset,
                                            const ModelFormula& g2_formula);
EstimateResult estimate_gform_prepost_adj(const TrialDataset& dataset,
                                          const ModelFormula& g2_formula);

// Event-effect removal ("de-mediation"): Y~ = Y - {g2(..., R) - g2(..., 0)},
// then an arm-mean difference (or a (1, A, L0) regression when adjusted).
EstimateResult estimate_gest_prepost_unadj(const TrialDataset& dataset,
                                           const ModelFormula& g2_formula);
EstimateResult estimate_gest_prepost_adj(const TrialDataset& dataset,
                                         const ModelFormula& g2_formula);

// Propensity-augmented de-mediation: fit P(R=1|A,L0,L1), add the fitted
// probability as a covariate to the all-records outcome model, and remove
// only the R coefficient's contribution from post-event outcomes. When the
// fitted-probability column is collinear with the rest of the design it is
// dropped and the result carries a warning flag.
EstimateResult estimate_loh(const TrialDataset& dataset, const ModelFormula& g3_formula,
                            const ModelFormula& propensity_formula);

struct FormulaBundle {
    ModelFormula g1;
    ModelFormula g2;
    ModelFormula g3;
    ModelFormula propensity;

    // intercept + A + L0 + L1 everywhere; R in the all-records models
    static FormulaBundle defaults(const TrialDataset& dataset);
};

struct NamedEstimate {
    EstimatorName name;
    std::optional<EstimateResult> result;  // empty on failure
    std::string error;                     // failure description when empty
};

// Runs every estimator; individual failures are recorded per estimator
// without aborting the batch.
std::vector<NamedEstimate> run_all_estimators(const TrialDataset& dataset,
                                              const FormulaBundle& formulas);

}  // namespace hest
