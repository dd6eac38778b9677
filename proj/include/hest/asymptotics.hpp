#pragma once

#include "hest/normal.hpp"
#include "hest/scenario.hpp"

namespace hest {

// Ingredients of the closed-form large-sample variances. All variances are
// for sqrt(n) * (estimate - estimand); divide by n before square-rooting.
struct AsymptoticInputs {
    double sigma2 = 1.0;            // residual variance of Y given (A, L1, R)
    double beta_l1 = 1.0;           // outcome-model coefficient of L1
    double var_a_given_r[2] = {0.25, 0.25};
    double var_l1_given_r[2] = {1.0, 1.0};
    double cov_a_l1_given_r[2] = {0.0, 0.0};
    double p_r0 = 1.0;              // P(R=0)
    double tau_diff = 0.0;          // E(L1|A=1) - E(L1|A=0)
    double var_l1_given_a[2] = {1.0, 1.0};

    void validate() const;  // throws config_invalid on domain violations
};

// Closed-form moments of the scenario's data-generating process.
AsymptoticInputs parametric_inputs(const ScenarioParams& params);

// Large-sample variance of the estimator standardizing the event-free
// outcome model (conditions on the R=0 stratum's covariance structure).
double avar_pre(const AsymptoticInputs& inputs);

// Large-sample variance of the estimator that also uses post-event records;
// uses the covariance matrix averaged over the event strata.
double avar_prepost(const AsymptoticInputs& inputs);

// Power of the post-event-data estimator's test given the event-free
// estimator's power p and the event-free proportion. The two-sided critical
// value defaults to 1.96 (alpha = 0.05).
double power_prepost(double p, double p_r0, double alpha = 0.05);

}  // namespace hest
