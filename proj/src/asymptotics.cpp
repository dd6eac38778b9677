#include "hest/asymptotics.hpp"

#include <cmath>

#include "hest/errors.hpp"

namespace hest {

void AsymptoticInputs::validate() const {
    for (int r = 0; r < 2; ++r) {
        if (var_a_given_r[r] < 0.0 || var_l1_given_r[r] < 0.0 || var_l1_given_a[r] < 0.0) {
            throw HestError(ErrorKind::config_invalid, "variances must be non-negative");
        }
        if (std::fabs(cov_a_l1_given_r[r]) >
            std::sqrt(var_a_given_r[r] * var_l1_given_r[r]) + 1e-12) {
            throw HestError(ErrorKind::config_invalid,
                            "covariance exceeds the Cauchy-Schwarz bound");
        }
    }
    if (!(p_r0 > 0.0 && p_r0 <= 1.0)) {
        throw HestError(ErrorKind::config_invalid, "p_r0 must lie in (0,1]");
    }
    if (sigma2 < 0.0) {
        throw HestError(ErrorKind::config_invalid, "sigma2 must be non-negative");
    }
}

AsymptoticInputs parametric_inputs(const ScenarioParams& params) {
    params.validate();
    AsymptoticInputs in;
    const double pi0 = params.pi0;
    const double pi1 = params.pi1;
    // A is Bernoulli(1/2); conditioning on R reweights the two arms
    in.var_a_given_r[0] = pi0 * pi1 / ((pi0 + pi1) * (pi0 + pi1));
    in.var_a_given_r[1] = (1.0 - pi0) * (1.0 - pi1) / ((2.0 - pi0 - pi1) * (2.0 - pi0 - pi1));
    for (int r = 0; r < 2; ++r) {
        in.var_l1_given_r[r] = params.sigma2_l1 + params.lambda_a * params.lambda_a * in.var_a_given_r[r];
        in.cov_a_l1_given_r[r] = params.lambda_a * in.var_a_given_r[r];
    }
    in.tau_diff = params.lambda_a + params.lambda_r * (pi0 - pi1);
    const double lr2 = params.lambda_r * params.lambda_r;
    in.var_l1_given_a[0] = lr2 * pi0 * (1.0 - pi0) + params.sigma2_l1;
    in.var_l1_given_a[1] = lr2 * pi1 * (1.0 - pi1) + params.sigma2_l1;
    in.p_r0 = 0.5 * (pi0 + pi1);
    in.sigma2 = params.sigma2_y;
    in.beta_l1 = params.b_l1;
    return in;
}

namespace {

// shared quadratic-form core: sigma2 * (v_l - 2 c t + v_a t^2) / det, plus the
// covariate-mean sampling term common to both estimators
double variance_from_blocks(const AsymptoticInputs& in, double v_a, double v_l, double c) {
    const double det = v_a * v_l - c * c;
    if (det <= 0.0) {
        throw HestError(ErrorKind::singular_conditional_covariance,
                        "conditional covariance matrix of (A, L1) is singular");
    }
    const double t = in.tau_diff;
    const double quad = v_l - 2.0 * c * t + v_a * t * t;
    const double mean_term =
        2.0 * in.beta_l1 * in.beta_l1 * (in.var_l1_given_a[0] + in.var_l1_given_a[1]);
    return in.sigma2 * quad / det + mean_term;
}

}  // namespace

double avar_pre(const AsymptoticInputs& inputs) {
    inputs.validate();
    const double v_a = inputs.var_a_given_r[0];
    const double v_l = inputs.var_l1_given_r[0];
    const double c = inputs.cov_a_l1_given_r[0];
    const double det = v_a * v_l - c * c;
    if (det <= 0.0) {
        throw HestError(ErrorKind::singular_conditional_covariance,
                        "conditional covariance matrix of (A, L1) given R=0 is singular");
    }
    const double t = inputs.tau_diff;
    const double quad = v_l - 2.0 * c * t + v_a * t * t;
    const double mean_term = 2.0 * inputs.beta_l1 * inputs.beta_l1 *
                             (inputs.var_l1_given_a[0] + inputs.var_l1_given_a[1]);
    return inputs.sigma2 * quad / (inputs.p_r0 * det) + mean_term;
}

double avar_prepost(const AsymptoticInputs& inputs) {
    inputs.validate();
    const double w0 = inputs.p_r0;
    const double w1 = 1.0 - w0;
    const double v_a = w0 * inputs.var_a_given_r[0] + w1 * inputs.var_a_given_r[1];
    const double v_l = w0 * inputs.var_l1_given_r[0] + w1 * inputs.var_l1_given_r[1];
    const double c = w0 * inputs.cov_a_l1_given_r[0] + w1 * inputs.cov_a_l1_given_r[1];
    return variance_from_blocks(inputs, v_a, v_l, c);
}

double power_prepost(double p, double p_r0, double alpha) {
    if (!(p > 0.0 && p < 1.0)) {
        throw HestError(ErrorKind::config_invalid, "p must lie in (0,1)");
    }
    if (!(p_r0 > 0.0 && p_r0 <= 1.0)) {
        throw HestError(ErrorKind::config_invalid, "p_r0 must lie in (0,1]");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw HestError(ErrorKind::config_invalid, "alpha must lie in (0,1)");
    }
    const double z = alpha == 0.05 ? 1.96 : normal_quantile(1.0 - alpha / 2.0);
    return normal_cdf(-z + (z + normal_quantile(p)) / std::sqrt(p_r0));
}

}  // namespace hest
