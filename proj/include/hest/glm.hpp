#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hest/errors.hpp"

namespace hest {

// Describes the columns of a regression design matrix in a fixed order:
//   [intercept] [a] [l0 block] [l1 block] [r] [a*r] [l0*r block] [l1*r block] [p]
// where p is an extra fitted-probability column (propensity-augmented models).
struct DesignSpec {
    bool intercept = false;
    bool a = false;
    int l0_width = 0;
    int l1_width = 0;
    bool r = false;
    bool inter_ar = false;
    int inter_l0r_width = 0;
    int inter_l1r_width = 0;
    bool p = false;

    int n_columns() const;
    int index_of_a() const;  // -1 when absent
    int index_of_r() const;
    int index_of_p() const;
    std::vector<std::string> column_names() const;

    // Fills one design row from covariate values; `r_value` already reflects
    // any override (interactions are formed from the same overridden value).
    Eigen::RowVectorXd row(double a_value, const std::vector<double>& l0,
                           const std::vector<double>& l1, double r_value,
                           double p_value = 0.0) const;
};

struct FittedLinearModel {
    DesignSpec design;
    Eigen::VectorXd coefficients;
    double residual_variance = 0.0;  // RSS / n_used (population divisor)
    int n_used = 0;
};

struct FittedLogisticModel {
    DesignSpec design;
    Eigen::VectorXd coefficients;
    bool converged = false;
    int iterations = 0;
};

// Least squares via column-pivoted Householder QR. Throws rank_deficient when
// rows < columns or when min|R_ii|/max|R_ii| < 1e-10.
FittedLinearModel ols_fit(const Eigen::MatrixXd& design_matrix, const Eigen::VectorXd& response,
                          const DesignSpec& spec);

// Linear predictor at the given covariates; `r_value` is the (possibly
// overridden) value of R used for the R column and every R interaction.
double ols_predict(const FittedLinearModel& model, double a_value, const std::vector<double>& l0,
                   const std::vector<double>& l1, double r_value, double p_value = 0.0);

// Newton-Raphson maximizer of the Bernoulli log-likelihood. Converged when
// the max absolute coefficient change < 1e-10 or the score norm < 1e-10,
// within 50 iterations. Throws one_class_only when the response is constant
// and separation when any |coefficient| exceeds 30 or iteration fails.
FittedLogisticModel logistic_fit(const Eigen::MatrixXd& design_matrix,
                                 const Eigen::VectorXd& response01, const DesignSpec& spec);

// Inverse-logit of the linear predictor, clamped to the open interval (0,1).
double logistic_predict(const FittedLogisticModel& model, double a_value,
                        const std::vector<double>& l0, const std::vector<double>& l1,
                        double r_value = 0.0, double p_value = 0.0);

}  // namespace hest
