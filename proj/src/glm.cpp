#include "hest/glm.hpp"

#include <cmath>
#include <limits>

namespace hest {

namespace {
constexpr double kRankTolerance = 1e-10;
constexpr double kNewtonTolerance = 1e-10;
constexpr double kCoefDivergenceBound = 30.0;
constexpr int kNewtonMaxIterations = 50;

double clamp_probability(double p) {
    const double hi = std::nextafter(1.0, 0.0);
    const double lo = std::numeric_limits<double>::min();
    if (p > hi) return hi;
    if (p < lo) return lo;
    return p;
}
}  // namespace

int DesignSpec::n_columns() const {
    return (intercept ? 1 : 0) + (a ? 1 : 0) + l0_width + l1_width + (r ? 1 : 0) +
           (inter_ar ? 1 : 0) + inter_l0r_width + inter_l1r_width + (p ? 1 : 0);
}

int DesignSpec::index_of_a() const {
    if (!a) return -1;
    return intercept ? 1 : 0;
}

int DesignSpec::index_of_r() const {
    if (!r) return -1;
    return (intercept ? 1 : 0) + (a ? 1 : 0) + l0_width + l1_width;
}

int DesignSpec::index_of_p() const {
    if (!p) return -1;
    return n_columns() - 1;
}

std::vector<std::string> DesignSpec::column_names() const {
    std::vector<std::string> names;
    if (intercept) names.push_back("intercept");
    if (a) names.push_back("a");
    for (int j = 0; j < l0_width; ++j) names.push_back("l0_" + std::to_string(j + 1));
    for (int j = 0; j < l1_width; ++j) names.push_back("l1_" + std::to_string(j + 1));
    if (r) names.push_back("r");
    if (inter_ar) names.push_back("a*r");
    for (int j = 0; j < inter_l0r_width; ++j) names.push_back("l0_" + std::to_string(j + 1) + "*r");
    for (int j = 0; j < inter_l1r_width; ++j) names.push_back("l1_" + std::to_string(j + 1) + "*r");
    if (p) names.push_back("p");
    return names;
}

Eigen::RowVectorXd DesignSpec::row(double a_value, const std::vector<double>& l0,
                                   const std::vector<double>& l1, double r_value,
                                   double p_value) const {
    if (static_cast<int>(l0.size()) < l0_width || static_cast<int>(l1.size()) < l1_width ||
        static_cast<int>(l0.size()) < inter_l0r_width ||
        static_cast<int>(l1.size()) < inter_l1r_width) {
        throw HestError(ErrorKind::dimension_mismatch,
                        "covariate vector shorter than the design requires");
    }
    Eigen::RowVectorXd out(n_columns());
    int j = 0;
    if (intercept) out(j++) = 1.0;
    if (a) out(j++) = a_value;
    for (int k = 0; k < l0_width; ++k) out(j++) = l0[k];
    for (int k = 0; k < l1_width; ++k) out(j++) = l1[k];
    if (r) out(j++) = r_value;
    if (inter_ar) out(j++) = a_value * r_value;
    for (int k = 0; k < inter_l0r_width; ++k) out(j++) = l0[k] * r_value;
    for (int k = 0; k < inter_l1r_width; ++k) out(j++) = l1[k] * r_value;
    if (p) out(j++) = p_value;
    return out;
}

namespace {

void check_design(const Eigen::MatrixXd& x, const DesignSpec& spec) {
    if (x.cols() != spec.n_columns()) {
        throw HestError(ErrorKind::dimension_mismatch, "design matrix does not match its spec");
    }
}

}  // namespace

FittedLinearModel ols_fit(const Eigen::MatrixXd& design_matrix, const Eigen::VectorXd& response,
                          const DesignSpec& spec) {
    check_design(design_matrix, spec);
    if (design_matrix.rows() != response.size()) {
        throw HestError(ErrorKind::dimension_mismatch, "response length does not match design");
    }
    const Eigen::Index n = design_matrix.rows();
    const Eigen::Index k = design_matrix.cols();
    if (n < k) {
        throw HestError(ErrorKind::rank_deficient, "fewer rows than design columns");
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design_matrix);
    const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs().head(k);
    const double max_diag = diag.maxCoeff();
    if (max_diag <= 0.0 || diag.minCoeff() < kRankTolerance * max_diag) {
        throw HestError(ErrorKind::rank_deficient, "design matrix is numerically rank deficient");
    }
    FittedLinearModel model;
    model.design = spec;
    model.coefficients = qr.solve(response);
    const Eigen::VectorXd resid = response - design_matrix * model.coefficients;
    model.residual_variance = resid.squaredNorm() / static_cast<double>(n);
    model.n_used = static_cast<int>(n);
    return model;
}

double ols_predict(const FittedLinearModel& model, double a_value, const std::vector<double>& l0,
                   const std::vector<double>& l1, double r_value, double p_value) {
    const Eigen::RowVectorXd x = model.design.row(a_value, l0, l1, r_value, p_value);
    if (x.size() != model.coefficients.size()) {
        throw HestError(ErrorKind::dimension_mismatch, "coefficient length does not match design");
    }
    return x.dot(model.coefficients);
}

FittedLogisticModel logistic_fit(const Eigen::MatrixXd& design_matrix,
                                 const Eigen::VectorXd& response01, const DesignSpec& spec) {
    check_design(design_matrix, spec);
    const Eigen::Index n = design_matrix.rows();
    const Eigen::Index k = design_matrix.cols();
    if (n != response01.size()) {
        throw HestError(ErrorKind::dimension_mismatch, "response length does not match design");
    }
    const double total_ones = response01.sum();
    if (total_ones <= 0.0 || total_ones >= static_cast<double>(n)) {
        throw HestError(ErrorKind::one_class_only, "logistic response has a single class");
    }

    FittedLogisticModel model;
    model.design = spec;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    for (int it = 1; it <= kNewtonMaxIterations; ++it) {
        const Eigen::VectorXd eta = design_matrix * beta;
        Eigen::VectorXd prob(n), weight(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = clamp_probability(1.0 / (1.0 + std::exp(-eta(i))));
            prob(i) = p;
            weight(i) = p * (1.0 - p);
        }
        const Eigen::VectorXd score = design_matrix.transpose() * (response01 - prob);
        const Eigen::MatrixXd hessian =
            design_matrix.transpose() * weight.asDiagonal() * design_matrix;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(hessian);
        if (!lu.isInvertible()) {
            throw HestError(ErrorKind::rank_deficient,
                            "singular information matrix in logistic fit");
        }
        const Eigen::VectorXd step = lu.solve(score);
        beta += step;
        if (!beta.allFinite() || beta.cwiseAbs().maxCoeff() > kCoefDivergenceBound) {
            throw HestError(ErrorKind::separation,
                            "logistic coefficients diverged (separated data)");
        }
        model.iterations = it;
        const Eigen::VectorXd eta2 = design_matrix * beta;
        Eigen::VectorXd prob2(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            prob2(i) = clamp_probability(1.0 / (1.0 + std::exp(-eta2(i))));
        }
        const double score_norm =
            (design_matrix.transpose() * (response01 - prob2)).cwiseAbs().maxCoeff();
        if (step.cwiseAbs().maxCoeff() < kNewtonTolerance || score_norm < kNewtonTolerance) {
            model.converged = true;
            model.coefficients = beta;
            return model;
        }
    }
    throw HestError(ErrorKind::separation, "logistic fit did not converge");
}

double logistic_predict(const FittedLogisticModel& model, double a_value,
                        const std::vector<double>& l0, const std::vector<double>& l1,
                        double r_value, double p_value) {
    const Eigen::RowVectorXd x = model.design.row(a_value, l0, l1, r_value, p_value);
    if (x.size() != model.coefficients.size()) {
        throw HestError(ErrorKind::dimension_mismatch, "coefficient length does not match design");
    }
    return clamp_probability(1.0 / (1.0 + std::exp(-x.dot(model.coefficients))));
}

}  // namespace hest
