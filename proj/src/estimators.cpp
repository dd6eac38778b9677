#include "hest/estimators.hpp"

#include <cmath>

namespace hest {

const char* to_string(EstimatorName name) {
    switch (name) {
        case EstimatorName::imp_unadj: return "imp_unadj";
        case EstimatorName::imp_adj: return "imp_adj";
        case EstimatorName::gform_pre_unadj: return "gform_pre_unadj";
        case EstimatorName::gform_pre_adj: return "gform_pre_adj";
        case EstimatorName::gform_prepost_unadj: return "gform_prepost_unadj";
        case EstimatorName::gform_prepost_adj: return "gform_prepost_adj";
        case EstimatorName::gest_prepost_unadj: return "gest_prepost_unadj";
        case EstimatorName::gest_prepost_adj: return "gest_prepost_adj";
        case EstimatorName::loh: return "loh";
    }
    return "unknown";
}

std::vector<EstimatorName> all_estimator_names() {
    return {EstimatorName::imp_unadj,           EstimatorName::imp_adj,
            EstimatorName::gform_pre_unadj,     EstimatorName::gform_pre_adj,
            EstimatorName::gform_prepost_unadj, EstimatorName::gform_prepost_adj,
            EstimatorName::gest_prepost_unadj,  EstimatorName::gest_prepost_adj,
            EstimatorName::loh};
}

void ModelFormula::validate() const {
    if (target == TargetSubset::ice_free_only) {
        if (r || inter_ar || inter_l0r || inter_l1r) {
            throw HestError(ErrorKind::config_invalid,
                            "a formula fitted on event-free records cannot involve R");
        }
    } else {
        if (!intercept || !a) {
            throw HestError(ErrorKind::config_invalid,
                            "an all-records formula requires an intercept and a main effect of A");
        }
    }
    if ((inter_ar && !a) || (inter_l0r && !l0) || (inter_l1r && !l1)) {
        throw HestError(ErrorKind::config_invalid,
                        "interaction terms require the matching main effects");
    }
}

ModelFormula ModelFormula::event_free(bool with_l0) {
    ModelFormula f;
    f.target = TargetSubset::ice_free_only;
    f.l0 = with_l0;
    return f;
}

ModelFormula ModelFormula::all_records_model(bool with_l0, bool inter_ar, bool inter_l0r,
                                             bool inter_l1r) {
    ModelFormula f;
    f.target = TargetSubset::all_records;
    f.l0 = with_l0;
    f.r = true;
    f.inter_ar = inter_ar;
    f.inter_l0r = inter_l0r && with_l0;
    f.inter_l1r = inter_l1r;
    return f;
}

DesignSpec ModelFormula::design(int l0_width, int l1_width) const {
    DesignSpec spec;
    spec.intercept = intercept;
    spec.a = a;
    spec.l0_width = l0 ? l0_width : 0;
    spec.l1_width = l1 ? l1_width : 0;
    spec.r = r;
    spec.inter_ar = inter_ar;
    spec.inter_l0r_width = inter_l0r ? l0_width : 0;
    spec.inter_l1r_width = inter_l1r ? l1_width : 0;
    return spec;
}

FormulaBundle FormulaBundle::defaults(const TrialDataset& dataset) {
    const bool with_l0 = dataset.l0_width() > 0;
    FormulaBundle bundle;
    bundle.g1 = ModelFormula::event_free(with_l0);
    bundle.g2 = ModelFormula::all_records_model(with_l0);
    bundle.g3 = ModelFormula::all_records_model(with_l0);
    bundle.propensity = ModelFormula::event_free(with_l0);  // R never explains itself
    return bundle;
}

namespace {

void require_estimable(const TrialDataset& dataset) {
    if (dataset.n0() < 1 || dataset.n1() < 1) {
        throw HestError(ErrorKind::empty_stratum, "both treatment arms must be non-empty");
    }
}

// arm-mean difference with divisor n_a (all randomized patients per arm)
double arm_mean_difference(const TrialDataset& dataset, const std::vector<double>& values,
                           double* arm0_mean = nullptr) {
    double sum1 = 0.0, sum0 = 0.0;
    int n1 = 0, n0 = 0;
    for (int i = 0; i < dataset.n(); ++i) {
        if (dataset.records[i].a == 1.0) {
            sum1 += values[i];
            ++n1;
        } else {
            sum0 += values[i];
            ++n0;
        }
    }
    const double mean0 = sum0 / n0;
    if (arm0_mean != nullptr) *arm0_mean = mean0;
    return sum1 / n1 - mean0;
}

// fit the formula on its target subset; r enters the design as observed
FittedLinearModel fit_outcome_model(const TrialDataset& dataset, const ModelFormula& formula) {
    formula.validate();
    const DesignSpec spec = formula.design(dataset.l0_width(), dataset.l1_width());
    std::vector<int> rows;
    for (int i = 0; i < dataset.n(); ++i) {
        if (formula.target == TargetSubset::all_records || dataset.records[i].r == 0.0) {
            rows.push_back(i);
        }
    }
    if (formula.target == TargetSubset::ice_free_only && rows.empty()) {
        throw HestError(ErrorKind::no_ice_free_records, "no event-free records to fit on");
    }
    Eigen::MatrixXd x(rows.size(), spec.n_columns());
    Eigen::VectorXd y(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const TrialRecord& rec = dataset.records[rows[k]];
        x.row(k) = spec.row(rec.a, rec.l0, rec.l1, rec.r);
        y(k) = rec.y;
    }
    return ols_fit(x, y, spec);
}

// regression of `values` on (1, A, L0); returns the full coefficient vector
Eigen::VectorXd final_stage_regression(const TrialDataset& dataset,
                                       const std::vector<double>& values) {
    DesignSpec spec;
    spec.intercept = true;
    spec.a = true;
    spec.l0_width = dataset.l0_width();
    Eigen::MatrixXd x(dataset.n(), spec.n_columns());
    Eigen::VectorXd y(dataset.n());
    for (int i = 0; i < dataset.n(); ++i) {
        const TrialRecord& rec = dataset.records[i];
        x.row(i) = spec.row(rec.a, rec.l0, rec.l1, 0.0);
        y(i) = values[i];
    }
    return ols_fit(x, y, spec).coefficients;
}

// hybrid outcome: observed Y when event-free, fitted event-free mean after an event
std::vector<double> hybrid_outcome(const TrialDataset& dataset, const FittedLinearModel& g1) {
    std::vector<double> values(dataset.n());
    for (int i = 0; i < dataset.n(); ++i) {
        const TrialRecord& rec = dataset.records[i];
        values[i] = rec.r == 0.0 ? rec.y : ols_predict(g1, rec.a, rec.l0, rec.l1, 0.0);
    }
    return values;
}

// event-free predictions for every record in its own arm
std::vector<double> event_free_predictions(const TrialDataset& dataset,
                                           const FittedLinearModel& model) {
    std::vector<double> values(dataset.n());
    for (int i = 0; i < dataset.n(); ++i) {
        const TrialRecord& rec = dataset.records[i];
        values[i] = ols_predict(model, rec.a, rec.l0, rec.l1, 0.0);
    }
    return values;
}

// de-mediated outcome: remove the modeled contribution of the event
std::vector<double> demediated_outcome(const TrialDataset& dataset,
                                       const FittedLinearModel& g2) {
    std::vector<double> values(dataset.n());
    for (int i = 0; i < dataset.n(); ++i) {
        const TrialRecord& rec = dataset.records[i];
        if (rec.r == 0.0) {
            values[i] = rec.y;  // both predictions coincide, keep Y exactly
        } else {
            const double with_event = ols_predict(g2, rec.a, rec.l0, rec.l1, rec.r);
            const double without_event = ols_predict(g2, rec.a, rec.l0, rec.l1, 0.0);
            values[i] = rec.y - (with_event - without_event);
        }
    }
    return values;
}

EstimateResult unadjusted_result(EstimatorName name, const TrialDataset& dataset,
                                 const std::vector<double>& values,
                                 FittedLinearModel stage1) {
    EstimateResult result;
    result.estimator_name = name;
    result.stage1_model = std::move(stage1);
    double arm0_mean = 0.0;
    result.delta_hat = arm_mean_difference(dataset, values, &arm0_mean);
    result.final_stage_coefficients = Eigen::Vector2d(arm0_mean, result.delta_hat);
    return result;
}

EstimateResult adjusted_result(EstimatorName name, const TrialDataset& dataset,
                               const std::vector<double>& values,
                               FittedLinearModel stage1) {
    EstimateResult result;
    result.estimator_name = name;
    result.stage1_model = std::move(stage1);
    result.final_stage_coefficients = final_stage_regression(dataset, values);
    result.delta_hat = result.final_stage_coefficients(1);  // A coefficient
    return result;
}

void require_event_free_target(const ModelFormula& formula) {
    if (formula.target != TargetSubset::ice_free_only) {
        throw HestError(ErrorKind::config_invalid,
                        "this estimator requires a formula fitted on event-free records");
    }
}

void require_all_records_with_r(const ModelFormula& formula) {
    if (formula.target != TargetSubset::all_records || !formula.r) {
        throw HestError(ErrorKind::config_invalid,
                        "this estimator requires an all-records formula that includes R");
    }
}

}  // namespace

EstimateResult estimate_imp_unadj(const TrialDataset& dataset, const ModelFormula& g1_formula) {
    require_estimable(dataset);
    require_event_free_target(g1_formula);
    FittedLinearModel g1 = fit_outcome_model(dataset, g1_formula);
    const std::vector<double> values = hybrid_outcome(dataset, g1);
    return unadjusted_result(EstimatorName::imp_unadj, dataset, values, std::move(g1));
}

EstimateResult estimate_imp_adj(const TrialDataset& dataset, const ModelFormula& g1_formula) {
    require_estimable(dataset);
    require_event_free_target(g1_formula);
    FittedLinearModel g1 = fit_outcome_model(dataset, g1_formula);
    const std::vector<double> values = hybrid_outcome(dataset, g1);
    EstimateResult result = adjusted_result(EstimatorName::imp_adj, dataset, values, std::move(g1));
    return result;
}

EstimateResult estimate_gform_pre_unadj(const TrialDataset& dataset,
                                        const ModelFormula& g1_formula) {
    require_estimable(dataset);
    require_event_free_target(g1_formula);
    FittedLinearModel g1 = fit_outcome_model(dataset, g1_formula);
    const std::vector<double> values = event_free_predictions(dataset, g1);
    return unadjusted_result(EstimatorName::gform_pre_unadj, dataset, values, std::move(g1));
}

EstimateResult estimate_gform_pre_adj(const TrialDataset& dataset,
                                      const ModelFormula& g1_formula) {
    require_estimable(dataset);
    require_event_free_target(g1_formula);
    FittedLinearModel g1 = fit_outcome_model(dataset, g1_formula);
    const std::vector<double> values = event_free_predictions(dataset, g1);
    return adjusted_result(EstimatorName::gform_pre_adj, dataset, values, std::move(g1));
}

EstimateResult estimate_gform_prepost_unadj(const TrialDataset& dataset,
                                            const ModelFormula& g2_formula) {
    require_estimable(dataset);
    require_all_records_with_r(g2_formula);
    FittedLinearModel g2 = fit_outcome_model(dataset, g2_formula);
    const std::vector<double> values = event_free_predictions(dataset, g2);
    return unadjusted_result(EstimatorName::gform_prepost_unadj, dataset, values, std::move(g2));
}

EstimateResult estimate_gform_prepost_adj(const TrialDataset& dataset,
                                          const ModelFormula& g2_formula) {
    require_estimable(dataset);
    require_all_records_with_r(g2_formula);
    FittedLinearModel g2 = fit_outcome_model(dataset, g2_formula);
    const std::vector<double> values = event_free_predictions(dataset, g2);
    return adjusted_result(EstimatorName::gform_prepost_adj, dataset, values, std::move(g2));
}

EstimateResult estimate_gest_prepost_unadj(const TrialDataset& dataset,
                                           const ModelFormula& g2_formula) {
    require_estimable(dataset);
    require_all_records_with_r(g2_formula);
    FittedLinearModel g2 = fit_outcome_model(dataset, g2_formula);
    const std::vector<double> values = demediated_outcome(dataset, g2);
    return unadjusted_result(EstimatorName::gest_prepost_unadj, dataset, values, std::move(g2));
}

EstimateResult estimate_gest_prepost_adj(const TrialDataset& dataset,
                                         const ModelFormula& g2_formula) {
    require_estimable(dataset);
    require_all_records_with_r(g2_formula);
    FittedLinearModel g2 = fit_outcome_model(dataset, g2_formula);
    const std::vector<double> values = demediated_outcome(dataset, g2);
    return adjusted_result(EstimatorName::gest_prepost_adj, dataset, values, std::move(g2));
}

EstimateResult estimate_loh(const TrialDataset& dataset, const ModelFormula& g3_formula,
                            const ModelFormula& propensity_formula) {
    require_estimable(dataset);
    require_all_records_with_r(g3_formula);
    if (g3_formula.inter_ar || g3_formula.inter_l0r || g3_formula.inter_l1r) {
        throw HestError(ErrorKind::config_invalid,
                        "interactions with R are not supported in the propensity-augmented model");
    }
    propensity_formula.validate();
    if (propensity_formula.r || propensity_formula.inter_ar || propensity_formula.inter_l0r ||
        propensity_formula.inter_l1r) {
        throw HestError(ErrorKind::config_invalid, "the propensity formula cannot involve R");
    }

    const int n = dataset.n();
    const DesignSpec prop_spec = propensity_formula.design(dataset.l0_width(), dataset.l1_width());
    Eigen::MatrixXd xp(n, prop_spec.n_columns());
    Eigen::VectorXd response(n);
    for (int i = 0; i < n; ++i) {
        const TrialRecord& rec = dataset.records[i];
        xp.row(i) = prop_spec.row(rec.a, rec.l0, rec.l1, 0.0);
        response(i) = rec.r;
    }

    EstimateResult result;
    result.estimator_name = EstimatorName::loh;
    bool propensity_usable = true;
    std::vector<double> fitted_p(n, 0.0);
    try {
        FittedLogisticModel propensity = logistic_fit(xp, response, prop_spec);
        for (int i = 0; i < n; ++i) {
            const TrialRecord& rec = dataset.records[i];
            fitted_p[i] = logistic_predict(propensity, rec.a, rec.l0, rec.l1);
        }
        result.propensity_model = std::move(propensity);
    } catch (const HestError& e) {
        if (e.kind() != ErrorKind::separation) throw;
        // A diverging propensity fit drives the fitted probabilities to a
        // degenerate limit in which the added column is collinear with the
        // plain design, so the augmentation carries no information. Take the
        // documented drop-the-column fallback directly.
        propensity_usable = false;
    }

    DesignSpec ext_spec = g3_formula.design(dataset.l0_width(), dataset.l1_width());
    ext_spec.p = true;
    Eigen::MatrixXd x(n, ext_spec.n_columns());
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const TrialRecord& rec = dataset.records[i];
        x.row(i) = ext_spec.row(rec.a, rec.l0, rec.l1, rec.r, fitted_p[i]);
        y(i) = rec.y;
    }

    if (propensity_usable) {
        try {
            result.stage1_model = ols_fit(x, y, ext_spec);
        } catch (const HestError& e) {
            if (e.kind() != ErrorKind::rank_deficient) throw;
            // the fitted-probability column is collinear with the rest of the
            // design (e.g. R independent of the covariates): drop it and flag
            propensity_usable = false;
        }
    }
    if (!propensity_usable) {
        DesignSpec fallback_spec = g3_formula.design(dataset.l0_width(), dataset.l1_width());
        result.stage1_model = ols_fit(x.leftCols(fallback_spec.n_columns()), y, fallback_spec);
        result.p_column_dropped = true;
    }

    const int r_index = result.stage1_model.design.index_of_r();
    const double beta_r = result.stage1_model.coefficients(r_index);
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) {
        const TrialRecord& rec = dataset.records[i];
        values[i] = rec.y - beta_r * rec.r;
    }
    double arm0_mean = 0.0;
    result.delta_hat = arm_mean_difference(dataset, values, &arm0_mean);
    result.final_stage_coefficients = Eigen::Vector2d(arm0_mean, result.delta_hat);
    return result;
}

std::vector<NamedEstimate> run_all_estimators(const TrialDataset& dataset,
                                              const FormulaBundle& formulas) {
    std::vector<NamedEstimate> results;
    for (EstimatorName name : all_estimator_names()) {
        NamedEstimate entry;
        entry.name = name;
        try {
            switch (name) {
                case EstimatorName::imp_unadj:
                    entry.result = estimate_imp_unadj(dataset, formulas.g1);
                    break;
                case EstimatorName::imp_adj:
                    entry.result = estimate_imp_adj(dataset, formulas.g1);
                    break;
                case EstimatorName::gform_pre_unadj:
                    entry.result = estimate_gform_pre_unadj(dataset, formulas.g1);
                    break;
                case EstimatorName::gform_pre_adj:
                    entry.result = estimate_gform_pre_adj(dataset, formulas.g1);
                    break;
                case EstimatorName::gform_prepost_unadj:
                    entry.result = estimate_gform_prepost_unadj(dataset, formulas.g2);
                    break;
                case EstimatorName::gform_prepost_adj:
                    entry.result = estimate_gform_prepost_adj(dataset, formulas.g2);
                    break;
                case EstimatorName::gest_prepost_unadj:
                    entry.result = estimate_gest_prepost_unadj(dataset, formulas.g2);
                    break;
                case EstimatorName::gest_prepost_adj:
                    entry.result = estimate_gest_prepost_adj(dataset, formulas.g2);
                    break;
                case EstimatorName::loh:
                    entry.result = estimate_loh(dataset, formulas.g3, formulas.propensity);
                    break;
            }
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        results.push_back(std::move(entry));
    }
    return results;
}

}  // namespace hest
