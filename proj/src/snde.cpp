#include "hest/snde.hpp"

#include <cmath>

namespace hest {

const char* to_string(SndeMethod method) {
    return method == SndeMethod::ipw ? "ipw" : "unweighted";
}

namespace {

constexpr double kMinFittedProbability = 1e-6;
constexpr double kDenominatorTolerance = 1e-9;

void require_estimable(const TrialDataset& dataset) {
    if (dataset.n0() < 1 || dataset.n1() < 1) {
        throw HestError(ErrorKind::empty_stratum, "both treatment arms must be non-empty");
    }
}

void require_covariate_only(const ModelFormula& formula) {
    formula.validate();
    if (formula.r || formula.inter_ar || formula.inter_l0r || formula.inter_l1r) {
        throw HestError(ErrorKind::config_invalid,
                        "direct-effect model formulas cannot involve R");
    }
    if (formula.l0) {
        throw HestError(ErrorKind::config_invalid,
                        "baseline covariates are not part of the direct-effect estimators");
    }
}

double sample_mean_a(const TrialDataset& dataset) {
    double sum = 0.0;
    for (const auto& rec : dataset.records) sum += rec.a;
    return sum / dataset.n();
}

SndeComponent ratio_component(double numerator, double denominator) {
    SndeComponent component;
    if (std::fabs(denominator) < kDenominatorTolerance) {
        component.error =
            std::string(to_string(ErrorKind::zero_denominator)) + ": degenerate arm/event split";
        return component;
    }
    component.ok = true;
    component.value = numerator / denominator;
    return component;
}

}  // namespace

SndeResult snde_ipw(const TrialDataset& dataset, const ModelFormula& propensity_formula) {
    require_estimable(dataset);
    require_covariate_only(propensity_formula);

    const int n = dataset.n();
    SndeResult result;
    result.method = SndeMethod::ipw;

    std::vector<double> weight(n, 1.0);
    bool has_r0 = false, has_r1 = false;
    for (const auto& rec : dataset.records) (rec.r == 0.0 ? has_r0 : has_r1) = true;
    if (has_r0 && has_r1) {
        const DesignSpec spec = propensity_formula.design(0, dataset.l1_width());
        Eigen::MatrixXd x(n, spec.n_columns());
        Eigen::VectorXd response(n);
        for (int i = 0; i < n; ++i) {
            const TrialRecord& rec = dataset.records[i];
            x.row(i) = spec.row(rec.a, {}, rec.l1, 0.0);
            response(i) = rec.r;
        }
        FittedLogisticModel propensity = logistic_fit(x, response, spec);
        for (int i = 0; i < n; ++i) {
            const TrialRecord& rec = dataset.records[i];
            const double p1 = logistic_predict(propensity, rec.a, {}, rec.l1);
            const double p_observed = rec.r == 1.0 ? p1 : 1.0 - p1;
            if (p_observed < kMinFittedProbability) {
                throw HestError(ErrorKind::extreme_weights,
                                "fitted probability of the observed event status below 1e-6");
            }
            weight[i] = 1.0 / p_observed;
        }
        result.propensity_model = std::move(propensity);
    } else {
        // a single event class leaves the event model unidentified; the
        // estimating equations remain solvable with unit weights
        result.unit_weights_fallback = true;
    }

    const double a_bar = sample_mean_a(dataset);
    double num0 = 0.0, den0 = 0.0, num1 = 0.0, den1 = 0.0;
    for (int i = 0; i < n; ++i) {
        const TrialRecord& rec = dataset.records[i];
        const double centred = weight[i] * (rec.a - a_bar);
        if (rec.r == 0.0) {
            num0 += centred * rec.y;
            den0 += centred * rec.a;
        } else {
            num1 += centred * rec.y;
            den1 += centred * rec.a;
        }
    }
    result.upsilon0 = ratio_component(num0, den0);
    result.upsilon1 = ratio_component(num1, den1);
    return result;
}

SndeResult snde_unweighted(const TrialDataset& dataset, const ModelFormula& outcome_formula) {
    require_estimable(dataset);
    require_covariate_only(outcome_formula);

    const int n = dataset.n();
    SndeResult result;
    result.method = SndeMethod::unweighted;
    const double a_bar = sample_mean_a(dataset);
    const DesignSpec spec = outcome_formula.design(0, dataset.l1_width());

    for (int stratum = 0; stratum <= 1; ++stratum) {
        SndeComponent& component = stratum == 0 ? result.upsilon0 : result.upsilon1;
        std::vector<int> rows;
        for (int i = 0; i < n; ++i) {
            if (dataset.records[i].r == static_cast<double>(stratum)) rows.push_back(i);
        }
        if (rows.empty()) {
            component.error = std::string(to_string(ErrorKind::empty_stratum)) +
                              ": no records with R=" + std::to_string(stratum);
            continue;
        }
        Eigen::MatrixXd x(rows.size(), spec.n_columns());
        Eigen::VectorXd y(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const TrialRecord& rec = dataset.records[rows[k]];
            x.row(k) = spec.row(rec.a, {}, rec.l1, 0.0);
            y(k) = rec.y;
        }
        FittedLinearModel m;
        try {
            m = ols_fit(x, y, spec);
        } catch (const HestError& e) {
            component.error = e.what();
            continue;
        }

        const double p_stratum = static_cast<double>(rows.size()) / n;
        double within = 0.0, standardized = 0.0, denominator = 0.0;
        for (int i = 0; i < n; ++i) {
            const TrialRecord& rec = dataset.records[i];
            const double fitted = ols_predict(m, rec.a, {}, rec.l1, 0.0);
            const double centred = rec.a - a_bar;
            if (rec.r == static_cast<double>(stratum)) within += centred * (rec.y - fitted);
            standardized += centred * fitted;
            denominator += centred * rec.a;
        }
        component = ratio_component(within + p_stratum * standardized, p_stratum * denominator);
        (stratum == 0 ? result.outcome_model_r0 : result.outcome_model_r1) = std::move(m);
    }
    return result;
}

}  // namespace hest
