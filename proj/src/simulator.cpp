#include "hest/simulator.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hest/asymptotics.hpp"
#include "hest/normal.hpp"
#include "hest/rng.hpp"

namespace hest {

double true_delta(const ScenarioParams& params) {
    return params.b_a +
           params.b_l1 * (params.lambda_a + params.lambda_r * (params.pi0 - params.pi1));
}

TrialDataset generate_dataset(const ScenarioParams& params, std::uint32_t replicate_index) {
    TrialDataset dataset;
    dataset.records.reserve(params.n);
    const double sd_l1 = std::sqrt(params.sigma2_l1);
    const double sd_y = std::sqrt(params.sigma2_y);
    for (int i = 0; i < params.n; ++i) {
        const auto u = record_uniforms(params.seed, replicate_index, static_cast<std::uint32_t>(i));
        TrialRecord rec;
        rec.a = u[0] < 0.5 ? 1.0 : 0.0;
        const double pi_a = rec.a == 1.0 ? params.pi1 : params.pi0;
        rec.r = u[1] >= pi_a ? 1.0 : 0.0;  // P(R=0 | A=a) = pi_a
        const double l1 = params.lambda0 + params.lambda_a * rec.a + params.lambda_r * rec.r +
                          sd_l1 * normal_quantile(u[2]);
        rec.l1.push_back(l1);
        rec.y = params.b0 + params.b_a * rec.a + params.b_l1 * l1 + params.b_r * rec.r +
                params.b_l1r * l1 * rec.r + sd_y * normal_quantile(u[3]);
        dataset.records.push_back(std::move(rec));
    }
    return dataset;
}

namespace {

struct ReplicateSlot {
    std::vector<double> delta;     // per estimator
    std::vector<std::uint8_t> ok;  // per estimator
    std::vector<std::string> error;
};

void run_one_replicate(const ScenarioParams& params, const StudyOptions& options,
                       const FormulaBundle& formulas, int replicate, ReplicateSlot& slot) {
    const TrialDataset dataset = generate_dataset(params, static_cast<std::uint32_t>(replicate));
    const std::size_t n_est = options.estimators.size();
    slot.delta.assign(n_est, 0.0);
    slot.ok.assign(n_est, 0);
    slot.error.assign(n_est, "");
    for (std::size_t e = 0; e < n_est; ++e) {
        try {
            EstimateResult result;
            switch (options.estimators[e]) {
                case EstimatorName::imp_unadj:
                    result = estimate_imp_unadj(dataset, formulas.g1);
                    break;
                case EstimatorName::imp_adj:
                    result = estimate_imp_adj(dataset, formulas.g1);
                    break;
                case EstimatorName::gform_pre_unadj:
                    result = estimate_gform_pre_unadj(dataset, formulas.g1);
                    break;
                case EstimatorName::gform_pre_adj:
                    result = estimate_gform_pre_adj(dataset, formulas.g1);
                    break;
                case EstimatorName::gform_prepost_unadj:
                    result = estimate_gform_prepost_unadj(dataset, formulas.g2);
                    break;
                case EstimatorName::gform_prepost_adj:
                    result = estimate_gform_prepost_adj(dataset, formulas.g2);
                    break;
                case EstimatorName::gest_prepost_unadj:
                    result = estimate_gest_prepost_unadj(dataset, formulas.g2);
                    break;
                case EstimatorName::gest_prepost_adj:
                    result = estimate_gest_prepost_adj(dataset, formulas.g2);
                    break;
                case EstimatorName::loh:
                    result = estimate_loh(dataset, formulas.g3, formulas.propensity);
                    break;
            }
            slot.delta[e] = result.delta_hat;
            slot.ok[e] = 1;
        } catch (const std::exception& ex) {
            slot.error[e] = ex.what();
        }
    }
}

}  // namespace

SimulationSummary run_study(const ScenarioParams& params, const StudyOptions& options) {
    params.validate();
    if (options.estimators.empty()) {
        throw HestError(ErrorKind::config_invalid, "no estimators requested");
    }
    if (params.n_reps < 2) {
        throw HestError(ErrorKind::config_invalid, "a study needs at least 2 replicates");
    }

    FormulaBundle formulas;
    formulas.g1 = ModelFormula::event_free(false);
    formulas.g2 = ModelFormula::all_records_model(false, options.g2_inter_ar, options.g2_inter_l0r,
                                                  options.g2_inter_l1r);
    formulas.g3 = ModelFormula::all_records_model(false);
    formulas.propensity = ModelFormula::event_free(false);

    const int n_reps = params.n_reps;
    std::vector<ReplicateSlot> slots(n_reps);

    if (options.force_serial) {
        for (int rep = 0; rep < n_reps; ++rep) {
            run_one_replicate(params, options, formulas, rep, slots[rep]);
        }
    } else {
#ifdef _OPENMP
        const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers)
#endif
        for (int rep = 0; rep < n_reps; ++rep) {
            run_one_replicate(params, options, formulas, rep, slots[rep]);
        }
    }

    SimulationSummary summary;
    summary.scenario = params;
    summary.true_delta_value = true_delta(params);
    const AsymptoticInputs inputs = parametric_inputs(params);
    summary.asy_se_pre = std::sqrt(avar_pre(inputs) / params.n);
    summary.asy_se_prepost = std::sqrt(avar_prepost(inputs) / params.n);

    // serial aggregation in replicate order, independent of execution order
    for (std::size_t e = 0; e < options.estimators.size(); ++e) {
        EstimatorSummaryRow row;
        row.name = options.estimators[e];
        double sum = 0.0;
        int successes = 0;
        for (int rep = 0; rep < n_reps; ++rep) {
            if (slots[rep].ok[e]) {
                sum += slots[rep].delta[e];
                ++successes;
            } else {
                ++row.n_failures;
            }
        }
        if (successes > 0) {
            row.mean_delta = sum / successes;
            double ss = 0.0;
            for (int rep = 0; rep < n_reps; ++rep) {
                if (slots[rep].ok[e]) {
                    const double d = slots[rep].delta[e] - row.mean_delta;
                    ss += d * d;
                }
            }
            row.bias = row.mean_delta - summary.true_delta_value;
            row.empirical_se = successes > 1 ? std::sqrt(ss / (successes - 1)) : 0.0;
            row.mcse_bias = row.empirical_se / std::sqrt(static_cast<double>(successes));
        }
        summary.rows.push_back(row);
    }

    if (options.dump != nullptr) {
        options.dump->clear();
        for (int rep = 0; rep < n_reps; ++rep) {
            for (std::size_t e = 0; e < options.estimators.size(); ++e) {
                ReplicateOutcome out;
                out.replicate = rep;
                out.estimator = options.estimators[e];
                out.ok = slots[rep].ok[e] != 0;
                out.delta_hat = slots[rep].delta[e];
                out.error = slots[rep].error[e];
                options.dump->push_back(std::move(out));
            }
        }
    }
    return summary;
}

}  // namespace hest
