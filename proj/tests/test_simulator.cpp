#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "hest/asymptotics.hpp"
#include "hest/errors.hpp"
#include "hest/estimators.hpp"
#include "hest/simulator.hpp"

using hest::ErrorKind;
using hest::EstimatorName;
using hest::HestError;
using hest::ReplicateOutcome;
using hest::ScenarioParams;
using hest::SimulationSummary;
using hest::StudyOptions;
using hest::TrialDataset;

namespace {

ErrorKind kind_of(const std::function<void()>& call) {
    try {
        call();
    } catch (const HestError& e) {
        return e.kind();
    }
    throw std::runtime_error("expected a classified failure");
}

bool identical_datasets(const TrialDataset& a, const TrialDataset& b) {
    if (a.n() != b.n()) return false;
    for (int i = 0; i < a.n(); ++i) {
        if (a.records[i].a != b.records[i].a) return false;
        if (a.records[i].l0 != b.records[i].l0) return false;
        if (a.records[i].l1 != b.records[i].l1) return false;
        if (a.records[i].r != b.records[i].r) return false;
        if (a.records[i].y != b.records[i].y) return false;
    }
    return true;
}

bool identical_summaries(const SimulationSummary& a, const SimulationSummary& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].name != b.rows[i].name) return false;
        if (a.rows[i].mean_delta != b.rows[i].mean_delta) return false;
        if (a.rows[i].bias != b.rows[i].bias) return false;
        if (a.rows[i].empirical_se != b.rows[i].empirical_se) return false;
        if (a.rows[i].mcse_bias != b.rows[i].mcse_bias) return false;
        if (a.rows[i].n_failures != b.rows[i].n_failures) return false;
    }
    return a.asy_se_pre == b.asy_se_pre && a.asy_se_prepost == b.asy_se_prepost &&
           a.true_delta_value == b.true_delta_value;
}

}  // namespace

TEST_CASE("the generating process identifies the event-free contrast") {
    // with the event held off, the arm contrast flows through b_a directly
    // and through L1, whose between-arm mean gap is lambda_a plus the event
    // pathway lambda_r * (pi0 - pi1) inherited from the observed-arm mix
    ScenarioParams params;  // pi = (0.4, 0.5), unit coefficients
    CHECK(hest::true_delta(params) == doctest::Approx(1.9).epsilon(1e-15));

    params.b_l1r = 0.5;  // the event's own pathways do not enter
    params.b_r = -2.0;
    CHECK(hest::true_delta(params) == doctest::Approx(1.9).epsilon(1e-15));

    for (double pi0 : {0.5, 0.6, 0.7, 0.8}) {
        params.pi0 = pi0;
        params.pi1 = pi0 + 0.1;
        CHECK(hest::true_delta(params) == doctest::Approx(1.9).epsilon(1e-15));
    }

    ScenarioParams equal_rates;
    equal_rates.pi0 = equal_rates.pi1 = 0.6;
    CHECK(hest::true_delta(equal_rates) == doctest::Approx(2.0).epsilon(1e-15));

    ScenarioParams bespoke;
    bespoke.pi0 = 0.35;
    bespoke.pi1 = 0.6;
    bespoke.b_a = 2.0;
    bespoke.b_l1 = 0.5;
    bespoke.lambda_a = 0.8;
    bespoke.lambda_r = 1.3;
    CHECK(hest::true_delta(bespoke) ==
          doctest::Approx(2.0 + 0.5 * (0.8 + 1.3 * -0.25)).epsilon(1e-15));

    ScenarioParams null_effect;
    null_effect.b_a = 0.0;
    null_effect.b_l1 = 0.0;
    CHECK(hest::true_delta(null_effect) == 0.0);
}

TEST_CASE("replicate draws are deterministic in (seed, replicate, record)") {
    ScenarioParams params;
    params.n = 50;
    params.seed = 42;

    const TrialDataset first = hest::generate_dataset(params, 7);
    const TrialDataset again = hest::generate_dataset(params, 7);
    CHECK(identical_datasets(first, again));
    CHECK(first.n() == 50);
    CHECK(first.l0_width() == 0);
    CHECK(first.l1_width() == 1);
    CHECK(hest::validate(first).empty());

    const TrialDataset other_rep = hest::generate_dataset(params, 8);
    CHECK_FALSE(identical_datasets(first, other_rep));

    ScenarioParams other_seed = params;
    other_seed.seed = 43;
    CHECK_FALSE(identical_datasets(first, hest::generate_dataset(other_seed, 7)));

    // the upper half of the seed participates in the stream key
    ScenarioParams high_seed = params;
    high_seed.seed = 42 + (1ull << 32);
    CHECK_FALSE(identical_datasets(first, hest::generate_dataset(high_seed, 7)));
}

TEST_CASE("simulated marginals follow the scenario parameters") {
    ScenarioParams params;  // pi = (0.4, 0.5), unit coefficients
    params.n = 25000;
    params.seed = 777;

    double n_total = 0, n_a1 = 0;
    double n_r0_a0 = 0, n_a0 = 0, n_r0_a1 = 0;
    double sum_l1_a1r1 = 0, sumsq_l1_a1r1 = 0, n_a1r1 = 0;
    double sum_y_a0r0 = 0, sumsq_y_a0r0 = 0, n_a0r0 = 0;
    for (std::uint32_t rep = 0; rep < 8; ++rep) {
        const TrialDataset data = hest::generate_dataset(params, rep);
        for (const auto& rec : data.records) {
            n_total += 1;
            if (rec.a == 1.0) {
                n_a1 += 1;
                if (rec.r == 0.0) n_r0_a1 += 1;
                if (rec.r == 1.0) {
                    n_a1r1 += 1;
                    sum_l1_a1r1 += rec.l1[0];
                    sumsq_l1_a1r1 += rec.l1[0] * rec.l1[0];
                }
            } else {
                n_a0 += 1;
                if (rec.r == 0.0) n_r0_a0 += 1;
                if (rec.r == 0.0) {
                    n_a0r0 += 1;
                    sum_y_a0r0 += rec.y;
                    sumsq_y_a0r0 += rec.y * rec.y;
                }
            }
        }
    }

    const auto check_proportion = [](double count, double total, double expected) {
        const double p = count / total;
        const double se = std::sqrt(expected * (1.0 - expected) / total);
        INFO("proportion " << p << " expected " << expected << " se " << se);
        CHECK(std::fabs(p - expected) < 3.0 * se);
    };
    check_proportion(n_a1, n_total, 0.5);
    check_proportion(n_r0_a0, n_a0, 0.4);   // P(R=0 | A=0) = pi0
    check_proportion(n_r0_a1, n_a1, 0.5);   // P(R=0 | A=1) = pi1

    const auto check_mean = [](double sum, double sumsq, double count, double expected) {
        const double mean = sum / count;
        const double var = (sumsq - count * mean * mean) / (count - 1);
        const double se = std::sqrt(var / count);
        INFO("mean " << mean << " expected " << expected << " se " << se);
        CHECK(std::fabs(mean - expected) < 3.0 * se);
    };
    // E(L1 | A=1, R=1) = lambda0 + lambda_a + lambda_r = 2
    check_mean(sum_l1_a1r1, sumsq_l1_a1r1, n_a1r1, 2.0);
    // E(Y | A=0, R=0) = b0 + b_l1 * lambda0 = 0
    check_mean(sum_y_a0r0, sumsq_y_a0r0, n_a0r0, 0.0);
}

TEST_CASE("two-replicate study reduces to the pairwise spread") {
    ScenarioParams params;
    params.n = 120;
    params.n_reps = 2;
    params.seed = 31;
    StudyOptions options;
    options.estimators = {EstimatorName::gform_pre_unadj};
    options.force_serial = true;

    const hest::ModelFormula g1 = hest::ModelFormula::event_free(false);
    const double d0 = hest::estimate_gform_pre_unadj(hest::generate_dataset(params, 0), g1).delta_hat;
    const double d1 = hest::estimate_gform_pre_unadj(hest::generate_dataset(params, 1), g1).delta_hat;

    const SimulationSummary summary = hest::run_study(params, options);
    REQUIRE(summary.rows.size() == 1);
    const auto& row = summary.rows[0];
    CHECK(row.n_failures == 0);
    CHECK(row.mean_delta == doctest::Approx(0.5 * (d0 + d1)).epsilon(1e-14));
    CHECK(row.empirical_se ==
          doctest::Approx(std::fabs(d0 - d1) / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(row.bias == doctest::Approx(row.mean_delta - 1.9).epsilon(1e-12));
    CHECK(row.mcse_bias == doctest::Approx(row.empirical_se / std::sqrt(2.0)).epsilon(1e-12));

    CHECK(summary.true_delta_value == hest::true_delta(params));
    const hest::AsymptoticInputs inputs = hest::parametric_inputs(params);
    CHECK(summary.asy_se_pre == std::sqrt(hest::avar_pre(inputs) / params.n));
    CHECK(summary.asy_se_prepost == std::sqrt(hest::avar_prepost(inputs) / params.n));
}

TEST_CASE("summaries are identical for any execution plan") {
    ScenarioParams params;
    params.n = 80;
    params.n_reps = 60;
    params.seed = 99;
    StudyOptions serial;
    serial.estimators = hest::all_estimator_names();
    serial.force_serial = true;

    const SimulationSummary reference = hest::run_study(params, serial);

    StudyOptions parallel = serial;
    parallel.force_serial = false;
    parallel.workers = 0;  // all available
    CHECK(identical_summaries(reference, hest::run_study(params, parallel)));

    parallel.workers = 3;  // oversubscription must not change a single bit
    CHECK(identical_summaries(reference, hest::run_study(params, parallel)));
}

TEST_CASE("failed replicates are counted without poisoning the aggregate") {
    // six-patient samples with frequent events often leave the event-free
    // fit underdetermined, so a fair share of replicates must fail
    ScenarioParams params;
    params.n = 6;
    params.pi0 = 0.3;
    params.pi1 = 0.3;
    params.n_reps = 300;
    params.seed = 555;
    StudyOptions options;
    options.estimators = {EstimatorName::gform_pre_unadj};
    options.force_serial = true;

    std::vector<ReplicateOutcome> dump;
    options.dump = &dump;
    const SimulationSummary summary = hest::run_study(params, options);
    const auto& row = summary.rows[0];
    CHECK(row.n_failures > 0);
    CHECK(row.n_failures < 300);
    CHECK(std::isfinite(row.mean_delta));
    CHECK(std::isfinite(row.empirical_se));

    int dump_failures = 0;
    for (const auto& outcome : dump) {
        if (!outcome.ok) {
            ++dump_failures;
            CHECK_FALSE(outcome.error.empty());
        }
    }
    CHECK(dump_failures == row.n_failures);
}

TEST_CASE("the replicate dump is laid out replicate-major and matches the summary") {
    ScenarioParams params;
    params.n = 60;
    params.n_reps = 4;
    params.seed = 7;
    StudyOptions options;
    options.estimators = {EstimatorName::gform_pre_unadj, EstimatorName::loh};
    options.force_serial = true;

    std::vector<ReplicateOutcome> dump;
    dump.push_back({});  // stale content must be discarded
    options.dump = &dump;
    const SimulationSummary summary = hest::run_study(params, options);

    REQUIRE(dump.size() == 8);
    for (int k = 0; k < 8; ++k) {
        CHECK(dump[k].replicate == k / 2);
        CHECK(dump[k].estimator == options.estimators[k % 2]);
    }

    for (int e = 0; e < 2; ++e) {
        double sum = 0.0;
        int successes = 0;
        for (int rep = 0; rep < 4; ++rep) {
            const auto& outcome = dump[2 * rep + e];
            if (outcome.ok) {
                sum += outcome.delta_hat;
                ++successes;
            }
        }
        REQUIRE(successes > 0);
        CHECK(summary.rows[e].mean_delta == doctest::Approx(sum / successes).epsilon(1e-14));
        CHECK(summary.rows[e].n_failures == 4 - successes);
    }
}

TEST_CASE("study configuration errors are classified") {
    ScenarioParams params;
    params.n = 40;
    params.n_reps = 1;
    StudyOptions options;
    options.force_serial = true;
    CHECK(kind_of([&] { hest::run_study(params, options); }) == ErrorKind::config_invalid);

    params.n_reps = 10;
    options.estimators.clear();
    CHECK(kind_of([&] { hest::run_study(params, options); }) == ErrorKind::config_invalid);

    options.estimators = {EstimatorName::imp_unadj};
    params.pi0 = 0.0;
    CHECK(kind_of([&] { hest::run_study(params, options); }) == ErrorKind::config_invalid);
}

TEST_CASE("requested estimator order is preserved in the summary") {
    ScenarioParams params;
    params.n = 60;
    params.n_reps = 3;
    StudyOptions options;
    options.estimators = {EstimatorName::loh, EstimatorName::imp_adj,
                          EstimatorName::gest_prepost_unadj};
    options.force_serial = true;
    const SimulationSummary summary = hest::run_study(params, options);
    REQUIRE(summary.rows.size() == 3);
    CHECK(summary.rows[0].name == EstimatorName::loh);
    CHECK(summary.rows[1].name == EstimatorName::imp_adj);
    CHECK(summary.rows[2].name == EstimatorName::gest_prepost_unadj);
}
