#include "hest/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "hest/asymptotics.hpp"
#include "hest/dataset.hpp"
#include "hest/errors.hpp"
#include "hest/estimators.hpp"
#include "hest/report.hpp"
#include "hest/scenario.hpp"
#include "hest/simulator.hpp"
#include "hest/snde.hpp"

namespace hest {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

int exit_code_for(const HestError& e) {
    switch (e.kind()) {
        case ErrorKind::io_error:
        case ErrorKind::data_invalid:
            return kExitData;
        default:
            return kExitConfig;
    }
}

EstimatorName estimator_from_string(const std::string& token) {
    for (EstimatorName name : all_estimator_names()) {
        if (token == to_string(name)) {
            return name;
        }
    }
    throw HestError(ErrorKind::config_invalid, "unknown estimator '" + token + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            items.push_back(current);
            current.clear();
        } else if (c != ' ') {
            current += c;
        }
    }
    if (!current.empty()) {
        items.push_back(current);
    }
    return items;
}

struct SimulateConfig {
    std::string scenario_file;
    std::optional<double> pi0, pi1;
    std::optional<int> n, reps;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::string outcome_interaction = "none";
    std::string g2_interactions;
    std::string estimators = "gform_pre_unadj,gest_prepost_unadj,loh";
    std::string format = "csv";
    std::string out_path;
    std::string dump_path;
};

// Loads the scenario file (or a single default scenario) and applies the
// overrides the user actually passed on the command line.
std::vector<ScenarioParams> resolve_scenarios(const SimulateConfig& cfg, bool outcome_flag_given) {
    if (outcome_flag_given && cfg.outcome_interaction != "l1r" &&
        cfg.outcome_interaction != "none") {
        throw HestError(ErrorKind::config_invalid, "--outcome-interaction must be 'l1r' or 'none'");
    }
    std::vector<ScenarioParams> scenarios;
    if (!cfg.scenario_file.empty()) {
        std::ifstream in(cfg.scenario_file);
        if (!in) {
            throw HestError(ErrorKind::io_error,
                            "cannot open scenario file '" + cfg.scenario_file + "'");
        }
        scenarios = parse_scenario_file(in);
    } else {
        scenarios.push_back(ScenarioParams{});
    }
    for (ScenarioParams& s : scenarios) {
        if (cfg.pi0) s.pi0 = *cfg.pi0;
        if (cfg.pi1) s.pi1 = *cfg.pi1;
        if (cfg.n) s.n = *cfg.n;
        if (cfg.reps) s.n_reps = *cfg.reps;
        if (cfg.seed) s.seed = *cfg.seed;
        if (outcome_flag_given) {
            s.b_l1r = cfg.outcome_interaction == "l1r" ? 0.5 : 0.0;
        }
        s.validate();
    }
    return scenarios;
}

void write_output(const std::string& out_path, std::ostream& fallback,
                  const std::function<void(std::ostream&)>& writer) {
    if (out_path.empty()) {
        writer(fallback);
        return;
    }
    std::ofstream file(out_path);
    if (!file) {
        throw HestError(ErrorKind::io_error, "cannot open output file '" + out_path + "'");
    }
    writer(file);
    if (!file) {
        throw HestError(ErrorKind::io_error, "failed writing output file '" + out_path + "'");
    }
}

int run_simulate(const SimulateConfig& cfg, bool outcome_flag_given, std::ostream& out,
                 std::ostream& err) {
    const std::vector<ScenarioParams> scenarios = resolve_scenarios(cfg, outcome_flag_given);

    StudyOptions options;
    options.workers = cfg.workers;
    options.estimators.clear();
    for (const std::string& token : split_list(cfg.estimators)) {
        options.estimators.push_back(estimator_from_string(token));
    }
    for (const std::string& token : split_list(cfg.g2_interactions)) {
        if (token == "ar") {
            options.g2_inter_ar = true;
        } else if (token == "l0r") {
            options.g2_inter_l0r = true;
        } else if (token == "l1r") {
            options.g2_inter_l1r = true;
        } else {
            throw HestError(ErrorKind::config_invalid,
                            "unknown g2 interaction '" + token + "' (expect ar, l0r, l1r)");
        }
    }

    std::vector<ReplicateOutcome> dump;
    std::vector<ReplicateOutcome> all_dumped;
    std::vector<SimulationSummary> summaries;
    for (const ScenarioParams& s : scenarios) {
        StudyOptions per_run = options;
        if (!cfg.dump_path.empty()) {
            per_run.dump = &dump;
        }
        summaries.push_back(run_study(s, per_run));
        if (!cfg.dump_path.empty()) {
            all_dumped.insert(all_dumped.end(), dump.begin(), dump.end());
        }
    }

    const std::uint64_t master_seed = scenarios.front().seed;
    const int workers_used = cfg.workers;
    if (cfg.format == "csv") {
        write_output(cfg.out_path, out, [&](std::ostream& os) {
            write_summary_csv(os, summaries, master_seed);
        });
        // The worker count is part of the resolved configuration but must not
        // enter the CSV bytes, which are worker-invariant by contract.
        err << "# workers=" << workers_used << "\n";
    } else if (cfg.format == "md") {
        write_output(cfg.out_path, out, [&](std::ostream& os) {
            write_summary_markdown(os, summaries, master_seed, workers_used);
        });
    } else {
        throw HestError(ErrorKind::config_invalid, "--format must be 'csv' or 'md'");
    }

    if (!cfg.dump_path.empty()) {
        write_output(cfg.dump_path, out, [&](std::ostream& os) {
            write_replicate_csv(os, all_dumped);
        });
    }
    return kExitOk;
}

void print_estimate_row(std::ostream& out, const std::string& label, bool ok, double value,
                        const std::string& note, const std::string& error) {
    out << std::left << std::setw(22) << label << std::right;
    if (ok) {
        out << std::setw(10) << round3(value) << "   (" << full_precision(value) << ")";
        if (!note.empty()) {
            out << "   [" << note << "]";
        }
    } else {
        out << "    failed: " << error;
    }
    out << "\n";
}

int run_estimate(const std::string& data_path, bool with_snde, std::ostream& out,
                 std::ostream& err) {
    std::ifstream in(data_path);
    if (!in) {
        throw HestError(ErrorKind::io_error, "cannot open data file '" + data_path + "'");
    }
    const TrialDataset dataset = read_patient_csv(in);
    const std::vector<Violation> violations = validate(dataset);
    if (!violations.empty()) {
        for (const Violation& v : violations) {
            if (v.record_index < 0) {
                err << "invalid dataset: " << v.reason << "\n";
            } else {
                err << "invalid record " << v.record_index << ": " << v.reason << "\n";
            }
        }
        return kExitData;
    }

    out << "records: " << dataset.n() << " (arm 1: " << dataset.n1() << ", arm 0: " << dataset.n0()
        << ")\n";
    try {
        const PositivityReport report = positivity_check(dataset);
        out << "positivity: min fitted event-free probability = " << full_precision(report.min_fitted_no_ice_prob)
            << " (threshold " << full_precision(report.threshold) << "); flagged records: ";
        if (report.flagged_record_indices.empty()) {
            out << "none\n";
        } else {
            out << report.flagged_record_indices.size() << " (";
            for (std::size_t i = 0; i < report.flagged_record_indices.size(); ++i) {
                if (i > 0) out << ", ";
                out << report.flagged_record_indices[i];
            }
            out << ")\n";
        }
    } catch (const HestError& e) {
        out << "positivity: indeterminable (" << e.what() << ")\n";
    }

    out << "\nestimator             delta_hat\n";
    const FormulaBundle formulas = FormulaBundle::defaults(dataset);
    for (const NamedEstimate& est : run_all_estimators(dataset, formulas)) {
        std::string note;
        if (est.result && est.result->p_column_dropped) {
            note = "fitted-probability column dropped (collinear)";
        }
        print_estimate_row(out, to_string(est.name), est.result.has_value(),
                           est.result ? est.result->delta_hat : 0.0, note, est.error);
    }

    if (with_snde) {
        out << "\ndirect-effect components\n";
        const ModelFormula covariate_only = ModelFormula::event_free(false);
        for (SndeMethod method : {SndeMethod::ipw, SndeMethod::unweighted}) {
            SndeResult result;
            try {
                result = method == SndeMethod::ipw ? snde_ipw(dataset, covariate_only)
                                                   : snde_unweighted(dataset, covariate_only);
            } catch (const HestError& e) {
                out << std::left << std::setw(22) << (std::string("snde_") + to_string(method))
                    << std::right << "    failed: " << e.what() << "\n";
                continue;
            }
            const std::string base = std::string("snde_") + to_string(method);
            print_estimate_row(out, base + " u0", result.upsilon0.ok, result.upsilon0.value,
                               result.unit_weights_fallback ? "unit weights" : "",
                               result.upsilon0.error);
            print_estimate_row(out, base + " u1", result.upsilon1.ok, result.upsilon1.value,
                               result.unit_weights_fallback ? "unit weights" : "",
                               result.upsilon1.error);
        }
    }
    return kExitOk;
}

int run_asymptotics(const SimulateConfig& cfg, bool outcome_flag_given, std::ostream& out) {
    for (const ScenarioParams& s : resolve_scenarios(cfg, outcome_flag_given)) {
        const AsymptoticInputs inputs = parametric_inputs(s);
        const double pre = avar_pre(inputs);
        const double prepost = avar_prepost(inputs);
        out << "scenario: " << s.name << "\n";
        out << "  p_r0 = " << full_precision(inputs.p_r0) << "\n";
        out << "  tau_diff = " << full_precision(inputs.tau_diff) << "\n";
        out << "  sigma2 = " << full_precision(inputs.sigma2) << "\n";
        out << "  beta_l1 = " << full_precision(inputs.beta_l1) << "\n";
        for (int r = 0; r < 2; ++r) {
            out << "  var_a_given_r" << r << " = " << full_precision(inputs.var_a_given_r[r])
                << "\n";
            out << "  var_l1_given_r" << r << " = " << full_precision(inputs.var_l1_given_r[r])
                << "\n";
            out << "  cov_a_l1_given_r" << r << " = " << full_precision(inputs.cov_a_l1_given_r[r])
                << "\n";
        }
        for (int a = 0; a < 2; ++a) {
            out << "  var_l1_given_a" << a << " = " << full_precision(inputs.var_l1_given_a[a])
                << "\n";
        }
        out << "  avar_pre = " << full_precision(pre) << "\n";
        out << "  avar_prepost = " << full_precision(prepost) << "\n";
        out << "  asy_se_pre (n=" << s.n << ") = " << full_precision(std::sqrt(pre / s.n)) << "\n";
        out << "  asy_se_prepost (n=" << s.n << ") = " << full_precision(std::sqrt(prepost / s.n))
            << "\n";
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"hypothetical-estimand estimators, asymptotics, and simulation studies"};
    app.require_subcommand(1);

    SimulateConfig cfg;
    double pi0_value = 0.0, pi1_value = 0.0;
    int n_value = 0, reps_value = 0;
    std::uint64_t seed_value = 0;

    auto add_scenario_flags = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", cfg.scenario_file, "scenario file ([scenario] blocks)");
        cmd->add_option("--pi0", pi0_value, "P(R=0 | A=0) override");
        cmd->add_option("--pi1", pi1_value, "P(R=0 | A=1) override");
        cmd->add_option("--n", n_value, "records per replicate override");
        cmd->add_option("--reps", reps_value, "replicates override");
        cmd->add_option("--seed", seed_value, "master seed override");
        cmd->add_option("--outcome-interaction", cfg.outcome_interaction,
                        "outcome L1*R interaction: 'l1r' (coefficient 0.5) or 'none'");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo study");
    add_scenario_flags(simulate);
    simulate->add_option("--workers", cfg.workers, "worker threads (0 = all available)");
    simulate->add_option("--g2-interactions", cfg.g2_interactions,
                         "comma list of all-records-model interactions: ar,l0r,l1r");
    simulate->add_option("--estimators", cfg.estimators, "comma list of estimators to run");
    simulate->add_option("--format", cfg.format, "output format: csv or md");
    simulate->add_option("--out", cfg.out_path, "output path (default: stdout)");
    simulate->add_option("--dump-replicates", cfg.dump_path, "per-replicate estimates CSV path");

    CLI::App* estimate = app.add_subcommand("estimate", "analyze one patient-level CSV");
    std::string data_path;
    bool with_snde = false;
    estimate->add_option("data", data_path, "patient CSV path")->required();
    estimate->add_flag("--snde", with_snde, "also report direct-effect components");

    CLI::App* asymptotics = app.add_subcommand("asymptotics", "print closed-form variances");
    add_scenario_flags(asymptotics);

    CLI::App* power = app.add_subcommand("power", "power of the all-records analysis");
    double p_arg = 0.0, p_r0_arg = 0.0, alpha_arg = 0.05;
    power->add_option("--p", p_arg, "power of the event-free analysis")->required();
    power->add_option("--p-r0", p_r0_arg, "probability of remaining event-free")->required();
    power->add_option("--alpha", alpha_arg, "two-sided significance level");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (simulate->count("--pi0") || asymptotics->count("--pi0")) cfg.pi0 = pi0_value;
    if (simulate->count("--pi1") || asymptotics->count("--pi1")) cfg.pi1 = pi1_value;
    if (simulate->count("--n") || asymptotics->count("--n")) cfg.n = n_value;
    if (simulate->count("--reps") || asymptotics->count("--reps")) cfg.reps = reps_value;
    if (simulate->count("--seed") || asymptotics->count("--seed")) cfg.seed = seed_value;
    const bool outcome_flag_given =
        simulate->count("--outcome-interaction") > 0 || asymptotics->count("--outcome-interaction") > 0;

    try {
        if (simulate->parsed()) {
            return run_simulate(cfg, outcome_flag_given, out, err);
        }
        if (estimate->parsed()) {
            return run_estimate(data_path, with_snde, out, err);
        }
        if (asymptotics->parsed()) {
            return run_asymptotics(cfg, outcome_flag_given, out);
        }
        if (power->parsed()) {
            out << round3(power_prepost(p_arg, p_r0_arg, alpha_arg)) << "\n";
            return kExitOk;
        }
    } catch (const HestError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    err << "error: no subcommand given\n";
    return kExitConfig;
}

}  // namespace hest
