#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hest/cli.hpp"
#include "hest/report.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    CliRun result;
    result.code = hest::run_cli(args, out, err);
    result.out = out.str();
    result.err = err.str();
    return result;
}

// scratch file that cleans up after itself
class TempFile {
  public:
    explicit TempFile(const std::string& stem) {
        path_ = (fs::temp_directory_path() / ("hest_test_" + stem)).string();
    }
    ~TempFile() {
        std::error_code ec;
        fs::remove(path_, ec);
    }
    const std::string& path() const { return path_; }
    void write(const std::string& content) const {
        std::ofstream out(path_);
        out << content;
    }
    std::string read() const {
        std::ifstream in(path_);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }

  private:
    std::string path_;
};

const char* kSixRecordCsv =
    "a,l1_1,r,y\n"
    "1,1,0,3\n"
    "1,2,0,4\n"
    "1,2,1,4\n"
    "0,0,0,1\n"
    "0,1,0,2\n"
    "0,1,1,2\n";

double value_after(const std::string& text, const std::string& marker) {
    const auto pos = text.find(marker);
    REQUIRE(pos != std::string::npos);
    return std::strtod(text.c_str() + pos + marker.size(), nullptr);
}

}  // namespace

TEST_CASE("power subcommand prints the three-decimal projection") {
    const CliRun first = run({"power", "--p", "0.8", "--p-r0", "0.7"});
    CHECK(first.code == 0);
    CHECK(first.out == "0.918\n");

    const CliRun second = run({"power", "--p", "0.8", "--p-r0", "0.85"});
    CHECK(second.code == 0);
    CHECK(second.out == "0.860\n");

    // out-of-domain arguments are configuration errors
    CHECK(run({"power", "--p", "1.5", "--p-r0", "0.7"}).code == 2);
}

TEST_CASE("argument errors exit with the configuration code") {
    CHECK(run({}).code == 2);
    CHECK(run({"power", "--p", "0.8"}).code == 2);          // missing required flag
    CHECK(run({"power", "--p", "0.8", "--p-r0", "0.7", "--bogus"}).code == 2);
    CHECK(run({"unknown-subcommand"}).code == 2);

    const CliRun help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
    CHECK(help.out.find("estimate") != std::string::npos);
}

TEST_CASE("estimate analyzes a patient CSV and reports every estimator") {
    TempFile data("six_records.csv");
    data.write(kSixRecordCsv);

    const CliRun result = run({"estimate", data.path()});
    CHECK(result.code == 0);
    CHECK(result.out.find("records: 6 (arm 1: 3, arm 0: 3)") != std::string::npos);
    CHECK(result.out.find("positivity:") != std::string::npos);

    // on this dataset every estimator recovers the same contrast
    for (const char* name :
         {"imp_unadj", "imp_adj", "gform_pre_unadj", "gform_pre_adj", "gform_prepost_unadj",
          "gform_prepost_adj", "gest_prepost_unadj", "gest_prepost_adj", "loh"}) {
        const auto pos = result.out.find(name);
        REQUIRE(pos != std::string::npos);
        const auto line_end = result.out.find('\n', pos);
        const std::string line = result.out.substr(pos, line_end - pos);
        INFO(line);
        CHECK(line.find("2.000") != std::string::npos);
    }
    CHECK(result.out.find("fitted-probability column dropped") != std::string::npos);
}

TEST_CASE("estimate with direct-effect components") {
    TempFile data("six_records_snde.csv");
    data.write(kSixRecordCsv);

    const CliRun result = run({"estimate", data.path(), "--snde"});
    CHECK(result.code == 0);
    CHECK(result.out.find("direct-effect components") != std::string::npos);
    // the weighted method converges on the likelihood plateau; both of its
    // components solve to exactly 2 on this fixture
    CHECK(result.out.find("snde_ipw u0") != std::string::npos);
    CHECK(result.out.find("snde_ipw u1") != std::string::npos);
    // the unweighted first component is computable; the second has only two
    // post-event records for a three-parameter stratum model
    CHECK(result.out.find("snde_unweighted u0") != std::string::npos);
    CHECK(result.out.find("snde_unweighted u1") != std::string::npos);
    CHECK(result.out.find("rank_deficient") != std::string::npos);
}

TEST_CASE("estimate data errors exit with the data code") {
    CHECK(run({"estimate", "/nonexistent/file.csv"}).code == 3);

    TempFile bad_header("bad_header.csv");
    bad_header.write("x,y,z\n1,2,3\n");
    CHECK(run({"estimate", bad_header.path()}).code == 3);

    TempFile bad_record("bad_record.csv");
    bad_record.write("a,l1_1,r,y\n1,1,2,3\n0,1,0,2\n");  // r=2 violates the domain
    const CliRun result = run({"estimate", bad_record.path()});
    CHECK(result.code == 3);
    CHECK(result.err.find("invalid record") != std::string::npos);
}

TEST_CASE("simulate writes a parseable summary and echoes workers out of band") {
    const CliRun result = run({"simulate", "--pi0", "0.4", "--pi1", "0.5", "--n", "60", "--reps",
                               "10", "--seed", "99", "--workers", "1"});
    REQUIRE(result.code == 0);
    CHECK(result.err.find("# workers=1") != std::string::npos);
    CHECK(result.out.find("# master_seed=99") != std::string::npos);
    CHECK(result.out.find("workers") == std::string::npos);

    std::istringstream in(result.out);
    const std::vector<hest::SummaryCsvRow> rows = hest::parse_summary_csv(in);
    REQUIRE(rows.size() == 3);  // default estimator set
    CHECK(rows[0].estimator == "gform_pre_unadj");
    CHECK(rows[1].estimator == "gest_prepost_unadj");
    CHECK(rows[2].estimator == "loh");
    for (const auto& row : rows) {
        CHECK(row.scenario == "scenario");
        CHECK(row.n == 60);
        CHECK(row.n_reps == 10);
        CHECK(row.seed == 99u);
        CHECK(row.true_delta == doctest::Approx(1.9).epsilon(1e-12));
    }
}

TEST_CASE("simulate summary bytes do not depend on the worker count") {
    const std::vector<std::string> base = {"simulate", "--pi0", "0.4", "--pi1", "0.5",
                                           "--n",      "50",    "--reps", "8",  "--seed", "7"};
    std::vector<std::string> one = base;
    one.insert(one.end(), {"--workers", "1"});
    std::vector<std::string> three = base;
    three.insert(three.end(), {"--workers", "3"});

    const CliRun first = run(one);
    const CliRun second = run(three);
    REQUIRE(first.code == 0);
    REQUIRE(second.code == 0);
    CHECK(first.out == second.out);
    CHECK(first.err != second.err);  // the echo shows the differing worker count
}

TEST_CASE("simulate supports markdown, file output, and replicate dumps") {
    const CliRun md = run({"simulate", "--n", "50", "--reps", "6", "--seed", "3", "--format", "md",
                           "--workers", "2"});
    REQUIRE(md.code == 0);
    CHECK(md.out.find("# Simulation summary") != std::string::npos);
    CHECK(md.out.find("- workers: 2") != std::string::npos);
    CHECK(md.out.find("| scenario |") != std::string::npos);

    TempFile out_file("summary.csv");
    TempFile dump_file("replicates.csv");
    const CliRun filed = run({"simulate", "--n", "50", "--reps", "6", "--seed", "3",
                              "--estimators", "imp_unadj", "--out", out_file.path(),
                              "--dump-replicates", dump_file.path()});
    REQUIRE(filed.code == 0);
    CHECK(filed.out.empty());

    std::istringstream in(out_file.read());
    const std::vector<hest::SummaryCsvRow> rows = hest::parse_summary_csv(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].estimator == "imp_unadj");

    const std::string dump = dump_file.read();
    CHECK(dump.find("replicate,estimator,delta_hat,status") == 0);
    int lines = 0;
    for (char c : dump) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 7);  // header + one row per replicate
}

TEST_CASE("simulate runs every scenario block of a file with overrides applied") {
    TempFile scenario_file("two_blocks.txt");
    scenario_file.write(
        "[scenario]\n"
        "name = alpha\n"
        "pi0 = 0.5\n"
        "pi1 = 0.6\n"
        "seed = 11\n"
        "[scenario]\n"
        "name = beta\n"
        "pi0 = 0.7\n"
        "pi1 = 0.8\n"
        "seed = 12\n");

    const CliRun result = run({"simulate", "--scenario", scenario_file.path(), "--n", "40",
                               "--reps", "4", "--estimators", "imp_unadj"});
    REQUIRE(result.code == 0);
    std::istringstream in(result.out);
    const std::vector<hest::SummaryCsvRow> rows = hest::parse_summary_csv(in);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].scenario == "alpha");
    CHECK(rows[0].seed == 11u);
    CHECK(rows[1].scenario == "beta");
    CHECK(rows[1].seed == 12u);
    for (const auto& row : rows) {
        CHECK(row.n == 40);      // command-line override
        CHECK(row.n_reps == 4);  // command-line override
    }
    // the first scenario's seed is the artifact's master seed
    CHECK(result.out.find("# master_seed=11") != std::string::npos);
}

TEST_CASE("simulate configuration and data errors are distinguished") {
    CHECK(run({"simulate", "--scenario", "/nonexistent/scenarios.txt"}).code == 3);
    CHECK(run({"simulate", "--reps", "4", "--n", "40", "--estimators", "bogus"}).code == 2);
    CHECK(run({"simulate", "--reps", "4", "--n", "40", "--g2-interactions", "xy"}).code == 2);
    CHECK(run({"simulate", "--reps", "4", "--n", "40", "--format", "pdf"}).code == 2);
    CHECK(run({"simulate", "--reps", "4", "--n", "40", "--outcome-interaction", "ar"}).code == 2);
    CHECK(run({"simulate", "--pi0", "1.5", "--reps", "4", "--n", "40"}).code == 2);
    CHECK(run({"simulate", "--reps", "1", "--n", "40"}).code == 2);  // too few replicates
}

TEST_CASE("the outcome interaction flag switches the generating model") {
    const std::vector<std::string> base = {"simulate", "--n", "60", "--reps", "4",
                                           "--seed", "5", "--estimators", "imp_unadj"};
    std::vector<std::string> with_interaction = base;
    with_interaction.insert(with_interaction.end(), {"--outcome-interaction", "l1r"});
    std::vector<std::string> without = base;
    without.insert(without.end(), {"--outcome-interaction", "none"});

    const auto parse_only_row = [](const std::string& text) {
        std::istringstream in(text);
        const auto rows = hest::parse_summary_csv(in);
        REQUIRE(rows.size() == 1);
        return rows[0];
    };
    CHECK(parse_only_row(run(with_interaction).out).b_l1r == 0.5);
    CHECK(parse_only_row(run(without).out).b_l1r == 0.0);
    CHECK(parse_only_row(run(base).out).b_l1r == 0.0);  // default generating model
}

TEST_CASE("asymptotics subcommand prints the closed-form quantities") {
    const CliRun result = run({"asymptotics", "--pi0", "0.4", "--pi1", "0.5", "--n", "500"});
    REQUIRE(result.code == 0);
    CHECK(value_after(result.out, "avar_pre = ") ==
          doctest::Approx(14.002222222222223).epsilon(1e-12));
    CHECK(value_after(result.out, "avar_prepost = ") ==
          doctest::Approx(9.030816326530612).epsilon(1e-12));
    CHECK(value_after(result.out, "p_r0 = ") == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(value_after(result.out, "tau_diff = ") == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(value_after(result.out, "asy_se_pre (n=500) = ") ==
          doctest::Approx(0.16734528509774169).epsilon(1e-9));
    CHECK(value_after(result.out, "asy_se_prepost (n=500) = ") ==
          doctest::Approx(0.13439357370447899).epsilon(1e-9));
}
