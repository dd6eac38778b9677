#include "hest/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "hest/errors.hpp"
#include "hest/rng.hpp"

namespace hest {

namespace {

constexpr const char* kSummaryHeader =
    "scenario,pi0,pi1,n,n_reps,seed,lambda0,lambda_a,lambda_r,sigma2_l1,"
    "b0,b_a,b_l1,b_r,b_l1r,sigma2_y,true_delta,asy_se_pre,asy_se_prepost,"
    "estimator,n_failures,bias,empirical_se,mcse_bias,"
    "bias_3dp,empirical_se_3dp,asy_se_3dp";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

double parse_double_field(const std::string& token, std::size_t line_no) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != token.size() || token.empty()) {
        throw HestError(ErrorKind::data_invalid,
                        "line " + std::to_string(line_no) + ": not a number: '" + token + "'");
    }
    return v;
}

long long parse_int_field(const std::string& token, std::size_t line_no) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(token, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != token.size() || token.empty()) {
        throw HestError(ErrorKind::data_invalid,
                        "line " + std::to_string(line_no) + ": not an integer: '" + token + "'");
    }
    return v;
}

}  // namespace

std::string round3(double value) {
    if (!std::isfinite(value)) {
        throw HestError(ErrorKind::config_invalid, "cannot round a non-finite value");
    }
    const double scaled = value * 1000.0;
    const double lower = std::floor(scaled);
    const double frac = scaled - lower;
    long long units = 0;
    if (std::fabs(frac - 0.5) < 1e-9) {
        // The value sits (up to representation error) exactly between two
        // thousandths: pick the even neighbour.
        const long long below = static_cast<long long>(lower);
        units = (below % 2 == 0) ? below : below + 1;
    } else {
        units = static_cast<long long>(std::nearbyint(scaled));
    }
    const bool negative = units < 0;
    const long long magnitude = negative ? -units : units;
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%s%lld.%03lld", negative ? "-" : "", magnitude / 1000,
                  magnitude % 1000);
    return std::string(buffer);
}

std::string full_precision(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return std::string(buffer);
}

SeFamily se_family(EstimatorName name) {
    switch (name) {
        case EstimatorName::imp_unadj:
        case EstimatorName::imp_adj:
        case EstimatorName::gform_pre_unadj:
        case EstimatorName::gform_pre_adj:
            return SeFamily::pre;
        case EstimatorName::gform_prepost_unadj:
        case EstimatorName::gform_prepost_adj:
        case EstimatorName::gest_prepost_unadj:
        case EstimatorName::gest_prepost_adj:
            return SeFamily::prepost;
        case EstimatorName::loh:
            return SeFamily::none;
    }
    return SeFamily::none;
}

void write_summary_csv(std::ostream& out, const std::vector<SimulationSummary>& summaries,
                       std::uint64_t master_seed) {
    out << "# artifact_version=" << kArtifactVersion << "\n";
    out << "# master_seed=" << master_seed << "\n";
    out << "# rng=" << kRngId << "\n";
    out << "# normal_method=" << kNormalMethodId << "\n";
    out << kSummaryHeader << "\n";
    for (const SimulationSummary& s : summaries) {
        const ScenarioParams& p = s.scenario;
        for (const EstimatorSummaryRow& row : s.rows) {
            out << p.name << ',' << full_precision(p.pi0) << ',' << full_precision(p.pi1) << ','
                << p.n << ',' << p.n_reps << ',' << p.seed << ',' << full_precision(p.lambda0)
                << ',' << full_precision(p.lambda_a) << ',' << full_precision(p.lambda_r) << ','
                << full_precision(p.sigma2_l1) << ',' << full_precision(p.b0) << ','
                << full_precision(p.b_a) << ',' << full_precision(p.b_l1) << ','
                << full_precision(p.b_r) << ',' << full_precision(p.b_l1r) << ','
                << full_precision(p.sigma2_y) << ',' << full_precision(s.true_delta_value) << ','
                << full_precision(s.asy_se_pre) << ',' << full_precision(s.asy_se_prepost) << ','
                << to_string(row.name) << ',' << row.n_failures << ',' << full_precision(row.bias)
                << ',' << full_precision(row.empirical_se) << ',' << full_precision(row.mcse_bias)
                << ',' << round3(row.bias) << ',' << round3(row.empirical_se) << ',';
            switch (se_family(row.name)) {
                case SeFamily::pre:
                    out << round3(s.asy_se_pre);
                    break;
                case SeFamily::prepost:
                    out << round3(s.asy_se_prepost);
                    break;
                case SeFamily::none:
                    break;
            }
            out << "\n";
        }
    }
}

std::vector<SummaryCsvRow> parse_summary_csv(std::istream& in) {
    std::vector<SummaryCsvRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != kSummaryHeader) {
                throw HestError(ErrorKind::data_invalid,
                                "line " + std::to_string(line_no) + ": unexpected header");
            }
            header_seen = true;
            continue;
        }
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 27) {
            throw HestError(ErrorKind::data_invalid,
                            "line " + std::to_string(line_no) + ": expected 27 fields, found " +
                                std::to_string(f.size()));
        }
        SummaryCsvRow row;
        row.scenario = f[0];
        row.pi0 = parse_double_field(f[1], line_no);
        row.pi1 = parse_double_field(f[2], line_no);
        row.n = static_cast<int>(parse_int_field(f[3], line_no));
        row.n_reps = static_cast<int>(parse_int_field(f[4], line_no));
        row.seed = static_cast<std::uint64_t>(parse_int_field(f[5], line_no));
        row.lambda0 = parse_double_field(f[6], line_no);
        row.lambda_a = parse_double_field(f[7], line_no);
        row.lambda_r = parse_double_field(f[8], line_no);
        row.sigma2_l1 = parse_double_field(f[9], line_no);
        row.b0 = parse_double_field(f[10], line_no);
        row.b_a = parse_double_field(f[11], line_no);
        row.b_l1 = parse_double_field(f[12], line_no);
        row.b_r = parse_double_field(f[13], line_no);
        row.b_l1r = parse_double_field(f[14], line_no);
        row.sigma2_y = parse_double_field(f[15], line_no);
        row.true_delta = parse_double_field(f[16], line_no);
        row.asy_se_pre = parse_double_field(f[17], line_no);
        row.asy_se_prepost = parse_double_field(f[18], line_no);
        row.estimator = f[19];
        row.n_failures = static_cast<int>(parse_int_field(f[20], line_no));
        row.bias = parse_double_field(f[21], line_no);
        row.empirical_se = parse_double_field(f[22], line_no);
        row.mcse_bias = parse_double_field(f[23], line_no);
        row.bias_3dp = f[24];
        row.empirical_se_3dp = f[25];
        row.asy_se_3dp = f[26];
        rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw HestError(ErrorKind::data_invalid, "summary CSV has no header line");
    }
    return rows;
}

void write_summary_markdown(std::ostream& out, const std::vector<SimulationSummary>& summaries,
                            std::uint64_t master_seed, int workers) {
    out << "# Simulation summary\n\n";
    out << "- artifact_version: " << kArtifactVersion << "\n";
    out << "- master_seed: " << master_seed << "\n";
    out << "- rng: " << kRngId << "\n";
    out << "- normal_method: " << kNormalMethodId << "\n";
    out << "- workers: " << workers << "\n\n";
    if (summaries.empty()) {
        return;
    }
    out << "| scenario | pi0 | pi1 | n | reps |";
    for (const EstimatorSummaryRow& row : summaries.front().rows) {
        const std::string name = to_string(row.name);
        out << ' ' << name << " bias | " << name << " emp SE | " << name << " asy SE |";
    }
    out << "\n|---|---|---|---|---|";
    for (std::size_t i = 0; i < summaries.front().rows.size(); ++i) {
        out << "---|---|---|";
    }
    out << "\n";
    for (const SimulationSummary& s : summaries) {
        out << "| " << s.scenario.name << " | " << round3(s.scenario.pi0) << " | "
            << round3(s.scenario.pi1) << " | " << s.scenario.n << " | " << s.scenario.n_reps
            << " |";
        for (const EstimatorSummaryRow& row : s.rows) {
            out << ' ' << round3(row.bias) << " | " << round3(row.empirical_se) << " | ";
            switch (se_family(row.name)) {
                case SeFamily::pre:
                    out << round3(s.asy_se_pre);
                    break;
                case SeFamily::prepost:
                    out << round3(s.asy_se_prepost);
                    break;
                case SeFamily::none:
                    out << "n/a";
                    break;
            }
            out << " |";
        }
        out << "\n";
    }
}

void write_replicate_csv(std::ostream& out, const std::vector<ReplicateOutcome>& outcomes) {
    out << "replicate,estimator,delta_hat,status\n";
    for (const ReplicateOutcome& o : outcomes) {
        out << o.replicate << ',' << to_string(o.estimator) << ',';
        if (o.ok) {
            out << full_precision(o.delta_hat) << ",ok\n";
        } else {
            out << ",failed\n";
        }
    }
}

}  // namespace hest
