#include "hest/dataset.hpp"

#include <cmath>
#include <istream>
#include <sstream>

namespace hest {

int TrialDataset::n1() const {
    int count = 0;
    for (const auto& rec : records) count += rec.a == 1.0 ? 1 : 0;
    return count;
}

int TrialDataset::n0() const { return n() - n1(); }

DatasetColumns to_columns(const TrialDataset& dataset) {
    DatasetColumns cols;
    const int p = dataset.l0_width();
    const int q = dataset.l1_width();
    cols.l0.resize(p);
    cols.l1.resize(q);
    for (const auto& rec : dataset.records) {
        cols.a.push_back(rec.a);
        for (int j = 0; j < p; ++j) cols.l0[j].push_back(rec.l0[j]);
        for (int j = 0; j < q; ++j) cols.l1[j].push_back(rec.l1[j]);
        cols.r.push_back(rec.r);
        cols.y.push_back(rec.y);
    }
    return cols;
}

TrialDataset from_columns(const DatasetColumns& columns) {
    TrialDataset dataset;
    const std::size_t n = columns.a.size();
    for (std::size_t i = 0; i < n; ++i) {
        TrialRecord rec;
        rec.a = columns.a[i];
        for (const auto& col : columns.l0) rec.l0.push_back(col[i]);
        for (const auto& col : columns.l1) rec.l1.push_back(col[i]);
        rec.r = columns.r[i];
        rec.y = columns.y[i];
        dataset.records.push_back(std::move(rec));
    }
    return dataset;
}

std::vector<Violation> validate(const TrialDataset& dataset) {
    std::vector<Violation> violations;
    const int p = dataset.l0_width();
    const int q = dataset.l1_width();
    for (int i = 0; i < dataset.n(); ++i) {
        const TrialRecord& rec = dataset.records[i];
        if (rec.a != 0.0 && rec.a != 1.0) violations.push_back({i, "a must be 0 or 1"});
        if (rec.r != 0.0 && rec.r != 1.0) violations.push_back({i, "r must be 0 or 1"});
        if (!std::isfinite(rec.y)) violations.push_back({i, "y must be finite"});
        if (static_cast<int>(rec.l0.size()) != p)
            violations.push_back({i, "l0 length differs from the rest of the dataset"});
        if (static_cast<int>(rec.l1.size()) != q)
            violations.push_back({i, "l1 length differs from the rest of the dataset"});
        for (double v : rec.l0)
            if (!std::isfinite(v)) violations.push_back({i, "l0 entry must be finite"});
        for (double v : rec.l1)
            if (!std::isfinite(v)) violations.push_back({i, "l1 entry must be finite"});
    }
    if (dataset.l1_width() < 1 && dataset.n() > 0) {
        violations.push_back({-1, "l1 must have at least one covariate"});
    }
    if (dataset.n0() < 1 || dataset.n1() < 1) {
        violations.push_back({-1, "n0 >= 1 and n1 >= 1 fails"});
    }
    return violations;
}

PositivityReport positivity_check(const TrialDataset& dataset, double threshold) {
    DesignSpec spec;
    spec.intercept = true;
    spec.a = true;
    spec.l0_width = dataset.l0_width();
    spec.l1_width = dataset.l1_width();
    const int n = dataset.n();
    Eigen::MatrixXd x(n, spec.n_columns());
    Eigen::VectorXd response(n);
    for (int i = 0; i < n; ++i) {
        const TrialRecord& rec = dataset.records[i];
        x.row(i) = spec.row(rec.a, rec.l0, rec.l1, 0.0);
        response(i) = rec.r;
    }
    FittedLogisticModel model;
    try {
        model = logistic_fit(x, response, spec);
    } catch (const HestError& e) {
        throw HestError(ErrorKind::positivity_indeterminable,
                        std::string("ICE model could not be fitted (") + e.what() + ")");
    }
    PositivityReport report;
    report.threshold = threshold;
    for (int i = 0; i < n; ++i) {
        const TrialRecord& rec = dataset.records[i];
        const double p_no_ice = 1.0 - logistic_predict(model, rec.a, rec.l0, rec.l1);
        report.min_fitted_no_ice_prob = std::min(report.min_fitted_no_ice_prob, p_no_ice);
        if (p_no_ice < threshold) report.flagged_record_indices.push_back(i);
    }
    return report;
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

double parse_real(const std::string& token, int line_number) {
    if (token.empty()) {
        throw HestError(ErrorKind::data_invalid,
                        "missing cell on line " + std::to_string(line_number));
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        throw HestError(ErrorKind::data_invalid,
                        "cannot parse '" + token + "' on line " + std::to_string(line_number));
    }
    if (used != token.size()) {
        throw HestError(ErrorKind::data_invalid,
                        "trailing characters in '" + token + "' on line " +
                            std::to_string(line_number));
    }
    return value;
}

}  // namespace

TrialDataset read_patient_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw HestError(ErrorKind::data_invalid, "empty input, expected a CSV header");
    }
    const std::vector<std::string> header = split_csv_line(line);
    // expected shape: a, l0_1..l0_p, l1_1..l1_q, r, y  (the l0 block optional)
    std::size_t pos = 0;
    if (header.empty() || header[pos] != "a") {
        throw HestError(ErrorKind::data_invalid, "header must start with column 'a'");
    }
    ++pos;
    int p = 0;
    while (pos < header.size() && header[pos] == "l0_" + std::to_string(p + 1)) {
        ++p;
        ++pos;
    }
    int q = 0;
    while (pos < header.size() && header[pos] == "l1_" + std::to_string(q + 1)) {
        ++q;
        ++pos;
    }
    if (q < 1) {
        throw HestError(ErrorKind::data_invalid, "header must contain l1_1 (at least one l1 column)");
    }
    if (pos + 2 != header.size() || header[pos] != "r" || header[pos + 1] != "y") {
        throw HestError(ErrorKind::data_invalid, "header must end with columns 'r,y'");
    }

    TrialDataset dataset;
    int line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != 1 + p + q + 2) {
            throw HestError(ErrorKind::data_invalid,
                            "expected " + std::to_string(1 + p + q + 2) + " cells on line " +
                                std::to_string(line_number) + ", found " +
                                std::to_string(fields.size()));
        }
        TrialRecord rec;
        std::size_t f = 0;
        rec.a = parse_real(fields[f++], line_number);
        for (int j = 0; j < p; ++j) rec.l0.push_back(parse_real(fields[f++], line_number));
        for (int j = 0; j < q; ++j) rec.l1.push_back(parse_real(fields[f++], line_number));
        rec.r = parse_real(fields[f++], line_number);
        rec.y = parse_real(fields[f++], line_number);
        dataset.records.push_back(std::move(rec));
    }
    return dataset;
}

}  // namespace hest
