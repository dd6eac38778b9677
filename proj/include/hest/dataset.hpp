#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hest/glm.hpp"

namespace hest {

// One randomized patient: treatment arm, optional baseline covariates,
// post-baseline covariates, intercurrent-event indicator, and the outcome.
// Outcomes are stored for every record, including post-event ones.
struct TrialRecord {
    double a = 0.0;          // treatment arm, 0 or 1
    std::vector<double> l0;  // baseline covariates (possibly empty)
    std::vector<double> l1;  // post-baseline covariates (length >= 1)
    double r = 0.0;          // intercurrent-event indicator, 0 or 1
    double y = 0.0;          // continuous outcome, always observed
};

struct TrialDataset {
    std::vector<TrialRecord> records;

    int n() const { return static_cast<int>(records.size()); }
    int n1() const;  // arm-1 size
    int n0() const;  // arm-0 size
    int l0_width() const { return records.empty() ? 0 : static_cast<int>(records[0].l0.size()); }
    int l1_width() const { return records.empty() ? 0 : static_cast<int>(records[0].l1.size()); }
};

// Column-wise view of a dataset; rebuilding records from columns reproduces
// the dataset exactly.
struct DatasetColumns {
    std::vector<double> a;
    std::vector<std::vector<double>> l0;  // one vector per baseline covariate
    std::vector<std::vector<double>> l1;  // one vector per post-baseline covariate
    std::vector<double> r;
    std::vector<double> y;
};

DatasetColumns to_columns(const TrialDataset& dataset);
TrialDataset from_columns(const DatasetColumns& columns);

struct Violation {
    int record_index;  // -1 for dataset-level violations
    std::string reason;
};

// Empty result means the dataset satisfies every invariant; otherwise each
// violation is listed with its record index and reason.
std::vector<Violation> validate(const TrialDataset& dataset);

struct PositivityReport {
    double min_fitted_no_ice_prob = 1.0;
    std::vector<int> flagged_record_indices;  // fitted P(R=0|...) below threshold
    double threshold = 0.0;
};

// Fits a logistic model for P(R=1|A,L0,L1) over all records and reports the
// per-record fitted probability of remaining event-free. Logistic-fit
// failures surface as positivity_indeterminable.
PositivityReport positivity_check(const TrialDataset& dataset, double threshold = 0.01);

// Reads the patient CSV format: header `a, l0_1..l0_p, l1_1..l1_q, r, y`
// (the l0 block may be absent), decimal-point reals, no missing cells.
TrialDataset read_patient_csv(std::istream& in);

}  // namespace hest
