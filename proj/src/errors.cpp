#include "hest/errors.hpp"

namespace hest {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config_invalid: return "config_invalid";
        case ErrorKind::dimension_mismatch: return "dimension_mismatch";
        case ErrorKind::data_invalid: return "data_invalid";
        case ErrorKind::io_error: return "io_error";
        case ErrorKind::rank_deficient: return "rank_deficient";
        case ErrorKind::separation: return "separation";
        case ErrorKind::one_class_only: return "one_class_only";
        case ErrorKind::extreme_weights: return "extreme_weights";
        case ErrorKind::zero_denominator: return "zero_denominator";
        case ErrorKind::empty_stratum: return "empty_stratum";
        case ErrorKind::no_ice_free_records: return "no_ice_free_records";
        case ErrorKind::singular_conditional_covariance: return "singular_conditional_covariance";
        case ErrorKind::positivity_indeterminable: return "positivity_indeterminable";
    }
    return "unknown";
}

}  // namespace hest
