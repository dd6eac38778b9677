#include "hest/scenario.hpp"

#include <istream>

#include "hest/errors.hpp"

namespace hest {

void ScenarioParams::validate() const {
    if (!(pi0 > 0.0 && pi0 < 1.0) || !(pi1 > 0.0 && pi1 < 1.0)) {
        throw HestError(ErrorKind::config_invalid, "pi0 and pi1 must lie in (0,1)");
    }
    if (!(sigma2_l1 > 0.0) || !(sigma2_y > 0.0)) {
        throw HestError(ErrorKind::config_invalid, "variances must be positive");
    }
    if (n < 2) {
        throw HestError(ErrorKind::config_invalid, "n must be at least 2");
    }
    if (n_reps < 1) {
        throw HestError(ErrorKind::config_invalid, "n_reps must be at least 1");
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double parsed = 0.0;
    try {
        parsed = std::stod(value, &used);
    } catch (const std::exception&) {
        throw HestError(ErrorKind::config_invalid, "invalid value '" + value + "' for " + key);
    }
    if (used != value.size()) {
        throw HestError(ErrorKind::config_invalid, "invalid value '" + value + "' for " + key);
    }
    return parsed;
}

long long parse_integer(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long long parsed = 0;
    try {
        parsed = std::stoll(value, &used);
    } catch (const std::exception&) {
        throw HestError(ErrorKind::config_invalid, "invalid value '" + value + "' for " + key);
    }
    if (used != value.size()) {
        throw HestError(ErrorKind::config_invalid, "invalid value '" + value + "' for " + key);
    }
    return parsed;
}

}  // namespace

void apply_scenario_key(ScenarioParams& params, const std::string& key, const std::string& value) {
    if (key == "name") {
        params.name = value;
    } else if (key == "pi0") {
        params.pi0 = parse_double(key, value);
    } else if (key == "pi1") {
        params.pi1 = parse_double(key, value);
    } else if (key == "lambda0") {
        params.lambda0 = parse_double(key, value);
    } else if (key == "lambda_a") {
        params.lambda_a = parse_double(key, value);
    } else if (key == "lambda_r") {
        params.lambda_r = parse_double(key, value);
    } else if (key == "sigma2_l1") {
        params.sigma2_l1 = parse_double(key, value);
    } else if (key == "b0") {
        params.b0 = parse_double(key, value);
    } else if (key == "b_a") {
        params.b_a = parse_double(key, value);
    } else if (key == "b_l1") {
        params.b_l1 = parse_double(key, value);
    } else if (key == "b_r") {
        params.b_r = parse_double(key, value);
    } else if (key == "b_l1r") {
        params.b_l1r = parse_double(key, value);
    } else if (key == "sigma2_y") {
        params.sigma2_y = parse_double(key, value);
    } else if (key == "n") {
        params.n = static_cast<int>(parse_integer(key, value));
    } else if (key == "n_reps") {
        params.n_reps = static_cast<int>(parse_integer(key, value));
    } else if (key == "seed") {
        params.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    } else {
        throw HestError(ErrorKind::config_invalid, "unknown scenario key '" + key + "'");
    }
}

std::vector<ScenarioParams> parse_scenario_file(std::istream& in) {
    std::vector<ScenarioParams> scenarios;
    std::string line;
    int line_number = 0;
    bool in_block = false;
    while (std::getline(in, line)) {
        ++line_number;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line != "[scenario]") {
                throw HestError(ErrorKind::config_invalid,
                                "line " + std::to_string(line_number) +
                                    ": only [scenario] blocks are recognized");
            }
            scenarios.emplace_back();
            in_block = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw HestError(ErrorKind::config_invalid,
                            "line " + std::to_string(line_number) + ": expected key = value");
        }
        if (!in_block) {
            throw HestError(ErrorKind::config_invalid,
                            "line " + std::to_string(line_number) +
                                ": key outside of a [scenario] block");
        }
        apply_scenario_key(scenarios.back(), trim(line.substr(0, eq)),
                           trim(line.substr(eq + 1)));
    }
    if (scenarios.empty()) {
        throw HestError(ErrorKind::config_invalid, "scenario file contains no [scenario] block");
    }
    for (const auto& s : scenarios) s.validate();
    return scenarios;
}

}  // namespace hest
