#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "erasim/config.hpp"

namespace erasim {

inline constexpr const char* kVersion = "0.1.0";

// Numerical failure during an experiment (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResultBundle {
    nlohmann::json document;                      // config echo + results + metrics
    std::map<std::string, std::string> csv_files;  // filename -> contents

    static ResultBundle load(const std::string& bundle_json_path);
};

ResultBundle run_experiment(const ExperimentConfig& config);

// Writes bundle.json plus the CSV series into directory; returns the bundle
// path. The CSV bytes depend only on (config, seed).
std::string write_bundle(const ResultBundle& bundle, const std::string& directory);

// Prints headline metrics next to the reference values embedded in the
// library. Returns 0; an empty bundle prints a note and still returns 0.
int report_bundle(const ResultBundle& bundle, std::ostream& os);

nlohmann::json fit_to_json(const FitResult& fit);

nlohmann::json idling_to_json(const IdlingResult& series);

}  // namespace erasim
