#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nsc/config.hpp"

namespace nsc::cli {

enum ExitCode : int { kOk = 0, kChecksFailed = 1, kInvalidConfig = 2, kUnstable = 3, kIoFailure = 4 };

struct CheckLine {
    std::string name;
    bool passed = false;
    std::string detail;
    bool observational = false;  ///< reported but never affects the exit status
};

struct Outcome {
    int exit_code = kOk;
    std::string output_dir;
    std::vector<CheckLine> checks;
    std::vector<std::string> files;  ///< relative to output_dir
    std::string error;
};

/// Validates, runs the experiment, writes its artifacts plus `manifest.json`
/// and `summary.json` into the resolved output directory, and prints the
/// summary table to `out`. Never throws.
Outcome run(const ExperimentConfig& config, std::ostream& out);

/// Regime-map statistic over rows of stability fractions, each row at fixed
/// eps and ordered by increasing |Omega|: how many rows are nondecreasing.
struct MonotoneSummary {
    std::size_t rows = 0;
    std::size_t monotone_rows = 0;
    double fraction() const { return rows ? double(monotone_rows) / double(rows) : 0.0; }
};
MonotoneSummary monotone_rows(const std::vector<std::vector<double>>& rows);

void print_summary(std::ostream& out, const std::string& title, const std::vector<CheckLine>& checks);

}  // namespace nsc::cli
