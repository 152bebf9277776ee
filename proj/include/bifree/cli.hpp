#pragma once

#include <iosfwd>
#include <string>
#include <tuple>
#include <vector>

namespace bifree::cli {

/// Dispatches one subcommand.  Exit codes: 0 success / all checks pass,
/// 1 assertion or internal-consistency failure, 2 usage or input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Fitted log-log slope of a convergence series, and the CSV it renders to.
/// Points with zero error are skipped in the fit; an all-zero series
/// reports the exact-convergence sentinel instead of a slope.
struct ConvergenceReport {
    std::string csv;           // N,value,target,abs_error,error_times_N
    bool exact = false;        // every error identically zero
    double slope = 0.0;        // least-squares slope on log-log scale
    bool has_slope = false;
};
ConvergenceReport emit_convergence(const std::vector<std::tuple<int, double, double>>& series);

}  // namespace bifree::cli
