#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace bifree::acceptance {

/// One verification criterion of the battery.
struct CriterionResult {
    std::string id;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the full battery in order, printing one pass/fail line per
/// criterion to the progress stream when given.
std::vector<CriterionResult> run_all(std::ostream* progress = nullptr);

bool all_pass(const std::vector<CriterionResult>& results);

/// The operator-relation checks on basis vectors, per deformation value
/// (rationals as strings).  Shared by the battery and the CLI.
std::vector<std::pair<std::string, bool>> fock_relation_battery(
    const std::vector<std::string>& qs);

}  // namespace bifree::acceptance
