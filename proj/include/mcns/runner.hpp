#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mcns/config.hpp"

namespace mcns {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitConfig = 2, kExitDivergence = 3 };

struct SuiteResult {
    std::string suite;
    std::string check;
    double value;
    double tol;
    bool pass;
};

// Fixed-size invariant suites (orthonormality, oracles, conservation, round trips).
// Work files go under scratch_dir.
std::vector<SuiteResult> validation_suites(const std::string& scratch_dir);

// Each writes its artifacts under cfg.out_dir and returns an exit code; errors propagate.
int run_validate(const ExperimentConfig& cfg, std::ostream& out);
int run_evolve(const ExperimentConfig& cfg, std::ostream& out);
int run_rates(const ExperimentConfig& cfg, std::ostream& out);
int run_profiles(const ExperimentConfig& cfg, std::ostream& out);

// Dispatch plus exception -> exit code mapping.
int run_command(const std::string& command, const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace mcns
