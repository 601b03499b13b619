#pragma once

#include "circmax/harness/frozen.h"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace circmax::harness {

inline constexpr std::uint64_t kAcceptanceSeed = 0x5eed0acce97ULL;
inline constexpr std::uint64_t kCalibrationSeed = 0xca11b4a7e5ULL;
inline constexpr int kCriterionCount = 11;

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    double limit_seconds = 0.0;
    /// Measured values, human readable.
    std::string detail;
};

struct AcceptanceOptions {
    std::uint64_t seed = kAcceptanceSeed;
    unsigned jobs = 1;
};

/// Runs criterion `id` (1..kCriterionCount). A criterion passes only when its
/// checks hold and it finished within its time limit.
CriterionResult run_criterion(int id, const FrozenConstants& k, const AcceptanceOptions& options = {});

/// Runs the listed criteria (all when empty), calling `report` after each.
std::vector<CriterionResult> run_acceptance(const FrozenConstants& k, const AcceptanceOptions& options = {},
                                            const std::vector<int>& only = {},
                                            const std::function<void(const CriterionResult&)>& report = {});

/// "[PASS] 3 name: detail (1.2 s, limit 60 s)".
std::string format_result(const CriterionResult& r);
/// CSV with header id,name,pass,seconds,limit_seconds,detail.
void write_acceptance_csv(std::ostream& os, const std::vector<CriterionResult>& results);

struct CalibrationOptions {
    std::uint64_t seed = kCalibrationSeed;
    unsigned jobs = 1;
};

/// Measures every constant on the calibration corpus and returns a frozen table.
FrozenConstants calibrate(const CalibrationOptions& options = {}, std::ostream* log = nullptr);

}  // namespace circmax::harness
