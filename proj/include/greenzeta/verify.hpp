#ifndef GREENZETA_VERIFY_HPP
#define GREENZETA_VERIFY_HPP

#include <string>
#include <vector>

namespace greenzeta {

struct CheckResult {
    std::string name;
    int criterion = 0;       // 1..10
    bool pass = false;
    double value = 0.0;      // worst observed deviation
    double tolerance = 0.0;
    std::string details;
    double seconds = 0.0;
    bool cross_oracle = false;  // failures signal oracle inconsistency (exit 4)
};

struct VerifyOptions {
    double tolerance_scale = 1.0;
    bool include_ricci = true;  // the one multi-minute check
    int ricci_side = 65;
    double ricci_curv_tol = 1e-3;
};

// Runs the full identity suite (the acceptance criteria) and returns one
// result per check, in criterion order.
std::vector<CheckResult> run_verification(const VerifyOptions& opt = {});

// Formats a single pass/fail line.
std::string format_check_line(const CheckResult& r);

}  // namespace greenzeta

#endif
