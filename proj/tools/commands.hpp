#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace fpprop::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitContractViolation = 1;
inline constexpr int kExitUsage = 2;

struct SolveOptions {
    std::string spec_path;
    std::vector<double> times;  // overrides the spec's output times when non-empty
    std::string out_path;
    std::string format = "csv";  // csv | json
};

struct VerifyOptions {
    std::string suite = "all";  // commutator | suzuki | substitution | residual | all
    int trials = -1;            // -1: per-suite defaults
    std::uint64_t seed = 1;
    double tol = 1e-10;
    bool flip_suzuki_sign = false;  // mutation self-test hook
};

struct CompareOptions {
    std::string spec_path;
    std::string oracle = "both";  // fd | mc | both
    double time = -1.0;           // -1: last output time in the spec
    std::string out_path;         // optional CSV dump of the fd comparison
    double fd_dt = 1e-3;
    double fd_tol = 1e-3;
    long mc_paths = 100000;
    double mc_dt = 1e-3;
    std::uint64_t seed = 1;
    double mc_z_limit = 4.0;
};

struct SchedulesOptions {
    std::string spec_path;
    std::string out_path;
    int samples = 256;
};

int cmd_solve(const SolveOptions& opt, std::ostream& log);
int cmd_verify(const VerifyOptions& opt, std::ostream& log);
int cmd_compare(const CompareOptions& opt, std::ostream& log);
int cmd_schedules(const SchedulesOptions& opt, std::ostream& log);

}  // namespace fpprop::cli
