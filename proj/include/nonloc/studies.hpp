#pragma once

#include <nonloc/config.hpp>

#include <string>
#include <utility>
#include <vector>

namespace nonloc {

/// Everything a command produces before touching the filesystem: pass/fail
/// against the thresholds encoded in the config, human-readable summary
/// lines, a deterministic JSON report, and named CSV payloads. Wall-clock
/// timings are kept separate so the content hash stays reproducible.
struct study_outcome {
    bool pass = true;
    bool converged = true;
    std::vector<std::string> lines;
    std::string report_json;   ///< hashed alongside the files
    std::string timings_json;  ///< excluded from the hash
    std::vector<std::pair<std::string, std::string>> files;  ///< name -> content
};

study_outcome run_solve(const run_config& cfg);
study_outcome run_barrier_check(const run_config& cfg);

/// which: convergence, equicontinuity, jump, counterexample, isaacs,
/// parabolic. Unknown names raise config_error.
study_outcome run_study(const run_config& cfg, const std::string& which);

/// Drives the check list for one acceptance criterion (1..11) using the
/// thresholds in the preset.
study_outcome run_acceptance(const run_config& cfg, int criterion);

/// Writes the CSV payloads and run_record.json under out_dir; returns the
/// content hash over the payloads and the report.
std::string emit_outcome(const study_outcome& out, const run_config& cfg,
                         const std::string& out_dir);

} // namespace nonloc
