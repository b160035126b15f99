#pragma once
//
// sosdict/runner.hpp
//
// Pipeline dispatch behind the command line tool: each mode turns an
// ExperimentConfig into report rows plus an exit code. Lives in the
// library so tests can drive complete runs in-process.
//

#include <iosfwd>

#include "sosdict/config.hpp"

namespace sosdict::cli {

// process exit codes; the config and I/O family follows sysexits
inline constexpr int kExitOk = 0;
inline constexpr int kExitCertFailed = 1;   // an exact certificate did not verify
inline constexpr int kExitPartial = 2;      // ran to completion, recovery incomplete
inline constexpr int kExitStalled = 3;      // the SDP solver gave up without a verdict
inline constexpr int kExitBadConfig = 64;   // malformed or out-of-range configuration
inline constexpr int kExitMissingInput = 66;  // an input file could not be opened
inline constexpr int kExitIo = 74;          // an output file could not be written
inline constexpr int kExitInternal = 70;    // unexpected failure; see the log

// validates and executes cfg.mode, appends one row per seed and grid
// cell, and writes the CSV to cfg.report when set. Progress and
// diagnostics go to log. Never throws; failures map to exit codes.
int run(const ExperimentConfig& cfg, Report& report, std::ostream& log);

}  // namespace sosdict::cli
