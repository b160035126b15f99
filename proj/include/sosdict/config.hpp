#pragma once
//
// sosdict/config.hpp
//
// Experiment configuration and report plumbing for the command line
// harness. Configs are flat key=value text with '#' comments; every field
// round-trips through serialize_config/parse_config losslessly. Reports
// are CSV rows with a stable column set, one row per seed and grid cell.
//

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sosdict::cli {

struct ExperimentConfig {
    std::string mode = "learn";  // gen | learn | decompose | certify | bench

    // problem dimensions and degrees
    int n = 3;
    int m = 3;
    int d = 4;
    int k = 4;

    // data model and accuracy targets
    double tau = 0.1;        // niceness level of the coefficient distribution
    double epsilon = 0.1;    // recovery accuracy target
    double gamma = -1.0;     // separation; negative picks 20 * epsilon
    double noise = 0.0;      // residual allowance for the decomposition
    long num_samples = 100000;
    bool orthonormalize = false;

    // solver and rounding knobs
    double sdp_tol = 1e-7;
    long sdp_max_iters = 200000;
    int retries = 16;
    int max_columns = 16;
    double conditioning = 1.0;       // reweighing scale M
    std::string strategy = "eigenvector";  // or "gaussian"
    bool refined = false;            // reweigh around drawn samples

    std::vector<std::uint64_t> seeds{1};

    // file paths; empty means skip that input or output
    std::string input_dict;
    std::string input_samples;
    std::string input_poly;
    std::string out_dict;
    std::string out_samples;
    std::string out_poly;
    std::string out_recovered;
    std::string report;

    // bench grids; nullopt falls back to the scalar field, an explicitly
    // empty list makes the grid empty
    std::optional<std::vector<double>> grid_tau;
    std::optional<std::vector<int>> grid_n;
    std::optional<std::vector<int>> grid_m;
    std::optional<std::vector<int>> grid_d;
    std::optional<std::vector<int>> grid_k;

    // certificate selection for certify mode; all unset runs the full suite
    int amgm_n = 0;              // 0 = unset
    std::string monomial;        // exponent list, e.g. "2 1 1"
    std::string holder;          // "n d s" triple

    bool operator==(const ExperimentConfig&) const = default;
};

// invalid field values detected after parsing; carries no line anchor
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

// key=value lines; unknown or duplicate keys and malformed values throw
// ParseError anchored to the offending line
ExperimentConfig parse_config(std::istream& in, const std::string& path = "<stream>");
ExperimentConfig load_config(const std::string& path);

// every field in a fixed order; parse_config(serialize_config(c)) == c
std::string serialize_config(const ExperimentConfig& cfg);

// range checks shared by every mode; throws ConfigError
void validate_config(const ExperimentConfig& cfg);

struct ReportRow {
    std::string mode;
    int cell = 0;            // grid cell index; 0 outside bench
    int n = 0, m = 0, d = 0, k = 0;
    double tau = 0.0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    int recovered = 0;       // columns found, or certificates verified
    std::string reason;      // termination label, "ok", or "error: ..."
    double cor_min = 0.0;    // worst per-column best correlation, 0 if unscored
    std::vector<double> cors;  // per-truth-column best Cor, ';'-joined in CSV
    int close = 0;           // 1 when check_closeness passed against the truth
    double tau_hat = -1.0;   // certified residual; negative = not computed
    long retries_used = 0;   // sampling rounds consumed by accepted columns
    // wall clock per phase; excluded from determinism comparisons
    double ms_data = 0.0;
    double ms_solve = 0.0;
    double ms_certify = 0.0;
};

struct Report {
    std::vector<ReportRow> rows;
};

// column names, in order, as written by write_report_csv
extern const char* const kReportHeader;
// number of trailing wall-clock columns in the schema
inline constexpr int kReportTimingColumns = 3;

void write_report_csv(std::ostream& out, const Report& report);
std::string report_row_csv(const ReportRow& row);

}  // namespace sosdict::cli
