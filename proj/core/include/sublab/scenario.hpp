#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sublab {

/// One experiment picked from a config file. Parameters stay as raw JSON
/// text; they are validated at parse time and decoded again at run time.
struct Scenario {
    std::string id;
    std::string kind;
    std::string params_json;
};

/// The kind names accepted in config files.
std::vector<std::string> scenario_kinds();

/// Parse and validate a config file: a JSON object with a "scenarios"
/// array. Throws std::runtime_error with file/line context on malformed
/// input, unknown kinds, missing kind-specific parameters or duplicate
/// ids.
std::vector<Scenario> parse_scenarios(const std::string& path);
std::vector<Scenario> parse_scenarios_text(const std::string& text,
                                           const std::string& origin = "<memory>");

/// One emitted CSV row. Missing fields print as empty cells.
struct ReportRow {
    std::string scenario_id;
    std::string kind;
    std::string status;
    std::optional<long> n;
    std::optional<double> prelimit;
    std::optional<double> limit;
    std::optional<double> gap;
    std::optional<double> lhs;
    std::optional<double> rhs;
    std::optional<double> slack;
    std::optional<double> grid_dx;
    std::optional<double> clip;
    std::optional<std::uint64_t> seed;
};

/// Result of one scenario: status, rows, provenance, and a kind-specific
/// details payload (JSON text). Wall time is informational and excluded
/// from the determinism contract.
struct RunReport {
    std::string scenario_id;
    std::string kind;
    std::string status; // pass | fail | error
    std::string message;
    std::vector<ReportRow> rows;
    double grid_dx = 0.0;
    long time_steps = 0;
    double clip = 0.0;
    std::uint64_t seed = 0;
    double wall_ms = 0.0;
    std::string details_json; // JSON object text, "{}" when empty
};

/// Run every scenario, order preserved, up to `parallelism` at a time.
/// A scenario that throws is reported with status "error" and does not
/// disturb the rest of the batch. Scenarios without an explicit seed get
/// a deterministic one derived from default_seed and their id.
std::vector<RunReport> run(const std::vector<Scenario>& scenarios, int parallelism,
                           std::uint64_t default_seed);

/// Fixed-header CSV of all rows.
std::string to_csv(const std::vector<RunReport>& reports);
extern const char* const kCsvHeader;

/// JSON array mirroring the RunReport fields.
std::string to_json(const std::vector<RunReport>& reports);

/// Write reports.csv or reports.json under out_dir (created if missing).
void emit(const std::vector<RunReport>& reports, const std::string& format,
          const std::string& out_dir);

bool all_passed(const std::vector<RunReport>& reports);

} // namespace sublab
