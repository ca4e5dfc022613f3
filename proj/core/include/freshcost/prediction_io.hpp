#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freshcost/cost_model.hpp"
#include "freshcost/evaluation.hpp"
#include "freshcost/simulator.hpp"

namespace freshcost {

inline constexpr int kSchemaVersion = 1;

// --- assumptions document -------------------------------------------------

// Parses and validates. ParseError carries line/column for malformed JSON,
// ValidationError carries field paths such as "actions[1].price".
BusinessAssumptions parse_assumptions(std::string_view text);
BusinessAssumptions load_assumptions(const std::filesystem::path& path);
std::string assumptions_to_json(const BusinessAssumptions& assumptions, int indent = 2);

// --- prediction files (JSON lines) ----------------------------------------

// Optional first line {"schema_version":1,"classes":[...],"model_id":"..."},
// then one {"item_id","actual","predicted","probs"?,"model_id"?} per line.
// Errors carry the 1-based line number.
PredictionSet parse_predictions(std::istream& in, std::string_view source_name = "<stream>");
PredictionSet read_predictions(const std::filesystem::path& path);

void write_predictions(const PredictionSet& set, std::ostream& out);
void write_predictions(const PredictionSet& set, const std::filesystem::path& path);

// Deterministic prediction set realizing `cm` exactly: cells in row-major
// order, item ids "<model_id>-000001", ...
PredictionSet generate_stub(const ConfusionMatrix& cm, std::string model_id);

// --- confusion documents (gen-stub input) ---------------------------------

// {"classes":[...], "counts":[[...]], "model_id"?: "..."}
struct ConfusionDocument {
    ConfusionMatrix matrix;
    std::string model_id;
};

ConfusionDocument parse_confusion(std::string_view text);
ConfusionDocument load_confusion(const std::filesystem::path& path);
std::string confusion_to_json(const ConfusionMatrix& cm, std::string_view model_id, int indent = 2);

// --- report documents -----------------------------------------------------

// Throws DataError if the report's identities do not hold.
std::string report_to_json(const MetricsReport& report, std::optional<std::size_t> rank = {},
                           int indent = 2);
std::string ranking_to_json(std::span<const MetricsReport> ranked, int indent = 2);

struct ParsedReport {
    MetricsReport report;
    std::optional<std::size_t> rank;
};

// Parses and re-verifies a report document.
ParsedReport parse_report(std::string_view text);

// --- simulator I/O --------------------------------------------------------

// JSON lines of {"actual":"SP","predicted":"HF"}; labels resolved against
// the assumption classes.
std::vector<SimItem> parse_sim_items(std::istream& in, const BusinessAssumptions& assumptions);
std::vector<SimItem> read_sim_items(const std::filesystem::path& path,
                                    const BusinessAssumptions& assumptions);

std::string sim_summary_to_json(const SimSummary& summary, int indent = 2);

// Reads a whole file; IoError names the path.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace freshcost
