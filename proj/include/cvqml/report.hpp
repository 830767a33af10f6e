#pragma once
// Deterministic JSON and CSV serialization for run artifacts. Parsing is
// delegated to the vendored nlohmann single header; dumping is done by our
// own walker so that every finite floating-point value is printed with
// exactly 17 significant digits. Two runs that compute the same numbers then
// produce byte-identical documents — the single "timestamp" field a report
// carries is the only volatile entry.

#include <string>
#include <vector>

#include <json.hpp>

namespace cvqml {

// Order-preserving document type: keys appear in insertion (or source) order,
// so an embedded config echoes the shape of the file it came from.
using Json = nlohmann::ordered_json;

// Parses JSON text; throws std::runtime_error with a position diagnostic on
// malformed input. `where` names the source (file name, "config", …).
Json parse_json(const std::string& text, const std::string& where = "input");

// Reads and parses a JSON file; throws std::runtime_error when the file
// cannot be read or does not parse.
Json load_json_file(const std::string& path);

// One finite double, exactly 17 significant digits ("-1.2500000000000000e-01").
// Non-finite values have no JSON representation and serialize as "null".
std::string format_double(double x);

// Serializes a document: two-space indentation, keys in stored order, every
// floating-point number rendered by format_double. No trailing newline.
std::string dump_json(const Json& doc);

// Writes `content` to `path` with a trailing newline; throws on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

// Writes a CSV table: a comma-separated header row, then one row per entry
// with each value rendered by format_double. Rows must match the header
// width; a non-finite value anywhere is an error (a curve containing one
// means the producing computation failed and should be reported as such).
void write_csv_file(const std::string& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);

// Current UTC wall-clock instant, "2026-08-22T14:03:22Z".
std::string utc_timestamp();

// The one volatile report field: UTC instant plus elapsed wall-clock,
// "2026-08-22T14:03:22Z wall=12.345s". Keeping both in a single field is what
// lets identical runs agree everywhere else.
std::string timestamp_field(double wall_seconds);

// True when the documents agree after deleting a top-level "timestamp" from
// each — the report-determinism contract.
bool same_modulo_timestamp(const Json& a, const Json& b);

}  // namespace cvqml
