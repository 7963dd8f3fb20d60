#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace carving {

/// Empty cells (std::monostate) are emitted as blank CSV fields / JSON null.
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// Resolved configuration echoed ahead of the data.
    std::vector<std::pair<std::string, std::string>> metadata;

    std::size_t column_index(const std::string &name) const;
    bool operator==(const Table &other) const;
};

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string &label);

/// 17 significant digits (exact double round trip), '.' separator,
/// independent of the C locale. Non-finite values become "nan"/"inf".
std::string format_number(double value);

/**
 * CSV: optional `# key=value` metadata lines, then one header line, then one
 * line per row.
 */
std::string to_csv(const Table &table);

/// {"config": {...}, "columns": [...], "rows": [{column: value, ...}, ...]}
nlohmann::ordered_json to_json(const Table &table);
Table table_from_json(const nlohmann::ordered_json &doc);

/// Writes to `path`, or to `out` when path is empty or "-".
void emit(const Table &table, OutputFormat format, const std::string &path, std::ostream &out);

} // namespace carving
