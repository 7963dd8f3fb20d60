#include "carving/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace carving {

std::size_t Table::column_index(const std::string &name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::out_of_range("no column named '" + name + "'");
}

bool Table::operator==(const Table &other) const {
    return columns == other.columns && rows == other.rows && metadata == other.metadata;
}

OutputFormat parse_output_format(const std::string &label) {
    if (label == "csv") return OutputFormat::csv;
    if (label == "json") return OutputFormat::json;
    throw std::invalid_argument("unknown output format '" + label + "' (expected csv|json)");
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell &cell) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double v) const { return std::isfinite(v) ? format_number(v) : std::string(); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(const std::string &v) const { return csv_field(v); }
    };
    return std::visit(Visitor{}, cell);
}

nlohmann::ordered_json cell_json(const Cell &cell) {
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(double v) const {
            if (!std::isfinite(v)) return nullptr;
            return v;
        }
        nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
        nlohmann::ordered_json operator()(const std::string &v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

Cell json_cell(const nlohmann::ordered_json &v) {
    if (v.is_null()) return std::monostate{};
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return v.get<std::string>();
    throw std::invalid_argument("unsupported JSON cell: " + v.dump());
}

} // namespace

std::string to_csv(const Table &table) {
    std::ostringstream os;
    for (const auto &[key, value] : table.metadata) os << "# " << key << '=' << value << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << csv_field(table.columns[i]);
    os << '\n';
    for (const auto &row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << '\n';
    }
    return os.str();
}

nlohmann::ordered_json to_json(const Table &table) {
    nlohmann::ordered_json doc;
    doc["config"] = nlohmann::ordered_json::object();
    for (const auto &[key, value] : table.metadata) doc["config"][key] = value;
    doc["columns"] = table.columns;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto &row : table.rows) {
        if (row.size() != table.columns.size()) throw std::logic_error("row width does not match column count");
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
        doc["rows"].push_back(std::move(obj));
    }
    return doc;
}

Table table_from_json(const nlohmann::ordered_json &doc) {
    Table t;
    for (const auto &[key, value] : doc.at("config").items()) t.metadata.emplace_back(key, value.get<std::string>());
    t.columns = doc.at("columns").get<std::vector<std::string>>();
    for (const auto &obj : doc.at("rows")) {
        std::vector<Cell> row;
        row.reserve(t.columns.size());
        for (const auto &col : t.columns) row.push_back(json_cell(obj.at(col)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void emit(const Table &table, OutputFormat format, const std::string &path, std::ostream &out) {
    const std::string text = format == OutputFormat::csv ? to_csv(table) : to_json(table).dump(2) + "\n";
    if (path.empty() || path == "-") {
        out << text;
        out.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open output file '" + path + "' for writing");
    file << text;
    file.close();
    if (!file) throw std::runtime_error("failed writing output file '" + path + "'");
}

} // namespace carving
