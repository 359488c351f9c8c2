#include "celldesc/table.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "celldesc/errors.hpp"

namespace celldesc {

std::optional<std::size_t> Table::column_index(std::string_view name) const {
    auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns_.begin());
}

std::size_t Table::require_column(std::string_view name) const {
    auto idx = column_index(name);
    if (!idx) throw ValidationError("missing required column '" + std::string(name) + "'");
    return *idx;
}

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size())
        throw ValidationError("row width " + std::to_string(cells.size()) +
                              " does not match header width " + std::to_string(columns_.size()));
    rows_.push_back(std::move(cells));
}

Table Table::select_rows(const std::vector<std::size_t>& indices) const {
    Table out(columns_);
    out.rows_.reserve(indices.size());
    for (std::size_t i : indices) out.rows_.push_back(rows_[i]);
    return out;
}

std::vector<std::string> split_delimited_line(std::string_view line, char delim) {
    std::vector<std::string> fields;
    if (delim != ',') {
        std::size_t start = 0;
        while (true) {
            std::size_t pos = line.find(delim, start);
            if (pos == std::string_view::npos) {
                fields.emplace_back(line.substr(start));
                break;
            }
            fields.emplace_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        return fields;
    }

    // CSV with double-quote escaping.
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

namespace {

std::string chomp(std::string line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return line;
}

} // namespace

Table read_table(std::istream& in, char delim) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty table: no header row");
    Table table(split_delimited_line(chomp(line), delim));

    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = chomp(line);
        if (line.empty()) continue;
        auto cells = split_delimited_line(line, delim);
        if (cells.size() != table.column_count())
            throw ParseError("row has " + std::to_string(cells.size()) + " fields, expected " +
                                 std::to_string(table.column_count()),
                             lineno);
        table.add_row(std::move(cells));
    }
    return table;
}

char delimiter_for_path(std::string_view path) {
    return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? ',' : '\t';
}

Table read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_table(in, delimiter_for_path(path));
}

std::string format_field(std::string_view field, char delim) {
    if (delim == ',' && field.find_first_of(",\"\n") != std::string_view::npos) {
        std::string out;
        out.reserve(field.size() + 2);
        out += '"';
        for (char c : field) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
        return out;
    }
    return std::string(field);
}

namespace {

void write_field(std::ostream& out, const std::string& field, char delim) {
    out << format_field(field, delim);
}

} // namespace

void write_table(const Table& table, std::ostream& out, char delim) {
    for (std::size_t c = 0; c < table.column_count(); ++c) {
        if (c) out << delim;
        write_field(out, table.columns()[c], delim);
    }
    out << '\n';
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        for (std::size_t c = 0; c < table.column_count(); ++c) {
            if (c) out << delim;
            write_field(out, table.cell(r, c), delim);
        }
        out << '\n';
    }
}

void write_table_file(const Table& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_table(table, out, delimiter_for_path(path));
}

} // namespace celldesc
