#ifndef CELLDESC_TABLE_HPP_
#define CELLDESC_TABLE_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace celldesc {

/// In-memory delimited table with a header row. Cells are kept as strings;
/// typed interpretation is the caller's business.
class Table {
public:
    Table() = default;
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t row_count() const { return rows_.size(); }
    std::size_t column_count() const { return columns_.size(); }

    std::optional<std::size_t> column_index(std::string_view name) const;

    /// Index of a required column; throws ValidationError naming the column.
    std::size_t require_column(std::string_view name) const;

    const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    const std::string& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }

    /// Appends a row; throws ValidationError on width mismatch.
    void add_row(std::vector<std::string> cells);

    /// New table with the same columns and the selected rows (in given order).
    Table select_rows(const std::vector<std::size_t>& indices) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Splits one delimited line. For ',' the RFC 4180 double-quote convention is
/// honored; for '\t' fields are taken verbatim.
std::vector<std::string> split_delimited_line(std::string_view line, char delim);

/// Reads a table with a header row. Ragged rows raise ParseError with the
/// offending line number.
Table read_table(std::istream& in, char delim);

/// Reads from a file, choosing ',' for *.csv and '\t' otherwise.
Table read_table_file(const std::string& path);

void write_table(const Table& table, std::ostream& out, char delim);
void write_table_file(const Table& table, const std::string& path);

/// Delimiter implied by a file name (',' for *.csv, '\t' otherwise).
char delimiter_for_path(std::string_view path);

/// One field as it would appear in a delimited file (CSV quoting applied
/// when the delimiter is ',').
std::string format_field(std::string_view field, char delim);

} // namespace celldesc

#endif // CELLDESC_TABLE_HPP_
