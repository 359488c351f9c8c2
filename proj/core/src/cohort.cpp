#include "celldesc/cohort.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "celldesc/errors.hpp"
#include "celldesc/random.hpp"

namespace celldesc {
namespace {

std::string fold(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

double nlogn(std::size_t n) {
    return n == 0 ? 0.0 : static_cast<double>(n) * std::log(static_cast<double>(n));
}

/// Running category counts for one column, supporting O(1) entropy updates.
struct ColumnState {
    std::unordered_map<std::string, std::size_t> counts;
    double sum_nlogn = 0.0;
    std::size_t total = 0;
    std::size_t categories = 0;

    double entropy() const {
        if (total == 0 || categories <= 1) return 0.0;
        const double h = std::log(static_cast<double>(total)) -
                         sum_nlogn / static_cast<double>(total);
        return h / std::log(static_cast<double>(categories));
    }

    double gain_if_added(const std::string& value) const {
        const auto it = counts.find(value);
        const std::size_t n = it == counts.end() ? 0 : it->second;
        const double sum_after = sum_nlogn - nlogn(n) + nlogn(n + 1);
        const std::size_t cats_after = categories + (n == 0 ? 1 : 0);
        const std::size_t total_after = total + 1;
        double after = 0.0;
        if (cats_after > 1) {
            after = (std::log(static_cast<double>(total_after)) -
                     sum_after / static_cast<double>(total_after)) /
                    std::log(static_cast<double>(cats_after));
        }
        return after - entropy();
    }

    void add(const std::string& value) {
        std::size_t& n = counts[value];
        sum_nlogn += nlogn(n + 1) - nlogn(n);
        if (n == 0) ++categories;
        ++n;
        ++total;
    }
};

} // namespace

double shannon_diversity(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    std::size_t categories = 0;
    double sum = 0.0;
    for (const std::size_t n : counts) {
        if (n == 0) continue;
        ++categories;
        total += n;
        sum += nlogn(n);
    }
    if (total == 0) throw ValidationError("all category counts are zero");
    if (categories <= 1) return 0.0;
    const double h = std::log(static_cast<double>(total)) - sum / static_cast<double>(total);
    return h / std::log(static_cast<double>(categories));
}

double column_diversity(const Table& table, std::string_view column) {
    const std::size_t col = table.require_column(column);
    if (table.row_count() == 0) throw ValidationError("no rows to measure");
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& row : table.rows()) ++counts[row[col]];
    std::vector<std::size_t> values;
    values.reserve(counts.size());
    for (const auto& [value, n] : counts) values.push_back(n);
    return shannon_diversity(values);
}

std::string resolve_column(const Table& table, std::string_view logical) {
    if (table.column_index(logical)) return std::string(logical);
    if (logical == "cell_type" && table.column_index("cell_type_name")) {
        return "cell_type_name";
    }
    throw ValidationError("missing required column '" + std::string(logical) + "'");
}

std::span<const std::string> default_assay_exclusions() {
    static const std::vector<std::string> kPatterns = {
        "smart-seq", "quartz-seq", "gexscope", "bd rhapsody targeted", "10x flex",
    };
    return kPatterns;
}

AssayFilterReport assay_filter(const Table& table, std::span<const std::string> patterns) {
    const std::size_t assay_col = table.require_column("assay");
    std::vector<std::string> folded;
    folded.reserve(patterns.size());
    for (const auto& p : patterns) folded.push_back(fold(p));

    AssayFilterReport report;
    std::vector<std::size_t> kept;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const std::string assay = fold(table.cell(r, assay_col));
        const bool excluded = std::any_of(folded.begin(), folded.end(), [&](const auto& p) {
            return assay.find(p) != std::string::npos;
        });
        if (excluded) {
            ++report.removed_by_assay[table.cell(r, assay_col)];
            ++report.removed_rows;
        } else {
            kept.push_back(r);
        }
    }
    report.table = table.select_rows(kept);
    return report;
}

Table stratified_sample(const Table& table, std::size_t target_n,
                        std::span<const std::string> objective_columns, std::uint64_t seed) {
    if (target_n == 0) throw ValidationError("target_n must be positive");
    if (target_n > table.row_count()) {
        throw ValidationError("target_n " + std::to_string(target_n) + " exceeds table size " +
                              std::to_string(table.row_count()));
    }
    if (objective_columns.empty()) throw ValidationError("no objective columns");
    std::vector<std::size_t> cols;
    cols.reserve(objective_columns.size());
    for (const auto& name : objective_columns) cols.push_back(table.require_column(name));

    // Joint strata; map order makes the tie-break the stratum key order.
    std::map<std::vector<std::string>, std::vector<std::size_t>> strata;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        std::vector<std::string> key;
        key.reserve(cols.size());
        for (const std::size_t c : cols) key.push_back(table.cell(r, c));
        strata[std::move(key)].push_back(r);
    }

    std::vector<ColumnState> state(cols.size());
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> selected;
    selected.reserve(target_n);

    while (selected.size() < target_n) {
        double best_gain = -std::numeric_limits<double>::infinity();
        auto best = strata.end();
        for (auto it = strata.begin(); it != strata.end(); ++it) {
            if (it->second.empty()) continue;
            double gain = 0.0;
            for (std::size_t c = 0; c < cols.size(); ++c) {
                gain += state[c].gain_if_added(it->first[c]);
            }
            if (gain > best_gain) {
                best_gain = gain;
                best = it;
            }
        }
        auto& rows = best->second;
        const std::size_t pick = uniform_below(rng, rows.size());
        selected.push_back(rows[pick]);
        rows[pick] = rows.back();
        rows.pop_back();
        for (std::size_t c = 0; c < cols.size(); ++c) state[c].add(best->first[c]);
    }
    return table.select_rows(selected);
}

std::string_view to_string(Split split) {
    switch (split) {
        case Split::train: return "train";
        case Split::val: return "val";
        default: return "test";
    }
}

SplitAssignment donor_split(const Table& table, std::array<double, 3> ratios,
                            std::uint64_t seed) {
    double sum = 0.0;
    for (const double r : ratios) {
        if (r < 0.0) throw ValidationError("negative split ratio");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");

    const std::size_t donor_col = table.require_column("donor_id");
    std::map<std::string, std::size_t> donor_cells;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const std::string& donor = table.cell(r, donor_col);
        if (donor.empty()) {
            throw ValidationError("empty donor_id at row " + std::to_string(r + 1));
        }
        ++donor_cells[donor];
    }
    if (donor_cells.size() < 3) {
        throw ValidationError("need at least 3 donors, have " +
                              std::to_string(donor_cells.size()));
    }

    std::vector<std::string> donors;
    donors.reserve(donor_cells.size());
    for (const auto& [donor, n] : donor_cells) donors.push_back(donor);
    std::mt19937_64 rng(seed);
    deterministic_shuffle(donors, rng);

    const auto total = static_cast<double>(table.row_count());
    SplitAssignment assignment;
    std::array<double, 3> assigned{0.0, 0.0, 0.0};
    for (const auto& donor : donors) {
        std::size_t best = 0;
        double best_shortfall = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < 3; ++s) {
            const double shortfall = ratios[s] * total - assigned[s];
            if (shortfall > best_shortfall) {
                best_shortfall = shortfall;
                best = s;
            }
        }
        assignment.by_donor[donor] = static_cast<Split>(best);
        assigned[best] += static_cast<double>(donor_cells[donor]);
        assignment.cells[best] += donor_cells[donor];
    }
    for (std::size_t s = 0; s < 3; ++s) {
        assignment.achieved[s] = static_cast<double>(assignment.cells[s]) / total;
    }
    return assignment;
}

void write_split_tsv(const SplitAssignment& assignment, std::ostream& out) {
    out << "donor_id\tsplit\n";
    for (const auto& [donor, split] : assignment.by_donor) {
        out << donor << '\t' << to_string(split) << '\n';
    }
}

SplitAssignment read_split_tsv(std::istream& in) {
    const Table table = read_table(in, '\t');
    const std::size_t donor_col = table.require_column("donor_id");
    const std::size_t split_col = table.require_column("split");
    SplitAssignment assignment;
    for (const auto& row : table.rows()) {
        Split split;
        if (row[split_col] == "train") {
            split = Split::train;
        } else if (row[split_col] == "val") {
            split = Split::val;
        } else if (row[split_col] == "test") {
            split = Split::test;
        } else {
            throw ValidationError("unknown split '" + row[split_col] + "'");
        }
        if (!assignment.by_donor.emplace(row[donor_col], split).second) {
            throw ValidationError("donor '" + row[donor_col] + "' assigned twice");
        }
        ++assignment.cells[static_cast<std::size_t>(split)];
    }
    return assignment;
}

} // namespace celldesc
