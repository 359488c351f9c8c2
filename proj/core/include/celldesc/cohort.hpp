#ifndef CELLDESC_COHORT_HPP_
#define CELLDESC_COHORT_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "celldesc/table.hpp"

namespace celldesc {

/// Normalized Shannon entropy: -sum p ln p / ln K over the K categories with
/// positive count; K = 1 is defined as 0. All-zero counts throw.
double shannon_diversity(std::span<const std::size_t> counts);

/// shannon_diversity over the value counts of one column.
double column_diversity(const Table& table, std::string_view column);

/// Existing column name for a logical one ("cell_type" also accepts
/// "cell_type_name"); throws ValidationError when neither exists.
std::string resolve_column(const Table& table, std::string_view logical);

struct AssayFilterReport {
    Table table;
    std::map<std::string, std::size_t> removed_by_assay;
    std::size_t removed_rows = 0;
};

/// Case-insensitive substring patterns for the excluded full-length and
/// targeted assay families.
std::span<const std::string> default_assay_exclusions();

/// Drops rows whose assay matches any pattern (case-insensitive substring).
AssayFilterReport assay_filter(const Table& table, std::span<const std::string> patterns);

/// Greedy diversity-maximizing subsample: rows are grouped into joint strata
/// over the objective columns; each step takes a random row (seeded) from the
/// stratum whose selection most increases the summed normalized Shannon
/// diversity across those columns, ties broken by stratum key order.
/// Deterministic given the seed.
Table stratified_sample(const Table& table, std::size_t target_n,
                        std::span<const std::string> objective_columns, std::uint64_t seed);

enum class Split { train, val, test };

std::string_view to_string(Split split);

struct SplitAssignment {
    std::map<std::string, Split> by_donor;
    std::array<std::size_t, 3> cells{};  // cell counts per split
    std::array<double, 3> achieved{};    // cell-count fractions per split
};

/// Donors are shuffled by seed, then each goes to the split with the largest
/// remaining cell-count shortfall against its target ratio (ties favor
/// train, then val). No donor ever lands in two splits. Fewer than 3 donors
/// or ratios not summing to 1 throw.
SplitAssignment donor_split(const Table& table, std::array<double, 3> ratios,
                            std::uint64_t seed);

/// TSV with header donor_id\tsplit, donors in sorted order.
void write_split_tsv(const SplitAssignment& assignment, std::ostream& out);
SplitAssignment read_split_tsv(std::istream& in);

} // namespace celldesc

#endif // CELLDESC_COHORT_HPP_
