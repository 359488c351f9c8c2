#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "celldesc/cohort.hpp"
#include "celldesc/errors.hpp"
#include "celldesc/table.hpp"
#include "support/oracles.hpp"

using celldesc::Split;
using celldesc::Table;
using Counts = std::vector<std::size_t>;

namespace {

/// 90 rows of one cell type followed by 10 of another, single donor column.
Table skewed_cohort() {
    Table table({"cell_id", "cell_type", "donor_id"});
    for (int i = 0; i < 90; ++i) {
        table.add_row({"c" + std::to_string(i), "A", "d" + std::to_string(i % 5)});
    }
    for (int i = 90; i < 100; ++i) {
        table.add_row({"c" + std::to_string(i), "B", "d" + std::to_string(i % 5)});
    }
    return table;
}

std::map<std::string, std::size_t> column_counts(const Table& table, std::string_view column) {
    const std::size_t col = table.require_column(column);
    std::map<std::string, std::size_t> counts;
    for (const auto& row : table.rows()) ++counts[row[col]];
    return counts;
}

} // namespace

TEST_SUITE_BEGIN("cohort");

TEST_CASE("shannon diversity of a 3 to 1 split") {
    const Counts counts = {3, 1};
    CHECK(celldesc::shannon_diversity(counts) == doctest::Approx(0.811278).epsilon(1e-6));
}

TEST_CASE("zero counts do not change the diversity") {
    const Counts plain = {3, 1};
    const Counts padded = {3, 0, 1, 0, 0};
    CHECK(celldesc::shannon_diversity(padded) == celldesc::shannon_diversity(plain));
}

TEST_CASE("diversity extremes") {
    CHECK(celldesc::shannon_diversity(Counts{7}) == 0.0);
    CHECK(celldesc::shannon_diversity(Counts{7, 0, 0}) == 0.0);
    CHECK(celldesc::shannon_diversity(Counts{1, 1, 1, 1}) == 1.0);
    CHECK(celldesc::shannon_diversity(Counts{2, 2, 2, 2}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(celldesc::shannon_diversity(Counts{}), celldesc::ValidationError);
    CHECK_THROWS_AS(celldesc::shannon_diversity(Counts{0, 0}), celldesc::ValidationError);
}

TEST_CASE("random count vectors agree with the plogp oracle") {
    std::mt19937_64 rng(50215);
    std::uniform_int_distribution<int> n_cats(2, 12);
    std::uniform_int_distribution<std::size_t> count(0, 40);
    int informative = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Counts counts(static_cast<std::size_t>(n_cats(rng)));
        for (auto& c : counts) c = count(rng);
        std::size_t total = 0;
        for (const auto c : counts) total += c;
        if (total == 0) continue;
        ++informative;
        const double got = celldesc::shannon_diversity(counts);
        CHECK(std::fabs(got - testsupport::oracle_entropy(counts)) <= 1e-12);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0 + 1e-12);
    }
    CHECK(informative > 90);
}

TEST_CASE("column diversity counts distinct values") {
    Table table({"cell_type"});
    table.add_row({"A"});
    table.add_row({"A"});
    table.add_row({"A"});
    table.add_row({"B"});
    CHECK(celldesc::column_diversity(table, "cell_type") ==
          doctest::Approx(0.811278).epsilon(1e-6));
    CHECK_THROWS_AS(celldesc::column_diversity(table, "tissue"), celldesc::ValidationError);

    const Table empty({"cell_type"});
    CHECK_THROWS_AS(celldesc::column_diversity(empty, "cell_type"), celldesc::ValidationError);
}

TEST_CASE("resolve column honors the cell type alias") {
    Table table({"cell_type_name", "tissue"});
    CHECK(celldesc::resolve_column(table, "cell_type") == "cell_type_name");
    CHECK(celldesc::resolve_column(table, "tissue") == "tissue");
    CHECK_THROWS_AS(celldesc::resolve_column(table, "disease"), celldesc::ValidationError);

    Table direct({"cell_type", "cell_type_name"});
    CHECK(celldesc::resolve_column(direct, "cell_type") == "cell_type");
}

TEST_CASE("assay filter removes matching rows case-insensitively") {
    Table table({"cell_id", "assay"});
    table.add_row({"c1", "10x 3' v3"});
    table.add_row({"c2", "Smart-seq2"});
    table.add_row({"c3", "10X Flex"});
    table.add_row({"c4", "Drop-seq"});
    table.add_row({"c5", "BD Rhapsody Targeted mRNA"});
    table.add_row({"c6", "smart-SEQ v4"});

    const auto report = celldesc::assay_filter(table, celldesc::default_assay_exclusions());
    CHECK(report.removed_rows == 4);
    CHECK(report.table.row_count() == 2);
    CHECK(report.table.cell(0, 0) == "c1");
    CHECK(report.table.cell(1, 0) == "c4");
    CHECK(report.removed_by_assay.at("Smart-seq2") == 1);
    CHECK(report.removed_by_assay.at("10X Flex") == 1);
    CHECK(report.removed_by_assay.at("BD Rhapsody Targeted mRNA") == 1);
    CHECK(report.removed_by_assay.at("smart-SEQ v4") == 1);
}

TEST_CASE("assay filter with no patterns keeps everything") {
    Table table({"cell_id", "assay"});
    table.add_row({"c1", "Smart-seq2"});
    const std::vector<std::string> none;
    const auto report = celldesc::assay_filter(table, none);
    CHECK(report.removed_rows == 0);
    CHECK(report.table.row_count() == 1);
}

TEST_CASE("assay filter needs the assay column") {
    Table table({"cell_id"});
    table.add_row({"c1"});
    CHECK_THROWS_AS(celldesc::assay_filter(table, celldesc::default_assay_exclusions()),
                    celldesc::ValidationError);
}

TEST_CASE("default assay exclusions cover the targeted families") {
    const auto patterns = celldesc::default_assay_exclusions();
    const std::vector<std::string> expected = {"smart-seq", "quartz-seq", "gexscope",
                                               "bd rhapsody targeted", "10x flex"};
    REQUIRE(patterns.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(patterns[i] == expected[i]);
}

TEST_CASE("stratified sample balances a skewed cohort") {
    const Table cohort = skewed_cohort();
    const std::vector<std::string> objectives = {"cell_type"};
    const Table sample = celldesc::stratified_sample(cohort, 20, objectives, 7);

    REQUIRE(sample.row_count() == 20);
    const auto counts = column_counts(sample, "cell_type");
    // Greedy entropy steps alternate strata until the minority is exhausted.
    CHECK(counts.at("A") == 10);
    CHECK(counts.at("B") == 10);
    CHECK(celldesc::column_diversity(sample, "cell_type") == doctest::Approx(1.0));

    // A head slice of the same size has no diversity at all.
    std::vector<std::size_t> head(20);
    for (std::size_t i = 0; i < head.size(); ++i) head[i] = i;
    CHECK(celldesc::column_diversity(cohort.select_rows(head), "cell_type") == 0.0);
}

TEST_CASE("stratified sample is deterministic per seed") {
    const Table cohort = skewed_cohort();
    const std::vector<std::string> objectives = {"cell_type"};
    const Table a = celldesc::stratified_sample(cohort, 30, objectives, 1234);
    const Table b = celldesc::stratified_sample(cohort, 30, objectives, 1234);
    REQUIRE(a.row_count() == b.row_count());
    CHECK(a.rows() == b.rows());
}

TEST_CASE("sampling every row returns a permutation of the table") {
    const Table cohort = skewed_cohort();
    const std::vector<std::string> objectives = {"cell_type"};
    const Table sample = celldesc::stratified_sample(cohort, cohort.row_count(), objectives, 9);
    REQUIRE(sample.row_count() == cohort.row_count());
    auto sampled_ids = column_counts(sample, "cell_id");
    CHECK(sampled_ids.size() == cohort.row_count()); // every id exactly once
}

TEST_CASE("sampled rows come from the input table") {
    Table cohort({"cell_id", "cell_type", "tissue"});
    for (int i = 0; i < 30; ++i) {
        cohort.add_row({"c" + std::to_string(i), i % 3 == 0 ? "A" : "B",
                        i % 2 == 0 ? "lung" : "blood"});
    }
    const std::vector<std::string> objectives = {"cell_type", "tissue"};
    const Table sample = celldesc::stratified_sample(cohort, 12, objectives, 42);
    REQUIRE(sample.row_count() == 12);

    const auto universe = column_counts(cohort, "cell_id");
    auto seen = column_counts(sample, "cell_id");
    CHECK(seen.size() == 12); // no row sampled twice
    for (const auto& [id, n] : seen) {
        CHECK(universe.count(id) == 1);
        CHECK(n == 1);
    }
}

TEST_CASE("stratified sample argument validation") {
    const Table cohort = skewed_cohort();
    const std::vector<std::string> objectives = {"cell_type"};
    CHECK_THROWS_AS(celldesc::stratified_sample(cohort, 0, objectives, 1),
                    celldesc::ValidationError);
    CHECK_THROWS_AS(celldesc::stratified_sample(cohort, 101, objectives, 1),
                    celldesc::ValidationError);
    const std::vector<std::string> none;
    CHECK_THROWS_AS(celldesc::stratified_sample(cohort, 5, none, 1), celldesc::ValidationError);
    const std::vector<std::string> ghost = {"no_such_column"};
    CHECK_THROWS_AS(celldesc::stratified_sample(cohort, 5, ghost, 1), celldesc::ValidationError);
}

TEST_CASE("donor split keeps each donor in one split") {
    Table cohort({"cell_id", "donor_id"});
    int cell = 0;
    for (int d = 0; d < 30; ++d) {
        for (int i = 0; i < 10; ++i) {
            cohort.add_row({"c" + std::to_string(cell++), "D" + std::to_string(d)});
        }
    }
    const std::array<double, 3> ratios{0.8, 0.1, 0.1};
    const auto assignment = celldesc::donor_split(cohort, ratios, 99);

    CHECK(assignment.by_donor.size() == 30);
    CHECK(assignment.cells[0] + assignment.cells[1] + assignment.cells[2] == 300);

    // Cell-level leakage check: every cell of a donor shares that donor's split.
    std::map<std::string, std::map<std::string, int>> splits_seen;
    const std::size_t donor_col = cohort.require_column("donor_id");
    for (std::size_t r = 0; r < cohort.row_count(); ++r) {
        const auto& donor = cohort.cell(r, donor_col);
        const Split s = assignment.by_donor.at(donor);
        ++splits_seen[donor][std::string(celldesc::to_string(s))];
    }
    for (const auto& [donor, seen] : splits_seen) CHECK(seen.size() == 1);

    // Greedy shortfall assignment lands within one donor of each target.
    for (std::size_t s = 0; s < 3; ++s) {
        CHECK(std::fabs(assignment.achieved[s] - ratios[s]) <= 10.0 / 300.0 + 1e-9);
    }
}

TEST_CASE("donor split is deterministic per seed") {
    Table cohort({"cell_id", "donor_id"});
    for (int i = 0; i < 40; ++i) {
        cohort.add_row({"c" + std::to_string(i), "D" + std::to_string(i % 8)});
    }
    const std::array<double, 3> ratios{0.6, 0.2, 0.2};
    const auto a = celldesc::donor_split(cohort, ratios, 5);
    const auto b = celldesc::donor_split(cohort, ratios, 5);
    CHECK(a.by_donor == b.by_donor);
    CHECK(a.cells == b.cells);
}

TEST_CASE("donor split argument validation") {
    Table cohort({"cell_id", "donor_id"});
    cohort.add_row({"c1", "D1"});
    cohort.add_row({"c2", "D2"});
    cohort.add_row({"c3", "D3"});

    SUBCASE("ratios must sum to one") {
        CHECK_THROWS_AS(celldesc::donor_split(cohort, {0.5, 0.2, 0.2}, 1),
                        celldesc::ValidationError);
    }
    SUBCASE("negative ratio") {
        CHECK_THROWS_AS(celldesc::donor_split(cohort, {1.2, -0.1, -0.1}, 1),
                        celldesc::ValidationError);
    }
    SUBCASE("fewer than three donors") {
        Table two({"cell_id", "donor_id"});
        two.add_row({"c1", "D1"});
        two.add_row({"c2", "D2"});
        CHECK_THROWS_AS(celldesc::donor_split(two, {0.8, 0.1, 0.1}, 1),
                        celldesc::ValidationError);
    }
    SUBCASE("empty donor id names the row") {
        Table blank({"cell_id", "donor_id"});
        blank.add_row({"c1", "D1"});
        blank.add_row({"c2", ""});
        try {
            celldesc::donor_split(blank, {0.8, 0.1, 0.1}, 1);
            FAIL("expected ValidationError");
        } catch (const celldesc::ValidationError& e) {
            CHECK(std::string(e.what()).find("row 2") != std::string::npos);
        }
    }
    SUBCASE("missing donor column") {
        Table none({"cell_id"});
        none.add_row({"c1"});
        CHECK_THROWS_AS(celldesc::donor_split(none, {0.8, 0.1, 0.1}, 1),
                        celldesc::ValidationError);
    }
}

TEST_CASE("three donors split one per way under equal ratios") {
    Table cohort({"cell_id", "donor_id"});
    cohort.add_row({"c1", "D1"});
    cohort.add_row({"c2", "D2"});
    cohort.add_row({"c3", "D3"});
    const auto assignment =
        celldesc::donor_split(cohort, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 17);
    std::array<int, 3> donors_per_split{};
    for (const auto& [donor, split] : assignment.by_donor) {
        ++donors_per_split[static_cast<std::size_t>(split)];
    }
    CHECK(donors_per_split == std::array<int, 3>{1, 1, 1});
}

TEST_CASE("split tsv writes donors in sorted order") {
    celldesc::SplitAssignment assignment;
    assignment.by_donor["D2"] = Split::val;
    assignment.by_donor["D1"] = Split::train;
    assignment.by_donor["D3"] = Split::test;
    std::ostringstream out;
    celldesc::write_split_tsv(assignment, out);
    CHECK(out.str() ==
          "donor_id\tsplit\n"
          "D1\ttrain\n"
          "D2\tval\n"
          "D3\ttest\n");
}

TEST_CASE("split tsv round trips donor assignments") {
    celldesc::SplitAssignment assignment;
    assignment.by_donor["D1"] = Split::train;
    assignment.by_donor["D2"] = Split::train;
    assignment.by_donor["D3"] = Split::val;
    assignment.by_donor["D4"] = Split::test;
    std::ostringstream out;
    celldesc::write_split_tsv(assignment, out);

    std::istringstream in(out.str());
    const auto read = celldesc::read_split_tsv(in);
    CHECK(read.by_donor == assignment.by_donor);
    // The reader counts one entry per donor row.
    CHECK(read.cells == std::array<std::size_t, 3>{2, 1, 1});
}

TEST_CASE("split tsv reader rejects bad files") {
    SUBCASE("unknown split word") {
        std::istringstream in("donor_id\tsplit\nD1\tholdout\n");
        CHECK_THROWS_AS(celldesc::read_split_tsv(in), celldesc::ValidationError);
    }
    SUBCASE("duplicate donor") {
        std::istringstream in("donor_id\tsplit\nD1\ttrain\nD1\tval\n");
        CHECK_THROWS_AS(celldesc::read_split_tsv(in), celldesc::ValidationError);
    }
    SUBCASE("missing split column") {
        std::istringstream in("donor_id\nD1\n");
        CHECK_THROWS_AS(celldesc::read_split_tsv(in), celldesc::ValidationError);
    }
}

TEST_SUITE_END();
