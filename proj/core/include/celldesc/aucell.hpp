#ifndef CELLDESC_AUCELL_HPP_
#define CELLDESC_AUCELL_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace celldesc {

/// Sparse nonnegative cells-by-genes matrix in CSR form.
struct ExpressionMatrix {
    std::vector<std::string> cells;
    std::vector<std::string> genes;
    std::vector<std::size_t> row_ptr; // cells.size() + 1 offsets into col_idx
    std::vector<std::size_t> col_idx;
    std::vector<double> values;

    std::size_t n_cells() const { return cells.size(); }
    std::size_t n_genes() const { return genes.size(); }
    std::vector<double> dense_row(std::size_t cell) const;

    /// Checks shape consistency, unique ids, and nonnegative values.
    void validate() const;
};

/// MatrixMarket coordinate file with id sidecars `path + ".rows.txt"` (cells)
/// and `path + ".cols.txt"` (genes), or a dense CSV whose first column is the
/// cell id and whose header names the genes. Chosen by the ".mtx" suffix.
ExpressionMatrix read_expression_matrix(const std::string& path);
ExpressionMatrix read_dense_csv(std::istream& in);

struct GeneSet {
    std::string id;
    std::string name;
    std::vector<std::string> genes; // sorted, unique, nonempty
};

/// GMT rows: set_id  description  gene1  gene2 ...
std::vector<GeneSet> read_gmt(std::istream& in);
std::vector<GeneSet> read_gmt_file(const std::string& path);

struct HvgResult {
    std::vector<std::string> genes; // ranked by within-bin dispersion z-score
    std::vector<std::string> warnings;
};

/// Binned-dispersion selection: genes with positive variance are split into
/// min(20, candidates) equal-frequency mean bins; dispersion (variance/mean)
/// is z-scored within each bin; top n_top by z-score, ties by gene symbol.
/// Fewer candidates than n_top returns them all with a warning.
HvgResult select_hvg(const ExpressionMatrix& expr, std::size_t n_top);

/// Restricts the gene axis to `keep` (matrix order preserved).
ExpressionMatrix subset_genes(const ExpressionMatrix& expr, std::span<const std::string> keep);

/// Reorders the cell axis to exactly `cells`; a missing cell id is an error.
ExpressionMatrix subset_cells(const ExpressionMatrix& expr, std::span<const std::string> cells);

/// Recovery-curve AUC: genes ranked descending by expression (ties by gene
/// symbol), the curve counts gene-set members within the top
/// ceil(top_fraction * G) ranks, and the area is normalized by its maximum
/// (all members at the top). A set disjoint from the matrix genes scores 0
/// with a warning.
double aucell_score(const ExpressionMatrix& expr, std::size_t cell_index, const GeneSet& set,
                    double top_fraction, std::vector<std::string>* warnings = nullptr);

struct ActivityMatrix {
    std::vector<std::string> cells;
    std::vector<std::string> pathways;
    std::vector<double> values; // row-major, [0,1]
    std::vector<std::string> warnings;

    double at(std::size_t cell, std::size_t pathway) const {
        return values[cell * pathways.size() + pathway];
    }
};

ActivityMatrix score_matrix(const ExpressionMatrix& expr, std::span<const GeneSet> sets,
                            double top_fraction = 0.05);

void write_activity_csv(const ActivityMatrix& activity, std::ostream& out);

struct RankedPathway {
    std::string id;
    double score = 0.0;
};

/// Per cell, the k highest-scoring pathways, ties broken by pathway id.
std::vector<std::vector<RankedPathway>> top_k_pathways(const ActivityMatrix& activity,
                                                       std::size_t k = 2);

struct PrevalenceReport {
    std::vector<std::string> retained;        // active fraction >= threshold, sorted
    std::map<std::string, double> prevalence; // every universe or observed pathway
};

/// "Active in a cell" means present in that cell's top-k list; pathways below
/// the threshold fraction are removed (strict less-than).
PrevalenceReport prevalence_filter(std::span<const std::vector<RankedPathway>> top_lists,
                                   std::span<const std::string> universe,
                                   double threshold = 0.005);

} // namespace celldesc

#endif // CELLDESC_AUCELL_HPP_
