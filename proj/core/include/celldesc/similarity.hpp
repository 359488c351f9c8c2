#ifndef CELLDESC_SIMILARITY_HPP_
#define CELLDESC_SIMILARITY_HPP_

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "celldesc/ontology.hpp"
#include "celldesc/ppr.hpp"

namespace celldesc {

/// Dense term-by-term similarity matrix. Row i holds S(term_i, term_j) for
/// all j: the log-scaled PPR from term_i, normalized so the diagonal is 1.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    explicit SimilarityMatrix(std::vector<std::string> terms);

    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }

    std::optional<std::size_t> term_index(std::string_view id) const {
        const auto it = std::find(terms_.begin(), terms_.end(), id);
        if (it == terms_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - terms_.begin());
    }

    double at(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
    void set(std::size_t i, std::size_t j, double v) { values_[i * size() + j] = v; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * size(), size()}; }
    std::span<double> row(std::size_t i) { return {values_.data() + i * size(), size()}; }

    bool symmetrized() const { return symmetrized_; }
    void mark_symmetrized() { symmetrized_ = true; }

    /// Binary layout: magic "PPRS", u32 version, u64 n, then n*n row-major
    /// doubles, all little-endian. Term ids live in a sidecar.
    void save(std::ostream& out) const;
    static SimilarityMatrix load(std::istream& in, std::vector<std::string> terms);

    /// Writes `path` plus the sidecar `path + ".terms.tsv"` (one id per row,
    /// row order).
    void save_file(const std::string& path) const;
    static SimilarityMatrix load_file(const std::string& path);
    static SimilarityMatrix load_file(const std::string& path, const std::string& terms_path);

private:
    std::vector<std::string> terms_;
    std::vector<double> values_;
    bool symmetrized_ = false;
};

/// One similarity row: log(1 + PPR(j|i)/tau) / log(1 + PPR(i|i)/tau), clipped
/// to [0,1], with the source entry pinned to exactly 1. Throws ValidationError
/// if the source's own PPR mass is zero.
std::vector<double> similarity_row(const OntologyGraph& graph, std::size_t source_index,
                                   const PprConfig& config);

/// Stacks similarity_row over every node. Rows are independent; with
/// threads != 1 they are computed concurrently and assembled by node index,
/// so the result is identical regardless of scheduling. threads == 0 means
/// hardware concurrency. If symmetrize is set, (i,j) and (j,i) are replaced
/// by their mean.
SimilarityMatrix similarity_matrix(const OntologyGraph& graph, const PprConfig& config,
                                   bool symmetrize = false, int threads = 1);

struct DistributionStats {
    double mean = 0;
    double median = 0;
    double std_dev = 0; // population standard deviation
    double percentile_95 = 0;
    double percentile_99 = 0;
    std::size_t count = 0; // off-diagonal entries considered
};

/// Statistics over all off-diagonal entries (both (i,j) and (j,i)).
/// Percentiles use linear interpolation. Throws ValidationError for matrices
/// with fewer than 2 terms.
DistributionStats similarity_stats(const SimilarityMatrix& matrix);

struct PowerLawFit {
    double exponent_alpha = 0; // |slope| of log density vs log bin center
    double loglog_r2 = 0;
    double rank_frequency_r2 = 0;
    int bins_used = 0;
};

/// Heavy-tail diagnostics over positive samples:
///  (a) 50 logarithmic bins, empty bins dropped, least squares of
///      log(density) on log(bin center); alpha is the slope magnitude;
///  (b) rank-frequency: least squares of log(value) on log(rank).
/// Throws ValidationError for fewer than 10 positive samples or zero variance.
PowerLawFit fit_power_law(std::span<const double> positive_values);

/// fit_power_law applied to the positive off-diagonal entries.
PowerLawFit heavy_tail_fit(const SimilarityMatrix& matrix);

/// Empirical CDF of the off-diagonal entries as "similarity\tcumulative_fraction"
/// lines (header included), one row per distinct value, final fraction 1.0.
void export_cdf(const SimilarityMatrix& matrix, std::ostream& out);

void write_stats_json(const DistributionStats& stats, std::ostream& out);
void write_fit_json(const PowerLawFit& fit, std::ostream& out);

} // namespace celldesc

#endif // CELLDESC_SIMILARITY_HPP_
