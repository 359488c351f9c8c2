#ifndef CELLDESC_LABEL_METRICS_HPP_
#define CELLDESC_LABEL_METRICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "celldesc/ontology.hpp"
#include "celldesc/similarity.hpp"
#include "celldesc/table.hpp"

namespace celldesc {

/// Absent predicted means the generation was unparseable; it never matches
/// any reference and is reported under the "∅" class.
struct LabelPair {
    std::string cell_id;
    std::optional<std::string> predicted;
    std::string reference;
};

/// Predicted/reference are duplicate-free sorted sets; references carry at
/// most two pathways.
struct LabelSetPair {
    std::string cell_id;
    std::vector<std::string> predicted;
    std::vector<std::string> reference;
};

struct PerClassStats {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0; // reference count; sums to corpus size over all rows
};

struct ClassificationReport {
    double accuracy = 0.0;
    double weighted_f1 = 0.0; // class weights proportional to reference frequency
    std::vector<PerClassStats> per_class;
};

ClassificationReport classification_report(std::span<const LabelPair> pairs);

struct MultiLabelReport {
    double subset_accuracy = 0.0;
    double jaccard = 0.0; // mean IoU; both sets empty counts as 1
    double weighted_f1 = 0.0;
};

MultiLabelReport multilabel_report(std::span<const LabelSetPair> pairs);

struct PsReport {
    double average = 0.0;          // mean per-pair score, reported x100
    std::vector<double> per_pair;  // [0,1], aligned with input; unresolved stay 0
    std::size_t unresolved_predictions = 0;
    std::size_t scored_pairs = 0;  // pairs entering the average
};

/// Per-pair score is the similarity-matrix entry at (reference, predicted);
/// exact matches score 1. References must resolve to matrix terms (via
/// canonicalize_label with the optional ontology) or ValidationError is
/// thrown. Unresolvable predictions score 0 and are counted, or excluded
/// from the average when drop_unresolved is set.
PsReport pagerank_similarity_score(std::span<const LabelPair> pairs,
                                   const SimilarityMatrix& matrix,
                                   const Ontology* ontology = nullptr,
                                   bool drop_unresolved = false);

/// Columns: cell_id, predicted, reference. Empty predicted cell -> absent.
std::vector<LabelPair> label_pairs_from_table(const Table& table);

/// Same columns with ";"-separated label sets; entries are trimmed,
/// deduplicated, and sorted. More than two reference labels is an error.
std::vector<LabelSetPair> labelset_pairs_from_table(const Table& table);

} // namespace celldesc

#endif // CELLDESC_LABEL_METRICS_HPP_
