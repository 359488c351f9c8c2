#include "celldesc/label_metrics.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "celldesc/codec.hpp"
#include "celldesc/errors.hpp"

namespace celldesc {
namespace {

constexpr const char* kAbsentLabel = "∅";

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    const double precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
    const double recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
    return safe_div(2.0 * precision * recall, precision + recall);
}

} // namespace

ClassificationReport classification_report(std::span<const LabelPair> pairs) {
    if (pairs.empty()) throw ValidationError("no label pairs");

    struct Counts {
        std::size_t tp = 0, predicted = 0, support = 0;
    };
    std::map<std::string, Counts> by_class;
    std::size_t correct = 0;
    for (const auto& pair : pairs) {
        if (pair.reference.empty()) {
            throw ValidationError("empty reference label for " + pair.cell_id);
        }
        const bool matched = pair.predicted.has_value() && *pair.predicted == pair.reference;
        const std::string& shown = pair.predicted ? *pair.predicted : kAbsentLabel;
        ++by_class[pair.reference].support;
        ++by_class[shown].predicted;
        if (matched) {
            ++by_class[pair.reference].tp;
            ++correct;
        }
    }

    ClassificationReport report;
    const auto n = static_cast<double>(pairs.size());
    report.accuracy = static_cast<double>(correct) / n;
    for (const auto& [label, c] : by_class) {
        PerClassStats stats;
        stats.label = label;
        stats.support = c.support;
        stats.precision = safe_div(static_cast<double>(c.tp), static_cast<double>(c.predicted));
        stats.recall = safe_div(static_cast<double>(c.tp), static_cast<double>(c.support));
        stats.f1 = safe_div(2.0 * stats.precision * stats.recall, stats.precision + stats.recall);
        report.weighted_f1 += (static_cast<double>(c.support) / n) * stats.f1;
        report.per_class.push_back(std::move(stats));
    }
    return report;
}

MultiLabelReport multilabel_report(std::span<const LabelSetPair> pairs) {
    if (pairs.empty()) throw ValidationError("no label set pairs");

    struct Counts {
        std::size_t tp = 0, fp = 0, fn = 0, ref = 0;
    };
    std::map<std::string, Counts> by_label;
    MultiLabelReport report;
    for (const auto& pair : pairs) {
        if (pair.reference.size() > 2) {
            throw ValidationError("more than two reference pathways for " + pair.cell_id);
        }
        const std::set<std::string> ref(pair.reference.begin(), pair.reference.end());
        const std::set<std::string> pred(pair.predicted.begin(), pair.predicted.end());
        if (ref == pred) report.subset_accuracy += 1.0;

        std::size_t inter = 0;
        for (const auto& label : pred) {
            if (ref.count(label) > 0) ++inter;
        }
        const std::size_t uni = ref.size() + pred.size() - inter;
        report.jaccard += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);

        for (const auto& label : ref) {
            ++by_label[label].ref;
            if (pred.count(label) > 0) {
                ++by_label[label].tp;
            } else {
                ++by_label[label].fn;
            }
        }
        for (const auto& label : pred) {
            if (ref.count(label) == 0) ++by_label[label].fp;
        }
    }

    const auto n = static_cast<double>(pairs.size());
    report.subset_accuracy /= n;
    report.jaccard /= n;

    std::size_t total_ref = 0;
    for (const auto& [label, c] : by_label) total_ref += c.ref;
    if (total_ref > 0) {
        for (const auto& [label, c] : by_label) {
            if (c.ref == 0) continue;
            report.weighted_f1 += (static_cast<double>(c.ref) / static_cast<double>(total_ref)) *
                                  f1_from_counts(c.tp, c.fp, c.fn);
        }
    }
    return report;
}

PsReport pagerank_similarity_score(std::span<const LabelPair> pairs,
                                   const SimilarityMatrix& matrix, const Ontology* ontology,
                                   bool drop_unresolved) {
    if (pairs.empty()) throw ValidationError("no label pairs");

    const auto resolve = [&](std::string_view label) -> std::optional<std::size_t> {
        const CanonicalizeResult hit = canonicalize_label(label, matrix.terms(), ontology);
        if (!hit.matched) return std::nullopt;
        return matrix.term_index(hit.label);
    };

    PsReport report;
    report.per_pair.assign(pairs.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto ref_idx = resolve(pairs[i].reference);
        if (!ref_idx) {
            throw ValidationError("unresolvable reference label: " + pairs[i].reference);
        }
        std::optional<std::size_t> pred_idx;
        if (pairs[i].predicted.has_value()) pred_idx = resolve(*pairs[i].predicted);
        if (!pred_idx) {
            ++report.unresolved_predictions;
            if (!drop_unresolved) ++report.scored_pairs;
            continue;
        }
        const double score =
            *pred_idx == *ref_idx ? 1.0 : matrix.at(*ref_idx, *pred_idx);
        report.per_pair[i] = score;
        sum += score;
        ++report.scored_pairs;
    }
    report.average =
        report.scored_pairs == 0 ? 0.0 : 100.0 * sum / static_cast<double>(report.scored_pairs);
    return report;
}

namespace {

std::vector<std::string> split_labels(std::string_view cell) {
    std::vector<std::string> labels;
    std::size_t start = 0;
    while (start <= cell.size()) {
        std::size_t end = cell.find(';', start);
        if (end == std::string_view::npos) end = cell.size();
        std::string_view piece = cell.substr(start, end - start);
        while (!piece.empty() && (piece.front() == ' ' || piece.front() == '\t')) {
            piece.remove_prefix(1);
        }
        while (!piece.empty() && (piece.back() == ' ' || piece.back() == '\t')) {
            piece.remove_suffix(1);
        }
        if (!piece.empty()) labels.emplace_back(piece);
        if (end == cell.size()) break;
        start = end + 1;
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

} // namespace

std::vector<LabelPair> label_pairs_from_table(const Table& table) {
    const std::size_t id_col = table.require_column("cell_id");
    const std::size_t pred_col = table.require_column("predicted");
    const std::size_t ref_col = table.require_column("reference");
    std::vector<LabelPair> pairs;
    pairs.reserve(table.rows().size());
    for (const auto& row : table.rows()) {
        LabelPair pair;
        pair.cell_id = row[id_col];
        if (!row[pred_col].empty()) pair.predicted = row[pred_col];
        pair.reference = row[ref_col];
        if (pair.reference.empty()) {
            throw ValidationError("empty reference label for " + pair.cell_id);
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::vector<LabelSetPair> labelset_pairs_from_table(const Table& table) {
    const std::size_t id_col = table.require_column("cell_id");
    const std::size_t pred_col = table.require_column("predicted");
    const std::size_t ref_col = table.require_column("reference");
    std::vector<LabelSetPair> pairs;
    pairs.reserve(table.rows().size());
    for (const auto& row : table.rows()) {
        LabelSetPair pair;
        pair.cell_id = row[id_col];
        pair.predicted = split_labels(row[pred_col]);
        pair.reference = split_labels(row[ref_col]);
        if (pair.reference.size() > 2) {
            throw ValidationError("more than two reference pathways for " + pair.cell_id);
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

} // namespace celldesc
