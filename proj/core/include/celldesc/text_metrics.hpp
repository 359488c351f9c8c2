#ifndef CELLDESC_TEXT_METRICS_HPP_
#define CELLDESC_TEXT_METRICS_HPP_

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace celldesc {

/// Lowercases, splits punctuation into standalone tokens, then splits on
/// whitespace. Bytes >= 0x80 count as word characters so UTF-8 stays intact.
std::vector<std::string> tokenize(std::string_view text);

/// Character-for-character equality.
bool exact_match(std::string_view pred, std::string_view ref);
double corpus_exact_match(std::span<const std::string> preds, std::span<const std::string> refs);

/// BLEU with uniform 1/max_n weights and clipped modified precision. Zero
/// precisions are floored at 1/(2 * candidate k-gram count) before the log.
/// Empty prediction scores 0 and appends to `warnings` when given.
double sentence_bleu(std::span<const std::string> pred, std::span<const std::string> ref,
                     int max_n, std::vector<std::string>* warnings = nullptr);

/// Mean sentence BLEU, or classic pooled corpus BLEU when `pooled` is set
/// (n-gram statistics and lengths summed before the precision ratio).
double corpus_bleu(std::span<const std::vector<std::string>> preds,
                   std::span<const std::vector<std::string>> refs, int max_n, bool pooled,
                   std::vector<std::string>* warnings = nullptr);

/// Clipped n-gram recall against the reference. Reference without any n-gram
/// throws ValidationError.
double rouge_n(std::span<const std::string> pred, std::span<const std::string> ref, int n);

/// LCS F-measure with beta weighting recall. Empty reference throws.
double rouge_l(std::span<const std::string> pred, std::span<const std::string> ref,
               double beta = 1.2);

double corpus_rouge_n(std::span<const std::vector<std::string>> preds,
                      std::span<const std::vector<std::string>> refs, int n);
double corpus_rouge_l(std::span<const std::vector<std::string>> preds,
                      std::span<const std::vector<std::string>> refs, double beta = 1.2);

struct EmbeddingScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Greedy alignment: precision is the mean over prediction rows of the best
/// cosine against any reference row, recall the converse, F1 the harmonic
/// mean. Means are clamped to [0, 1]. Empty input, dimensionality mismatch,
/// or a zero-norm row throws ValidationError.
EmbeddingScore embedding_score(const std::vector<std::vector<double>>& pred,
                               const std::vector<std::vector<double>>& ref);

/// One cell's pre-computed token embeddings for both sides of the comparison.
struct EmbeddingPair {
    std::string cell_id;
    std::vector<std::vector<double>> pred_vectors;
    std::vector<std::vector<double>> ref_vectors;
};

/// JSON-lines {cell_id, pred_tokens, pred_vectors, ref_tokens, ref_vectors};
/// token lists are optional but must match their vector counts when present.
std::vector<EmbeddingPair> read_embedding_pairs(std::istream& in);

/// Per-pair scores averaged over the corpus.
EmbeddingScore corpus_embedding_score(std::span<const EmbeddingPair> pairs);

struct GenerationReport {
    double exact_match = 0.0;
    double bleu2 = 0.0;
    double bleu4 = 0.0;
    double rouge1 = 0.0;
    double rouge2 = 0.0;
    double rougeL = 0.0;
    std::map<std::string, EmbeddingScore> embeddings; // keyed by caller-chosen name
    std::vector<std::string> warnings;
};

/// Scores aligned prediction/reference text pairs. All values stay in [0, 1];
/// scaling for presentation is the caller's concern.
GenerationReport evaluate_generation(std::span<const std::string> preds,
                                     std::span<const std::string> refs, bool pooled_bleu = false,
                                     double rouge_beta = 1.2);

} // namespace celldesc

#endif // CELLDESC_TEXT_METRICS_HPP_
