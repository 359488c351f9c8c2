#include "celldesc/text_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <unordered_map>

#include <json.hpp>

#include "celldesc/errors.hpp"

namespace celldesc {
namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

/// Joins k consecutive tokens with an unprintable separator for map keys.
std::unordered_map<std::string, std::size_t> ngram_counts(std::span<const std::string> tokens,
                                                          std::size_t k) {
    std::unordered_map<std::string, std::size_t> counts;
    if (tokens.size() < k) return counts;
    for (std::size_t i = 0; i + k <= tokens.size(); ++i) {
        std::string key;
        for (std::size_t j = 0; j < k; ++j) {
            if (j > 0) key += '\x1f';
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

std::size_t clipped_matches(const std::unordered_map<std::string, std::size_t>& cand,
                            const std::unordered_map<std::string, std::size_t>& ref) {
    std::size_t matches = 0;
    for (const auto& [gram, count] : cand) {
        const auto it = ref.find(gram);
        if (it != ref.end()) matches += std::min(count, it->second);
    }
    return matches;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1
                                            : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double smoothed_precision(std::size_t matches, std::size_t total) {
    if (total > 0 && matches > 0) {
        return static_cast<double>(matches) / static_cast<double>(total);
    }
    return 1.0 / (2.0 * static_cast<double>(std::max<std::size_t>(1, total)));
}

double brevity_penalty(std::size_t pred_len, std::size_t ref_len) {
    if (pred_len > ref_len) return 1.0;
    return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(pred_len));
}

void check_pair_counts(std::size_t preds, std::size_t refs) {
    if (preds != refs) throw ValidationError("prediction/reference count mismatch");
    if (preds == 0) throw ValidationError("no pairs to score");
}

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string word;
    for (const char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_word_byte(c)) {
            word += static_cast<char>(std::tolower(c));
        } else {
            if (!word.empty()) {
                tokens.push_back(std::move(word));
                word.clear();
            }
            if (!std::isspace(c)) tokens.emplace_back(1, ch);
        }
    }
    if (!word.empty()) tokens.push_back(std::move(word));
    return tokens;
}

bool exact_match(std::string_view pred, std::string_view ref) { return pred == ref; }

double corpus_exact_match(std::span<const std::string> preds, std::span<const std::string> refs) {
    check_pair_counts(preds.size(), refs.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (exact_match(preds[i], refs[i])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double sentence_bleu(std::span<const std::string> pred, std::span<const std::string> ref,
                     int max_n, std::vector<std::string>* warnings) {
    if (max_n < 1) throw ValidationError("bleu max_n must be positive");
    if (pred.empty()) {
        if (warnings != nullptr) warnings->emplace_back("empty prediction scored 0");
        return 0.0;
    }
    double log_sum = 0.0;
    for (int k = 1; k <= max_n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const std::size_t total = pred.size() >= ku ? pred.size() - ku + 1 : 0;
        const std::size_t matches =
            clipped_matches(ngram_counts(pred, ku), ngram_counts(ref, ku));
        log_sum += std::log(smoothed_precision(matches, total)) / max_n;
    }
    return brevity_penalty(pred.size(), ref.size()) * std::exp(log_sum);
}

double corpus_bleu(std::span<const std::vector<std::string>> preds,
                   std::span<const std::vector<std::string>> refs, int max_n, bool pooled,
                   std::vector<std::string>* warnings) {
    check_pair_counts(preds.size(), refs.size());
    if (!pooled) {
        double sum = 0.0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            sum += sentence_bleu(preds[i], refs[i], max_n, warnings);
        }
        return sum / static_cast<double>(preds.size());
    }

    std::vector<std::size_t> matches(static_cast<std::size_t>(max_n), 0);
    std::vector<std::size_t> totals(static_cast<std::size_t>(max_n), 0);
    std::size_t pred_len = 0, ref_len = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].empty() && warnings != nullptr) {
            warnings->emplace_back("empty prediction scored 0");
        }
        pred_len += preds[i].size();
        ref_len += refs[i].size();
        for (int k = 1; k <= max_n; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            totals[ku - 1] += preds[i].size() >= ku ? preds[i].size() - ku + 1 : 0;
            matches[ku - 1] +=
                clipped_matches(ngram_counts(preds[i], ku), ngram_counts(refs[i], ku));
        }
    }
    if (pred_len == 0) return 0.0;
    double log_sum = 0.0;
    for (int k = 1; k <= max_n; ++k) {
        log_sum += std::log(smoothed_precision(matches[static_cast<std::size_t>(k) - 1],
                                               totals[static_cast<std::size_t>(k) - 1])) /
                   max_n;
    }
    return brevity_penalty(pred_len, ref_len) * std::exp(log_sum);
}

double rouge_n(std::span<const std::string> pred, std::span<const std::string> ref, int n) {
    if (n < 1) throw ValidationError("rouge n must be positive");
    const auto nu = static_cast<std::size_t>(n);
    if (ref.size() < nu) {
        throw ValidationError("reference has no " + std::to_string(n) + "-grams");
    }
    const std::size_t total = ref.size() - nu + 1;
    const std::size_t matches = clipped_matches(ngram_counts(pred, nu), ngram_counts(ref, nu));
    return static_cast<double>(matches) / static_cast<double>(total);
}

double rouge_l(std::span<const std::string> pred, std::span<const std::string> ref, double beta) {
    if (ref.empty()) throw ValidationError("empty reference");
    const std::size_t lcs = lcs_length(pred, ref);
    if (lcs == 0) return 0.0;
    const double recall = static_cast<double>(lcs) / static_cast<double>(ref.size());
    const double precision = static_cast<double>(lcs) / static_cast<double>(pred.size());
    const double b2 = beta * beta;
    return (1.0 + b2) * precision * recall / (recall + b2 * precision);
}

double corpus_rouge_n(std::span<const std::vector<std::string>> preds,
                      std::span<const std::vector<std::string>> refs, int n) {
    check_pair_counts(preds.size(), refs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) sum += rouge_n(preds[i], refs[i], n);
    return sum / static_cast<double>(preds.size());
}

double corpus_rouge_l(std::span<const std::vector<std::string>> preds,
                      std::span<const std::vector<std::string>> refs, double beta) {
    check_pair_counts(preds.size(), refs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) sum += rouge_l(preds[i], refs[i], beta);
    return sum / static_cast<double>(preds.size());
}

namespace {

std::vector<double> row_norms(const std::vector<std::vector<double>>& m, std::size_t dim) {
    std::vector<double> norms;
    norms.reserve(m.size());
    for (const auto& row : m) {
        if (row.size() != dim) throw ValidationError("embedding dimensionality mismatch");
        double sq = 0.0;
        for (const double x : row) sq += x * x;
        if (sq == 0.0) throw ValidationError("zero-norm embedding row");
        norms.push_back(std::sqrt(sq));
    }
    return norms;
}

double directed_mean_max_cosine(const std::vector<std::vector<double>>& from,
                                const std::vector<double>& from_norms,
                                const std::vector<std::vector<double>>& to,
                                const std::vector<double>& to_norms) {
    double sum = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        double best = -1.0;
        for (std::size_t j = 0; j < to.size(); ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < from[i].size(); ++k) dot += from[i][k] * to[j][k];
            best = std::max(best, dot / (from_norms[i] * to_norms[j]));
        }
        sum += best;
    }
    return sum / static_cast<double>(from.size());
}

} // namespace

EmbeddingScore embedding_score(const std::vector<std::vector<double>>& pred,
                               const std::vector<std::vector<double>>& ref) {
    if (pred.empty() || ref.empty()) throw ValidationError("empty embedding matrix");
    const std::size_t dim = pred.front().size();
    if (dim == 0) throw ValidationError("zero-dimensional embeddings");
    const std::vector<double> pred_norms = row_norms(pred, dim);
    const std::vector<double> ref_norms = row_norms(ref, dim);

    EmbeddingScore score;
    score.precision =
        std::clamp(directed_mean_max_cosine(pred, pred_norms, ref, ref_norms), 0.0, 1.0);
    score.recall =
        std::clamp(directed_mean_max_cosine(ref, ref_norms, pred, pred_norms), 0.0, 1.0);
    const double denom = score.precision + score.recall;
    score.f1 = denom == 0.0 ? 0.0 : 2.0 * score.precision * score.recall / denom;
    return score;
}

std::vector<EmbeddingPair> read_embedding_pairs(std::istream& in) {
    std::vector<EmbeddingPair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad embedding JSON: ") + e.what(), line_no);
        }
        EmbeddingPair pair;
        try {
            pair.cell_id = obj.at("cell_id").get<std::string>();
            pair.pred_vectors = obj.at("pred_vectors").get<std::vector<std::vector<double>>>();
            pair.ref_vectors = obj.at("ref_vectors").get<std::vector<std::vector<double>>>();
            if (obj.contains("pred_tokens") &&
                obj["pred_tokens"].size() != pair.pred_vectors.size()) {
                throw ParseError("pred_tokens/pred_vectors length mismatch", line_no);
            }
            if (obj.contains("ref_tokens") &&
                obj["ref_tokens"].size() != pair.ref_vectors.size()) {
                throw ParseError("ref_tokens/ref_vectors length mismatch", line_no);
            }
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad embedding record: ") + e.what(), line_no);
        }
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

EmbeddingScore corpus_embedding_score(std::span<const EmbeddingPair> pairs) {
    if (pairs.empty()) throw ValidationError("no embedding pairs");
    EmbeddingScore total;
    for (const auto& pair : pairs) {
        const EmbeddingScore s = embedding_score(pair.pred_vectors, pair.ref_vectors);
        total.precision += s.precision;
        total.recall += s.recall;
        total.f1 += s.f1;
    }
    const auto n = static_cast<double>(pairs.size());
    return {total.precision / n, total.recall / n, total.f1 / n};
}

GenerationReport evaluate_generation(std::span<const std::string> preds,
                                     std::span<const std::string> refs, bool pooled_bleu,
                                     double rouge_beta) {
    check_pair_counts(preds.size(), refs.size());
    GenerationReport report;
    report.exact_match = corpus_exact_match(preds, refs);

    std::vector<std::vector<std::string>> pred_tokens(preds.size()), ref_tokens(refs.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        pred_tokens[i] = tokenize(preds[i]);
        ref_tokens[i] = tokenize(refs[i]);
        if (pred_tokens[i].empty()) {
            report.warnings.push_back("pair " + std::to_string(i + 1) +
                                      ": empty prediction scored 0");
        }
    }
    report.bleu2 = corpus_bleu(pred_tokens, ref_tokens, 2, pooled_bleu, nullptr);
    report.bleu4 = corpus_bleu(pred_tokens, ref_tokens, 4, pooled_bleu, nullptr);
    report.rouge1 = corpus_rouge_n(pred_tokens, ref_tokens, 1);
    report.rouge2 = corpus_rouge_n(pred_tokens, ref_tokens, 2);
    report.rougeL = corpus_rouge_l(pred_tokens, ref_tokens, rouge_beta);
    return report;
}

} // namespace celldesc
