#include "celldesc/aucell.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "celldesc/errors.hpp"
#include "celldesc/table.hpp"

namespace celldesc {
namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw ValidationError(std::string("duplicate ") + what + ": " + id);
        }
    }
}

double parse_double(const std::string& text, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad numeric value: " + text, line_no);
    }
}

std::vector<std::string> read_id_sidecar(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open id sidecar: " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ids.push_back(line);
    }
    return ids;
}

ExpressionMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open expression matrix: " + path);

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty MatrixMarket file", 1);
    ++line_no;
    if (line.rfind("%%MatrixMarket", 0) != 0 ||
        line.find("coordinate") == std::string::npos) {
        throw ParseError("expected a MatrixMarket coordinate banner", 1);
    }
    const bool pattern = line.find("pattern") != std::string::npos;

    std::size_t rows = 0, cols = 0, nnz = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '%') continue;
        std::istringstream dims(line);
        if (!(dims >> rows >> cols >> nnz)) throw ParseError("bad dimensions line", line_no);
        break;
    }
    if (rows == 0 || cols == 0) throw ParseError("missing dimensions line", line_no);

    ExpressionMatrix m;
    m.cells = read_id_sidecar(path + ".rows.txt");
    m.genes = read_id_sidecar(path + ".cols.txt");
    if (m.cells.size() != rows) {
        throw ValidationError("row sidecar has " + std::to_string(m.cells.size()) +
                              " ids, matrix has " + std::to_string(rows) + " rows");
    }
    if (m.genes.size() != cols) {
        throw ValidationError("column sidecar has " + std::to_string(m.genes.size()) +
                              " ids, matrix has " + std::to_string(cols) + " columns");
    }

    std::vector<std::vector<std::pair<std::size_t, double>>> per_row(rows);
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '%') continue;
        std::istringstream entry(line);
        std::size_t i = 0, j = 0;
        double v = 1.0;
        if (!(entry >> i >> j)) throw ParseError("bad entry line", line_no);
        if (!pattern && !(entry >> v)) throw ParseError("bad entry line", line_no);
        if (i < 1 || i > rows || j < 1 || j > cols) {
            throw ParseError("entry out of bounds", line_no);
        }
        if (v < 0.0) throw ValidationError("negative expression value at line " +
                                           std::to_string(line_no));
        if (v != 0.0) per_row[i - 1].emplace_back(j - 1, v);
        ++seen;
    }
    if (seen != nnz) {
        throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                         std::to_string(seen), line_no);
    }

    m.row_ptr.assign(rows + 1, 0);
    for (std::size_t r = 0; r < rows; ++r) {
        auto& entries = per_row[r];
        std::sort(entries.begin(), entries.end());
        for (std::size_t k = 1; k < entries.size(); ++k) {
            if (entries[k].first == entries[k - 1].first) {
                throw ValidationError("duplicate entry at row " + std::to_string(r + 1) +
                                      " column " + std::to_string(entries[k].first + 1));
            }
        }
        for (const auto& [c, v] : entries) {
            m.col_idx.push_back(c);
            m.values.push_back(v);
        }
        m.row_ptr[r + 1] = m.col_idx.size();
    }
    m.validate();
    return m;
}

} // namespace

std::vector<double> ExpressionMatrix::dense_row(std::size_t cell) const {
    std::vector<double> row(n_genes(), 0.0);
    for (std::size_t k = row_ptr[cell]; k < row_ptr[cell + 1]; ++k) {
        row[col_idx[k]] = values[k];
    }
    return row;
}

void ExpressionMatrix::validate() const {
    if (row_ptr.size() != cells.size() + 1) throw ValidationError("bad row_ptr length");
    if (col_idx.size() != values.size()) throw ValidationError("bad value array length");
    if (!row_ptr.empty() && row_ptr.back() != col_idx.size()) {
        throw ValidationError("row_ptr does not cover all entries");
    }
    require_unique(cells, "cell id");
    require_unique(genes, "gene symbol");
    for (const std::size_t c : col_idx) {
        if (c >= genes.size()) throw ValidationError("column index out of range");
    }
    for (const double v : values) {
        if (v < 0.0 || std::isnan(v)) throw ValidationError("negative expression value");
    }
}

ExpressionMatrix read_dense_csv(std::istream& in) {
    const Table table = read_table(in, ',');
    if (table.columns().size() < 2) throw ValidationError("dense matrix needs gene columns");

    ExpressionMatrix m;
    m.genes.assign(table.columns().begin() + 1, table.columns().end());
    m.row_ptr.push_back(0);
    std::size_t line_no = 1;
    for (const auto& row : table.rows()) {
        ++line_no;
        m.cells.push_back(row[0]);
        for (std::size_t j = 1; j < row.size(); ++j) {
            const double v = row[j].empty() ? 0.0 : parse_double(row[j], line_no);
            if (v < 0.0) {
                throw ValidationError("negative expression value at line " +
                                      std::to_string(line_no));
            }
            if (v != 0.0) {
                m.col_idx.push_back(j - 1);
                m.values.push_back(v);
            }
        }
        m.row_ptr.push_back(m.col_idx.size());
    }
    m.validate();
    return m;
}

ExpressionMatrix read_expression_matrix(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".mtx") == 0) {
        return read_matrix_market(path);
    }
    std::ifstream in(path);
    if (!in) throw IoError("cannot open expression matrix: " + path);
    return read_dense_csv(in);
}

std::vector<GeneSet> read_gmt(std::istream& in) {
    std::vector<GeneSet> sets;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_delimited_line(line, '\t');
        if (fields.size() < 3) {
            throw ParseError("gene set row needs id, description, and genes", line_no);
        }
        GeneSet set;
        set.id = fields[0];
        set.name = fields[1];
        for (std::size_t i = 2; i < fields.size(); ++i) {
            if (!fields[i].empty()) set.genes.push_back(fields[i]);
        }
        std::sort(set.genes.begin(), set.genes.end());
        set.genes.erase(std::unique(set.genes.begin(), set.genes.end()), set.genes.end());
        if (set.genes.empty()) throw ParseError("gene set " + set.id + " has no genes", line_no);
        if (!ids.insert(set.id).second) {
            throw ValidationError("duplicate gene set id: " + set.id);
        }
        sets.push_back(std::move(set));
    }
    return sets;
}

std::vector<GeneSet> read_gmt_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open gene sets: " + path);
    return read_gmt(in);
}

HvgResult select_hvg(const ExpressionMatrix& expr, std::size_t n_top) {
    if (n_top == 0) throw ValidationError("n_top must be positive");
    const std::size_t n_cells = expr.n_cells();
    if (n_cells == 0) throw ValidationError("empty expression matrix");

    struct Candidate {
        std::size_t gene = 0;
        double mean = 0.0;
        double dispersion = 0.0;
        double z = 0.0;
    };

    // Per-gene mean and population variance over all cells, zeros included.
    std::vector<double> sum(expr.n_genes(), 0.0), sumsq(expr.n_genes(), 0.0);
    for (std::size_t k = 0; k < expr.values.size(); ++k) {
        sum[expr.col_idx[k]] += expr.values[k];
        sumsq[expr.col_idx[k]] += expr.values[k] * expr.values[k];
    }
    std::vector<Candidate> candidates;
    for (std::size_t g = 0; g < expr.n_genes(); ++g) {
        const double mean = sum[g] / static_cast<double>(n_cells);
        const double var = sumsq[g] / static_cast<double>(n_cells) - mean * mean;
        if (var > 0.0) candidates.push_back({g, mean, var / mean, 0.0});
    }

    HvgResult result;
    if (candidates.empty()) {
        result.warnings.emplace_back("no genes with positive variance");
        return result;
    }

    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.mean != b.mean) return a.mean < b.mean;
        return expr.genes[a.gene] < expr.genes[b.gene];
    });

    // Equal-frequency mean bins, contiguous after the mean sort.
    const std::size_t n_bins = std::min<std::size_t>(20, candidates.size());
    const std::size_t base = candidates.size() / n_bins;
    const std::size_t extra = candidates.size() % n_bins;
    std::size_t start = 0;
    for (std::size_t b = 0; b < n_bins; ++b) {
        const std::size_t width = base + (b < extra ? 1 : 0);
        double mean_d = 0.0;
        for (std::size_t i = start; i < start + width; ++i) mean_d += candidates[i].dispersion;
        mean_d /= static_cast<double>(width);
        double var_d = 0.0;
        for (std::size_t i = start; i < start + width; ++i) {
            const double diff = candidates[i].dispersion - mean_d;
            var_d += diff * diff;
        }
        var_d /= static_cast<double>(width);
        const double std_d = std::sqrt(var_d);
        for (std::size_t i = start; i < start + width; ++i) {
            candidates[i].z = std_d == 0.0 ? 0.0 : (candidates[i].dispersion - mean_d) / std_d;
        }
        start += width;
    }

    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.z != b.z) return a.z > b.z;
        return expr.genes[a.gene] < expr.genes[b.gene];
    });

    if (candidates.size() < n_top) {
        result.warnings.push_back("only " + std::to_string(candidates.size()) +
                                  " informative genes for n_top=" + std::to_string(n_top));
    }
    const std::size_t take = std::min(n_top, candidates.size());
    for (std::size_t i = 0; i < take; ++i) result.genes.push_back(expr.genes[candidates[i].gene]);
    if (candidates.size() < n_top) {
        for (std::size_t i = take; i < candidates.size(); ++i) {
            result.genes.push_back(expr.genes[candidates[i].gene]);
        }
    }
    return result;
}

ExpressionMatrix subset_genes(const ExpressionMatrix& expr, std::span<const std::string> keep) {
    const std::unordered_set<std::string> wanted(keep.begin(), keep.end());
    std::vector<std::size_t> old_to_new(expr.n_genes(), static_cast<std::size_t>(-1));
    ExpressionMatrix out;
    out.cells = expr.cells;
    for (std::size_t g = 0; g < expr.n_genes(); ++g) {
        if (wanted.count(expr.genes[g]) > 0) {
            old_to_new[g] = out.genes.size();
            out.genes.push_back(expr.genes[g]);
        }
    }
    out.row_ptr.push_back(0);
    for (std::size_t c = 0; c < expr.n_cells(); ++c) {
        for (std::size_t k = expr.row_ptr[c]; k < expr.row_ptr[c + 1]; ++k) {
            const std::size_t g = old_to_new[expr.col_idx[k]];
            if (g != static_cast<std::size_t>(-1)) {
                out.col_idx.push_back(g);
                out.values.push_back(expr.values[k]);
            }
        }
        out.row_ptr.push_back(out.col_idx.size());
    }
    return out;
}

ExpressionMatrix subset_cells(const ExpressionMatrix& expr, std::span<const std::string> cells) {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t c = 0; c < expr.n_cells(); ++c) index.emplace(expr.cells[c], c);
    ExpressionMatrix out;
    out.genes = expr.genes;
    out.row_ptr.push_back(0);
    for (const auto& id : cells) {
        const auto it = index.find(id);
        if (it == index.end()) {
            throw ValidationError("cell '" + id + "' missing from expression matrix");
        }
        const std::size_t c = it->second;
        out.cells.push_back(id);
        for (std::size_t k = expr.row_ptr[c]; k < expr.row_ptr[c + 1]; ++k) {
            out.col_idx.push_back(expr.col_idx[k]);
            out.values.push_back(expr.values[k]);
        }
        out.row_ptr.push_back(out.col_idx.size());
    }
    return out;
}

namespace {

void check_top_fraction(double f) {
    if (!(f > 0.0) || f > 1.0) throw ValidationError("top_fraction must be in (0, 1]");
}

/// Gene indices ranked descending by expression, ties by gene symbol.
std::vector<std::size_t> ranking(const ExpressionMatrix& expr, std::size_t cell) {
    const std::vector<double> row = expr.dense_row(cell);
    std::vector<std::size_t> order(expr.n_genes());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (row[a] != row[b]) return row[a] > row[b];
        return expr.genes[a] < expr.genes[b];
    });
    return order;
}

std::size_t window_size(double top_fraction, std::size_t n_genes) {
    // The epsilon guards against 0.05 * G landing a hair above an integer.
    const auto w = static_cast<std::size_t>(
        std::ceil(top_fraction * static_cast<double>(n_genes) - 1e-12));
    return std::clamp<std::size_t>(w, 1, n_genes);
}

/// AUC of the recovery curve over the top W ranks: a member at rank r adds
/// W - r + 1 curve units; the maximum places all m members first.
double auc_from_ranks(const std::vector<std::size_t>& order,
                      const std::vector<char>& member, std::size_t members_in_universe,
                      std::size_t window) {
    const std::size_t m = members_in_universe;
    double raw = 0.0;
    for (std::size_t x = 0; x < window; ++x) {
        if (member[order[x]] != 0) raw += static_cast<double>(window - x);
    }
    double max_area = 0.0;
    if (m >= window) {
        max_area = static_cast<double>(window) * static_cast<double>(window + 1) / 2.0;
    } else {
        max_area = static_cast<double>(m) * static_cast<double>(m + 1) / 2.0 +
                   static_cast<double>(window - m) * static_cast<double>(m);
    }
    return max_area == 0.0 ? 0.0 : raw / max_area;
}

} // namespace

double aucell_score(const ExpressionMatrix& expr, std::size_t cell_index, const GeneSet& set,
                    double top_fraction, std::vector<std::string>* warnings) {
    check_top_fraction(top_fraction);
    if (cell_index >= expr.n_cells()) throw ValidationError("cell index out of range");

    std::vector<char> member(expr.n_genes(), 0);
    std::size_t m = 0;
    for (std::size_t g = 0; g < expr.n_genes(); ++g) {
        if (std::binary_search(set.genes.begin(), set.genes.end(), expr.genes[g])) {
            member[g] = 1;
            ++m;
        }
    }
    if (m == 0) {
        if (warnings != nullptr) {
            warnings->push_back("gene set " + set.id + " disjoint from matrix genes");
        }
        return 0.0;
    }
    const std::size_t window = window_size(top_fraction, expr.n_genes());
    return auc_from_ranks(ranking(expr, cell_index), member, m, window);
}

ActivityMatrix score_matrix(const ExpressionMatrix& expr, std::span<const GeneSet> sets,
                            double top_fraction) {
    check_top_fraction(top_fraction);
    ActivityMatrix activity;
    activity.cells = expr.cells;
    for (const auto& set : sets) activity.pathways.push_back(set.id);
    activity.values.assign(expr.n_cells() * sets.size(), 0.0);

    std::vector<std::vector<char>> members(sets.size());
    std::vector<std::size_t> counts(sets.size(), 0);
    for (std::size_t s = 0; s < sets.size(); ++s) {
        members[s].assign(expr.n_genes(), 0);
        for (std::size_t g = 0; g < expr.n_genes(); ++g) {
            if (std::binary_search(sets[s].genes.begin(), sets[s].genes.end(), expr.genes[g])) {
                members[s][g] = 1;
                ++counts[s];
            }
        }
        if (counts[s] == 0) {
            activity.warnings.push_back("gene set " + sets[s].id +
                                        " disjoint from matrix genes");
        }
    }

    const std::size_t window = window_size(top_fraction, expr.n_genes());
    for (std::size_t c = 0; c < expr.n_cells(); ++c) {
        const std::vector<std::size_t> order = ranking(expr, c);
        for (std::size_t s = 0; s < sets.size(); ++s) {
            if (counts[s] == 0) continue;
            activity.values[c * sets.size() + s] =
                auc_from_ranks(order, members[s], counts[s], window);
        }
    }
    return activity;
}

void write_activity_csv(const ActivityMatrix& activity, std::ostream& out) {
    out << "cell_id";
    for (const auto& p : activity.pathways) out << ',' << format_field(p, ',');
    out << '\n';
    out << std::setprecision(17);
    for (std::size_t c = 0; c < activity.cells.size(); ++c) {
        out << format_field(activity.cells[c], ',');
        for (std::size_t s = 0; s < activity.pathways.size(); ++s) {
            out << ',' << activity.at(c, s);
        }
        out << '\n';
    }
}

std::vector<std::vector<RankedPathway>> top_k_pathways(const ActivityMatrix& activity,
                                                       std::size_t k) {
    if (k == 0) throw ValidationError("k must be positive");
    std::vector<std::vector<RankedPathway>> lists(activity.cells.size());
    std::vector<std::size_t> order(activity.pathways.size());
    for (std::size_t c = 0; c < activity.cells.size(); ++c) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (activity.at(c, a) != activity.at(c, b)) return activity.at(c, a) > activity.at(c, b);
            return activity.pathways[a] < activity.pathways[b];
        });
        const std::size_t take = std::min(k, order.size());
        for (std::size_t i = 0; i < take; ++i) {
            lists[c].push_back({activity.pathways[order[i]], activity.at(c, order[i])});
        }
    }
    return lists;
}

PrevalenceReport prevalence_filter(std::span<const std::vector<RankedPathway>> top_lists,
                                   std::span<const std::string> universe, double threshold) {
    if (top_lists.empty()) throw ValidationError("empty corpus");
    std::map<std::string, std::size_t> active;
    for (const auto& id : universe) active.emplace(id, 0);
    for (const auto& list : top_lists) {
        for (const auto& entry : list) ++active[entry.id];
    }
    PrevalenceReport report;
    const auto n = static_cast<double>(top_lists.size());
    for (const auto& [id, count] : active) {
        const double fraction = static_cast<double>(count) / n;
        report.prevalence[id] = fraction;
        if (fraction >= threshold) report.retained.push_back(id);
    }
    return report;
}

} // namespace celldesc
