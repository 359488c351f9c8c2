#include "celldesc/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "celldesc/errors.hpp"

namespace celldesc {

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> terms)
    : terms_(std::move(terms)), values_(terms_.size() * terms_.size(), 0.0) {}

namespace {

constexpr char kMagic[4] = {'P', 'P', 'R', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParseError("truncated similarity matrix file");
    return v;
}

} // namespace

void SimilarityMatrix::save(std::ostream& out) const {
    out.write(kMagic, 4);
    write_raw(out, kVersion);
    write_raw(out, static_cast<std::uint64_t>(size()));
    out.write(reinterpret_cast<const char*>(values_.data()),
              static_cast<std::streamsize>(values_.size() * sizeof(double)));
    if (!out) throw IoError("failed writing similarity matrix");
}

SimilarityMatrix SimilarityMatrix::load(std::istream& in, std::vector<std::string> terms) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw ParseError("bad magic: not a similarity matrix file");
    auto version = read_raw<std::uint32_t>(in);
    if (version != kVersion)
        throw ParseError("unsupported similarity matrix version " + std::to_string(version));
    auto n = read_raw<std::uint64_t>(in);
    if (n != terms.size())
        throw ValidationError("matrix is " + std::to_string(n) + "x" + std::to_string(n) +
                              " but sidecar lists " + std::to_string(terms.size()) + " terms");

    SimilarityMatrix m(std::move(terms));
    in.read(reinterpret_cast<char*>(m.values_.data()),
            static_cast<std::streamsize>(m.values_.size() * sizeof(double)));
    if (!in) throw ParseError("truncated similarity matrix payload");
    return m;
}

void SimilarityMatrix::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    save(out);

    std::ofstream sidecar(path + ".terms.tsv");
    if (!sidecar) throw IoError("cannot open '" + path + ".terms.tsv' for writing");
    for (const auto& t : terms_) sidecar << t << '\n';
}

SimilarityMatrix SimilarityMatrix::load_file(const std::string& path) {
    return load_file(path, path + ".terms.tsv");
}

SimilarityMatrix SimilarityMatrix::load_file(const std::string& path,
                                             const std::string& terms_path) {
    std::ifstream terms_in(terms_path);
    if (!terms_in) throw IoError("cannot open term sidecar '" + terms_path + "'");
    std::vector<std::string> terms;
    std::string line;
    while (std::getline(terms_in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) terms.push_back(line);
    }

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return load(in, std::move(terms));
}

std::vector<double> similarity_row(const OntologyGraph& graph, std::size_t source_index,
                                   const PprConfig& config) {
    PprVector ppr = personalized_pagerank(graph, source_index, config);

    const double self = ppr.scores[source_index];
    if (!(self > 0.0))
        throw ValidationError("PPR mass at source is zero; cannot normalize similarity row");

    const double denom = std::log1p(self / config.tau);
    std::vector<double> row(ppr.scores.size());
    for (std::size_t j = 0; j < row.size(); ++j) {
        double v = std::log1p(ppr.scores[j] / config.tau) / denom;
        row[j] = std::clamp(v, 0.0, 1.0);
    }
    row[source_index] = 1.0;
    return row;
}

SimilarityMatrix similarity_matrix(const OntologyGraph& graph, const PprConfig& config,
                                   bool symmetrize, int threads) {
    config.validate();
    const std::size_t n = graph.node_count();
    if (n == 0) throw ValidationError("similarity matrix over an empty graph");

    SimilarityMatrix m(graph.node_ids());

    unsigned want = threads == 0 ? std::thread::hardware_concurrency()
                                 : static_cast<unsigned>(std::max(threads, 1));
    want = std::max(1u, std::min<unsigned>(want, static_cast<unsigned>(n)));

    auto fill_rows = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto row = similarity_row(graph, i, config);
            std::copy(row.begin(), row.end(), m.row(i).begin());
        }
    };

    if (want == 1) {
        fill_rows(0, n);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex error_mutex;
        const std::size_t chunk = (n + want - 1) / want;
        for (unsigned t = 0; t < want; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                try {
                    fill_rows(begin, end);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    if (symmetrize) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double mean = 0.5 * (m.at(i, j) + m.at(j, i));
                m.set(i, j, mean);
                m.set(j, i, mean);
            }
        m.mark_symmetrized();
    }
    return m;
}

namespace {

std::vector<double> off_diagonal(const SimilarityMatrix& m) {
    const std::size_t n = m.size();
    std::vector<double> values;
    values.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) values.push_back(m.at(i, j));
    return values;
}

/// Linear-interpolation percentile over sorted data (the numpy default).
double percentile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = (static_cast<double>(n) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct LineFit {
    double slope = 0;
    double r2 = 0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw ValidationError("power-law fit: zero variance in abscissa");
    if (syy == 0.0) throw ValidationError("power-law fit: zero variance in ordinate");

    LineFit fit;
    fit.slope = sxy / sxx;
    const double intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (intercept + fit.slope * x[i]);
        ss_res += e * e;
    }
    fit.r2 = 1.0 - ss_res / syy;
    return fit;
}

} // namespace

DistributionStats similarity_stats(const SimilarityMatrix& matrix) {
    if (matrix.size() < 2)
        throw ValidationError("similarity_stats requires a matrix with at least 2 terms");

    std::vector<double> values = off_diagonal(matrix);
    DistributionStats stats;
    stats.count = values.size();

    double sum = 0;
    for (double v : values) sum += v;
    stats.mean = sum / static_cast<double>(values.size());

    double ss = 0;
    for (double v : values) {
        const double d = v - stats.mean;
        ss += d * d;
    }
    stats.std_dev = std::sqrt(ss / static_cast<double>(values.size()));

    std::sort(values.begin(), values.end());
    stats.median = percentile_sorted(values, 0.50);
    stats.percentile_95 = percentile_sorted(values, 0.95);
    stats.percentile_99 = percentile_sorted(values, 0.99);
    return stats;
}

PowerLawFit fit_power_law(std::span<const double> positive_values) {
    std::vector<double> values;
    values.reserve(positive_values.size());
    for (double v : positive_values)
        if (v > 0.0) values.push_back(v);
    if (values.size() < 10)
        throw ValidationError("power-law fit needs >= 10 positive values, got " +
                              std::to_string(values.size()));

    auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    const double vmin = *min_it, vmax = *max_it;
    if (vmin == vmax) throw ValidationError("power-law fit: constant values (zero variance)");

    constexpr int kBins = 50;
    const double log_min = std::log(vmin);
    const double log_span = std::log(vmax) - log_min;

    std::vector<std::size_t> counts(kBins, 0);
    for (double v : values) {
        int b = static_cast<int>((std::log(v) - log_min) / log_span * kBins);
        b = std::clamp(b, 0, kBins - 1);
        ++counts[b];
    }

    const double total = static_cast<double>(values.size());
    std::vector<double> log_center, log_density;
    for (int b = 0; b < kBins; ++b) {
        if (counts[b] == 0) continue;
        const double lo = std::exp(log_min + log_span * b / kBins);
        const double hi = std::exp(log_min + log_span * (b + 1) / kBins);
        const double center = std::sqrt(lo * hi);
        const double density = static_cast<double>(counts[b]) / (total * (hi - lo));
        log_center.push_back(std::log(center));
        log_density.push_back(std::log(density));
    }
    if (log_center.size() < 3)
        throw ValidationError("power-law fit: fewer than 3 occupied bins");

    PowerLawFit fit;
    const LineFit hist = least_squares(log_center, log_density);
    fit.exponent_alpha = std::fabs(hist.slope);
    fit.loglog_r2 = hist.r2;
    fit.bins_used = static_cast<int>(log_center.size());

    std::sort(values.begin(), values.end(), std::greater<>());
    std::vector<double> log_rank(values.size()), log_value(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        log_rank[i] = std::log(static_cast<double>(i + 1));
        log_value[i] = std::log(values[i]);
    }
    fit.rank_frequency_r2 = least_squares(log_rank, log_value).r2;
    return fit;
}

PowerLawFit heavy_tail_fit(const SimilarityMatrix& matrix) {
    if (matrix.size() < 2)
        throw ValidationError("heavy_tail_fit requires a matrix with at least 2 terms");
    return fit_power_law(off_diagonal(matrix));
}

void export_cdf(const SimilarityMatrix& matrix, std::ostream& out) {
    if (matrix.size() < 2)
        throw ValidationError("export_cdf requires a matrix with at least 2 terms");

    std::vector<double> values = off_diagonal(matrix);
    std::sort(values.begin(), values.end());
    const double total = static_cast<double>(values.size());

    out << "similarity\tcumulative_fraction\n";
    out.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) {
        // Emit one row per distinct value at its last occurrence: P(X <= v).
        if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
        out << values[i] << '\t' << (static_cast<double>(i + 1) / total) << '\n';
    }
}

void write_stats_json(const DistributionStats& stats, std::ostream& out) {
    nlohmann::json j{{"mean", stats.mean},
                     {"median", stats.median},
                     {"std_dev", stats.std_dev},
                     {"percentile_95", stats.percentile_95},
                     {"percentile_99", stats.percentile_99},
                     {"count", stats.count}};
    out << j.dump(2) << '\n';
}

void write_fit_json(const PowerLawFit& fit, std::ostream& out) {
    nlohmann::json j{{"exponent_alpha", fit.exponent_alpha},
                     {"loglog_r2", fit.loglog_r2},
                     {"rank_frequency_r2", fit.rank_frequency_r2},
                     {"bins_used", fit.bins_used}};
    out << j.dump(2) << '\n';
}

} // namespace celldesc
