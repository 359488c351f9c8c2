#include "celldesc/ppr.hpp"

#include <cmath>
#include <string>

#include "celldesc/errors.hpp"

namespace celldesc {

void PprConfig::validate() const {
    if (!(damping > 0.0 && damping < 1.0))
        throw ValidationError("damping must be in (0,1), got " + std::to_string(damping));
    if (!(tolerance >= 0.0)) throw ValidationError("tolerance must be nonnegative");
    if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
    if (!(tau > 0.0)) throw ValidationError("tau must be positive");
}

PprVector personalized_pagerank(const OntologyGraph& graph, std::size_t source_index,
                                const PprConfig& config) {
    config.validate();
    const std::size_t n = graph.node_count();
    if (source_index >= n)
        throw ValidationError("PPR source index " + std::to_string(source_index) +
                              " out of range (graph has " + std::to_string(n) + " nodes)");

    const auto& adj = graph.adjacency();
    const double d = config.damping;

    PprVector result;
    result.source = source_index;
    result.scores.assign(n, 0.0);
    result.scores[source_index] = 1.0;

    std::vector<double> next(n);
    std::vector<double> push(n); // v[u] / deg(u), precomputed per sweep

    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        auto& v = result.scores;

        double dangling = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            if (adj[u].empty())
                dangling += v[u];
            else
                push[u] = v[u] / static_cast<double>(adj[u].size());
        }

        for (std::size_t u = 0; u < n; ++u) {
            double acc = 0.0;
            for (auto w : adj[u]) acc += push[w];
            next[u] = d * acc;
        }
        // Teleport plus mass stranded on degree-zero nodes, both to the source.
        next[source_index] += d * dangling + (1.0 - d);

        double delta = 0.0;
        for (std::size_t u = 0; u < n; ++u) delta += std::fabs(next[u] - v[u]);
        v.swap(next);
        result.iterations = iter;
        if (delta < config.tolerance) {
            result.converged = true;
            break;
        }
    }
    return result;
}

PprVector personalized_pagerank(const OntologyGraph& graph, std::string_view source_id,
                                const PprConfig& config) {
    auto idx = graph.index_of(source_id);
    if (!idx)
        throw ValidationError("PPR source '" + std::string(source_id) + "' is not in the graph");
    return personalized_pagerank(graph, *idx, config);
}

} // namespace celldesc
