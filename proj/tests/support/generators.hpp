#ifndef CELLDESC_TESTS_GENERATORS_HPP_
#define CELLDESC_TESTS_GENERATORS_HPP_

// Seeded random fixture builders shared by property and acceptance tests.

#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "celldesc/ontology.hpp"

namespace testsupport {

inline std::string node_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "N%04zu", i);
    return buf;
}

/// Connected undirected graph: a random attachment tree plus `extra` random
/// non-loop edges, returned through the library's edge-list reader.
inline celldesc::OntologyGraph random_connected_graph(std::mt19937_64& rng, std::size_t n,
                                                      std::size_t extra) {
    std::ostringstream edges;
    for (std::size_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        edges << node_name(i) << '\t' << node_name(pick(rng)) << '\n';
    }
    std::uniform_int_distribution<std::size_t> any(0, n - 1);
    for (std::size_t e = 0; e < extra; ++e) {
        const std::size_t a = any(rng);
        const std::size_t b = any(rng);
        if (a == b) continue;
        edges << node_name(a) << '\t' << node_name(b) << '\n';
    }
    std::istringstream in(edges.str());
    return celldesc::OntologyGraph::from_edge_list(in);
}

inline celldesc::OntologyGraph chain_graph(std::size_t n) {
    std::ostringstream edges;
    for (std::size_t i = 1; i < n; ++i) {
        edges << node_name(i) << '\t' << node_name(i - 1) << '\n';
    }
    std::istringstream in(edges.str());
    return celldesc::OntologyGraph::from_edge_list(in);
}

inline celldesc::OntologyGraph star_graph(std::size_t leaves) {
    std::ostringstream edges;
    for (std::size_t i = 1; i <= leaves; ++i) {
        edges << node_name(i) << '\t' << node_name(0) << '\n';
    }
    std::istringstream in(edges.str());
    return celldesc::OntologyGraph::from_edge_list(in);
}

inline std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t max_len,
                                              int vocab) {
    std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
    std::uniform_int_distribution<int> tok_dist(0, vocab - 1);
    std::vector<std::string> out(len_dist(rng));
    for (auto& t : out) t = "w" + std::to_string(tok_dist(rng));
    return out;
}

inline std::set<std::string> random_label_set(std::mt19937_64& rng, std::size_t max_size,
                                              int vocab) {
    std::uniform_int_distribution<std::size_t> size_dist(0, max_size);
    std::uniform_int_distribution<int> label_dist(0, vocab - 1);
    const std::size_t want = size_dist(rng);
    std::set<std::string> out;
    while (out.size() < want) out.insert("L" + std::to_string(label_dist(rng)));
    return out;
}

} // namespace testsupport

#endif // CELLDESC_TESTS_GENERATORS_HPP_
