#ifndef CELLDESC_PPR_HPP_
#define CELLDESC_PPR_HPP_

#include <cstddef>
#include <string_view>
#include <vector>

#include "celldesc/ontology.hpp"

namespace celldesc {

struct PprConfig {
    double damping = 0.85;   // probability of following an edge vs teleporting
    double tolerance = 1e-10; // L1 convergence threshold
    int max_iterations = 10000;
    double tau = 0.1;        // log-scale parameter of the similarity transform

    /// Throws ValidationError unless 0 < damping < 1, tolerance >= 0,
    /// max_iterations >= 1 and tau > 0.
    void validate() const;
};

struct PprVector {
    std::size_t source = 0;
    std::vector<double> scores; // nonnegative, sums to 1 within 1e-9
    int iterations = 0;
    bool converged = false; // false: stopped at max_iterations
};

/// Personalized PageRank by power iteration: the fixed point of
///   v <- damping * W v + (1 - damping) * e_source
/// with W column-stochastic over undirected neighbors. Mass on degree-zero
/// nodes is returned to the source, so the iteration stays stochastic.
/// Throws ValidationError if source_index is out of range.
PprVector personalized_pagerank(const OntologyGraph& graph, std::size_t source_index,
                                const PprConfig& config);

/// Convenience overload resolving the source by term id.
PprVector personalized_pagerank(const OntologyGraph& graph, std::string_view source_id,
                                const PprConfig& config);

} // namespace celldesc

#endif // CELLDESC_PPR_HPP_
