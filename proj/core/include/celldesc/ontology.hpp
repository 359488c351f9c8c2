#ifndef CELLDESC_ONTOLOGY_HPP_
#define CELLDESC_ONTOLOGY_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>
#include <unordered_map>

namespace celldesc {

/// One [Term] stanza of an OBO file, reduced to the fields this library uses.
struct OntologyTerm {
    std::string id;                        // CURIE, e.g. "CL:0000084"
    std::string name;
    std::optional<std::string> definition; // quoted payload of def:, xref suffix stripped
    std::vector<std::string> synonyms;     // quoted payloads of synonym: lines
    std::vector<std::string> is_a_parents; // target ids, declaration order, deduplicated
    bool obsolete = false;
};

/// Immutable term table produced by parse_obo. Safe to share across threads
/// once constructed.
class Ontology {
public:
    Ontology() = default;

    /// Throws ValidationError on duplicate id.
    void add_term(OntologyTerm term);

    const OntologyTerm* find(std::string_view id) const;
    const std::vector<OntologyTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

private:
    std::vector<OntologyTerm> terms_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Parses the [Term] stanzas of an OBO 1.2/1.4 stream. Header tags and other
/// stanza kinds ([Typedef], [Instance]) are skipped. Throws ParseError (with
/// line number) on a stanza tag before any [Term] header, a [Term] without an
/// id, or a duplicate id.
Ontology parse_obo(std::istream& in);

/// Writes the subset format back out; parse(write(parse(x))) is a fixed point
/// on ids, names, definitions, synonyms, parents and the obsolete flag.
void write_obo(const Ontology& onto, std::ostream& out);

struct LookupResult {
    enum class Status { found, not_found, ambiguous };
    Status status = Status::not_found;
    std::string id;                      // set when found
    std::vector<std::string> candidates; // conflicting ids (ambiguous) or nearest names (not_found)

    explicit operator bool() const { return status == Status::found; }
};

/// Resolves an id, exact name, or exact synonym (names/synonyms matched
/// case-insensitively) to a term id. Ambiguous names report every matching id;
/// misses report the nearest term names by edit distance.
LookupResult lookup_term(const Ontology& onto, std::string_view query);

struct GraphWarning {
    std::string source_id;
    std::string target_id;
    std::string reason; // "unknown target" or "obsolete endpoint"
};

/// Undirected simple graph over ontology terms, nodes sorted by term id.
/// The is_a declaration direction is retained for edge-list export.
class OntologyGraph {
public:
    std::size_t node_count() const { return ids_.size(); }
    std::size_t edge_count() const { return directed_edges_.size(); }

    const std::vector<std::string>& node_ids() const { return ids_; }
    const std::string& id_of(std::size_t index) const { return ids_[index]; }
    std::optional<std::size_t> index_of(std::string_view id) const;

    /// Neighbor lists, symmetric, each sorted ascending.
    const std::vector<std::vector<std::uint32_t>>& adjacency() const { return adjacency_; }
    std::size_t degree(std::size_t index) const { return adjacency_[index].size(); }

    const std::vector<GraphWarning>& warnings() const { return warnings_; }

    /// Edge list as "child_id\tparent_id" lines, sorted, no header.
    void export_edges(std::ostream& out) const;

    /// Rebuilds a graph from an exported edge list. Nodes are the edge
    /// endpoints; isolated nodes do not survive this round trip.
    static OntologyGraph from_edge_list(std::istream& in);

    /// Size of the connected component containing the given node.
    std::size_t component_size(std::size_t index) const;

    friend OntologyGraph build_graph(const Ontology&, bool);

private:
    void finalize(std::vector<std::pair<std::uint32_t, std::uint32_t>> child_parent);

    std::vector<std::string> ids_; // sorted
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::uint32_t>> adjacency_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> directed_edges_; // (child, parent), sorted
    std::vector<GraphWarning> warnings_;
};

/// Builds the undirected is_a graph. Obsolete terms contribute no edges; they
/// appear as isolated nodes only when include_obsolete is set. Edges whose
/// target is unknown or obsolete are dropped and reported as warnings.
OntologyGraph build_graph(const Ontology& onto, bool include_obsolete = false);

} // namespace celldesc

#endif // CELLDESC_ONTOLOGY_HPP_
