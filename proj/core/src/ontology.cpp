#include "celldesc/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <set>

#include "celldesc/errors.hpp"

namespace celldesc {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// Extracts the quoted payload of `def:` / `synonym:` values, honoring \" escapes.
std::optional<std::string> quoted_payload(std::string_view value) {
    std::size_t start = value.find('"');
    if (start == std::string_view::npos) return std::nullopt;
    std::string out;
    for (std::size_t i = start + 1; i < value.size(); ++i) {
        char c = value[i];
        if (c == '\\' && i + 1 < value.size()) {
            out += value[++i];
        } else if (c == '"') {
            return out;
        } else {
            out += c;
        }
    }
    return std::nullopt; // unterminated quote
}

/// First whitespace-delimited token of the value with any `! comment` and
/// `{trailing=modifier}` stripped. Used for is_a targets.
std::string leading_identifier(std::string_view value) {
    value = trim(value);
    std::size_t bang = value.find('!');
    if (bang != std::string_view::npos) value = trim(value.substr(0, bang));
    std::size_t brace = value.find('{');
    if (brace != std::string_view::npos) value = trim(value.substr(0, brace));
    std::size_t ws = value.find_first_of(" \t");
    if (ws != std::string_view::npos) value = value.substr(0, ws);
    return std::string(value);
}

bool is_term_tag(std::string_view tag) {
    return tag == "id" || tag == "name" || tag == "def" || tag == "synonym" ||
           tag == "is_a" || tag == "is_obsolete";
}

/// Edit distance used only to rank "nearest candidates" on lookup misses.
std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace

void Ontology::add_term(OntologyTerm term) {
    auto [it, inserted] = by_id_.emplace(term.id, terms_.size());
    if (!inserted) throw ValidationError("duplicate term id '" + term.id + "'");
    terms_.push_back(std::move(term));
}

const OntologyTerm* Ontology::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &terms_[it->second];
}

Ontology parse_obo(std::istream& in) {
    Ontology onto;

    enum class Section { header, term, other };
    Section section = Section::header;

    OntologyTerm current;
    bool have_id = false;
    long stanza_line = 0;
    std::set<std::string> seen_parents;

    auto flush = [&](long lineno) {
        if (section != Section::term) return;
        if (!have_id)
            throw ParseError("[Term] stanza has no id", stanza_line == 0 ? lineno : stanza_line);
        onto.add_term(std::move(current));
        current = OntologyTerm{};
        have_id = false;
        seen_parents.clear();
    };

    std::string raw;
    long lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '!') continue;

        if (line.front() == '[') {
            flush(lineno);
            if (line == "[Term]") {
                section = Section::term;
                stanza_line = lineno;
            } else {
                section = Section::other;
            }
            continue;
        }

        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) continue;
        std::string_view tag = trim(line.substr(0, colon));
        std::string_view value = trim(line.substr(colon + 1));

        if (section == Section::header) {
            if (is_term_tag(tag))
                throw ParseError("term tag '" + std::string(tag) + "' before any [Term] header",
                                 lineno);
            continue; // format-version and friends
        }
        if (section != Section::term) continue;

        if (tag == "id") {
            if (have_id) throw ParseError("duplicate id tag in stanza", lineno);
            current.id = std::string(value);
            if (current.id.empty()) throw ParseError("empty id", lineno);
            have_id = true;
        } else if (tag == "name") {
            current.name = std::string(value);
        } else if (tag == "def") {
            auto payload = quoted_payload(value);
            if (!payload) throw ParseError("def without quoted payload", lineno);
            current.definition = std::move(*payload);
        } else if (tag == "synonym") {
            auto payload = quoted_payload(value);
            if (!payload) throw ParseError("synonym without quoted payload", lineno);
            current.synonyms.push_back(std::move(*payload));
        } else if (tag == "is_a") {
            std::string target = leading_identifier(value);
            if (!target.empty() && seen_parents.insert(target).second)
                current.is_a_parents.push_back(std::move(target));
        } else if (tag == "is_obsolete") {
            current.obsolete = to_lower(value) == "true";
        }
        // other tags (comment, xref, subset, ...) are skipped
    }
    flush(lineno + 1);
    return onto;
}

void write_obo(const Ontology& onto, std::ostream& out) {
    out << "format-version: 1.2\n";
    for (const auto& term : onto.terms()) {
        out << "\n[Term]\n";
        out << "id: " << term.id << '\n';
        if (!term.name.empty()) out << "name: " << term.name << '\n';
        if (term.definition) {
            out << "def: \"";
            for (char c : *term.definition) {
                if (c == '"' || c == '\\') out << '\\';
                out << c;
            }
            out << "\" []\n";
        }
        for (const auto& syn : term.synonyms) {
            out << "synonym: \"";
            for (char c : syn) {
                if (c == '"' || c == '\\') out << '\\';
                out << c;
            }
            out << "\" EXACT []\n";
        }
        for (const auto& parent : term.is_a_parents) out << "is_a: " << parent << '\n';
        if (term.obsolete) out << "is_obsolete: true\n";
    }
}

LookupResult lookup_term(const Ontology& onto, std::string_view query) {
    LookupResult result;

    if (const OntologyTerm* term = onto.find(query)) {
        result.status = LookupResult::Status::found;
        result.id = term->id;
        return result;
    }

    const std::string folded = to_lower(trim(query));

    std::vector<std::string> name_hits;
    for (const auto& term : onto.terms())
        if (to_lower(term.name) == folded) name_hits.push_back(term.id);
    if (name_hits.size() == 1) {
        result.status = LookupResult::Status::found;
        result.id = name_hits.front();
        return result;
    }
    if (name_hits.size() > 1) {
        result.status = LookupResult::Status::ambiguous;
        result.candidates = std::move(name_hits);
        return result;
    }

    std::vector<std::string> synonym_hits;
    for (const auto& term : onto.terms())
        for (const auto& syn : term.synonyms)
            if (to_lower(syn) == folded) {
                synonym_hits.push_back(term.id);
                break;
            }
    if (synonym_hits.size() == 1) {
        result.status = LookupResult::Status::found;
        result.id = synonym_hits.front();
        return result;
    }
    if (synonym_hits.size() > 1) {
        result.status = LookupResult::Status::ambiguous;
        result.candidates = std::move(synonym_hits);
        return result;
    }

    // Miss: surface the nearest names to help the caller.
    std::vector<std::pair<std::size_t, std::string>> ranked;
    for (const auto& term : onto.terms()) {
        if (term.name.empty()) continue;
        ranked.emplace_back(edit_distance(to_lower(term.name), folded), term.name);
    }
    std::sort(ranked.begin(), ranked.end());
    const std::size_t keep = std::min<std::size_t>(5, ranked.size());
    for (std::size_t i = 0; i < keep; ++i) result.candidates.push_back(ranked[i].second);
    result.status = LookupResult::Status::not_found;
    return result;
}

std::optional<std::size_t> OntologyGraph::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void OntologyGraph::finalize(std::vector<std::pair<std::uint32_t, std::uint32_t>> child_parent) {
    std::sort(child_parent.begin(), child_parent.end());
    child_parent.erase(std::unique(child_parent.begin(), child_parent.end()), child_parent.end());
    directed_edges_ = std::move(child_parent);

    adjacency_.assign(ids_.size(), {});
    for (auto [c, p] : directed_edges_) {
        adjacency_[c].push_back(p);
        adjacency_[p].push_back(c);
    }
    for (auto& nbrs : adjacency_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
}

OntologyGraph build_graph(const Ontology& onto, bool include_obsolete) {
    OntologyGraph g;

    for (const auto& term : onto.terms())
        if (include_obsolete || !term.obsolete) g.ids_.push_back(term.id);
    std::sort(g.ids_.begin(), g.ids_.end());
    for (std::size_t i = 0; i < g.ids_.size(); ++i) g.index_[g.ids_[i]] = i;

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& term : onto.terms()) {
        if (term.obsolete) continue; // no outgoing edges from obsolete terms
        for (const auto& parent_id : term.is_a_parents) {
            const OntologyTerm* parent = onto.find(parent_id);
            if (!parent) {
                g.warnings_.push_back({term.id, parent_id, "unknown target"});
                continue;
            }
            if (parent->obsolete) {
                g.warnings_.push_back({term.id, parent_id, "obsolete endpoint"});
                continue;
            }
            if (parent->id == term.id) continue; // self-loop
            auto c = g.index_.at(term.id);
            auto p = g.index_.at(parent->id);
            edges.emplace_back(static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(p));
        }
    }
    g.finalize(std::move(edges));
    return g;
}

void OntologyGraph::export_edges(std::ostream& out) const {
    for (auto [c, p] : directed_edges_) out << ids_[c] << '\t' << ids_[p] << '\n';
}

OntologyGraph OntologyGraph::from_edge_list(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError("edge line without tab", lineno);
        pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }

    OntologyGraph g;
    for (const auto& [c, p] : pairs) {
        g.ids_.push_back(c);
        g.ids_.push_back(p);
    }
    std::sort(g.ids_.begin(), g.ids_.end());
    g.ids_.erase(std::unique(g.ids_.begin(), g.ids_.end()), g.ids_.end());
    for (std::size_t i = 0; i < g.ids_.size(); ++i) g.index_[g.ids_[i]] = i;

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& [c, p] : pairs) {
        if (c == p) continue;
        edges.emplace_back(static_cast<std::uint32_t>(g.index_.at(c)),
                           static_cast<std::uint32_t>(g.index_.at(p)));
    }
    g.finalize(std::move(edges));
    return g;
}

std::size_t OntologyGraph::component_size(std::size_t index) const {
    std::vector<char> seen(node_count(), 0);
    std::vector<std::size_t> stack{index};
    seen[index] = 1;
    std::size_t count = 0;
    while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        ++count;
        for (auto v : adjacency_[u])
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
    }
    return count;
}

} // namespace celldesc
