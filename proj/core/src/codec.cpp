#include "celldesc/codec.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "celldesc/errors.hpp"

namespace celldesc {
namespace {

std::string fold(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view strip_trailing_period(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.back() == '.') s.remove_suffix(1);
    return trim(s);
}

/// A term definition embeds after "{name}, ": drop a leading article and
/// decapitalize so "A multi-ciliated cell..." reads ", multi-ciliated cell...".
std::string definition_clause(std::string_view def) {
    std::string_view d = strip_trailing_period(def);
    if (d.size() > 2 && (d.substr(0, 2) == "A " || d.substr(0, 2) == "a ")) {
        d.remove_prefix(2);
    } else if (d.size() > 3 && (d.substr(0, 3) == "An " || d.substr(0, 3) == "an ")) {
        d.remove_prefix(3);
    }
    std::string out(trim(d));
    // Leave acronyms ("DNA...") and single letters ("B cell...") alone.
    if (out.size() > 1 && std::isupper(static_cast<unsigned char>(out[0])) &&
        std::islower(static_cast<unsigned char>(out[1]))) {
        out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
    }
    return out;
}

std::size_t ci_find(const std::string& folded_text, std::string_view folded_needle,
                    std::size_t from = 0) {
    if (from >= folded_text.size()) return std::string::npos;
    return folded_text.find(folded_needle, from);
}

/// Longest common substring length between two folded strings.
std::size_t common_substring(const std::string& a, const std::string& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1 : 0;
            best = std::max(best, cur[j]);
        }
        std::swap(prev, cur);
    }
    return best;
}

} // namespace

std::string_view to_string(Sex sex) {
    switch (sex) {
        case Sex::male: return "male";
        case Sex::female: return "female";
        default: return "unknown";
    }
}

Sex sex_from_string(std::string_view s) {
    const std::string f = fold(trim(s));
    if (f == "male") return Sex::male;
    if (f == "female") return Sex::female;
    return Sex::unknown;
}

void CellRecord::validate() const {
    if (trim(cell_type_name).empty()) {
        throw ValidationError("record " + cell_id + ": empty cell type name");
    }
    if (pathways.size() > 2) {
        throw ValidationError("record " + cell_id + ": more than two pathways");
    }
    for (const auto& p : pathways) {
        if (trim(p).empty()) throw ValidationError("record " + cell_id + ": empty pathway id");
    }
    if (pathways.size() == 2 && pathways[0] == pathways[1]) {
        throw ValidationError("record " + cell_id + ": duplicate pathway " + pathways[0]);
    }
}

void PathwayCatalog::add(Entry entry) {
    if (trim(entry.id).empty()) throw ValidationError("pathway entry with empty id");
    if (find(entry.id) != nullptr) throw ValidationError("duplicate pathway id: " + entry.id);
    if (trim(entry.definition).empty()) {
        throw ValidationError("pathway " + entry.id + ": empty definition");
    }
    if (trim(entry.display_name).empty()) entry.display_name = entry.id;
    entries_.push_back(std::move(entry));
}

const PathwayCatalog::Entry* PathwayCatalog::find(std::string_view id) const {
    for (const auto& e : entries_) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

const PathwayCatalog::Entry* PathwayCatalog::match_definition(std::string_view text) const {
    const std::string t = fold(strip_trailing_period(text));
    if (t.empty() || entries_.empty()) return nullptr;

    for (const auto& e : entries_) {
        if (fold(strip_trailing_period(e.definition)) == t) return &e;
    }

    const Entry* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& e : entries_) {
        const std::string d = fold(strip_trailing_period(e.definition));
        if (d.find(t) != std::string::npos || t.find(d) != std::string::npos) {
            if (d.size() > best_len) {
                best = &e;
                best_len = d.size();
            }
        }
    }
    if (best != nullptr) return best;

    // Fallback for paraphrased captures: longest common substring, at least 15
    // chars and half the shorter string, so short incidental overlaps lose.
    std::size_t best_lcs = 0;
    for (const auto& e : entries_) {
        const std::string d = fold(strip_trailing_period(e.definition));
        const std::size_t floor = std::max<std::size_t>(15, std::min(t.size(), d.size()) / 2);
        const std::size_t lcs = common_substring(t, d);
        if (lcs >= floor && lcs > best_lcs) {
            best = &e;
            best_lcs = lcs;
        }
    }
    return best;
}

PathwayCatalog PathwayCatalog::load_tsv(std::istream& in) {
    PathwayCatalog catalog;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_delimited_line(line, '\t');
        if (line_no == 1 && !fields.empty() && fold(fields[0]) == "pathway_id") continue;
        if (fields.size() < 3) {
            throw ParseError("pathway catalog row needs 3 columns", line_no);
        }
        catalog.add({std::string(trim(fields[0])), std::string(trim(fields[1])),
                     std::string(trim(fields[2]))});
    }
    return catalog;
}

PathwayCatalog PathwayCatalog::load_tsv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pathway catalog: " + path);
    return load_tsv(in);
}

RenderResult render_description(const CellRecord& record, const Ontology* ontology,
                                const PathwayCatalog& catalog) {
    record.validate();
    RenderResult result;

    std::string definition;
    if (ontology != nullptr) {
        const OntologyTerm* term = ontology->find(record.cell_type_id);
        if (term == nullptr) {
            const LookupResult hit = lookup_term(*ontology, record.cell_type_name);
            if (hit) term = ontology->find(hit.id);
        }
        if (term != nullptr && term->definition.has_value()) {
            definition = definition_clause(*term->definition);
        }
        if (definition.empty()) {
            result.warnings.push_back("no ontology definition for \"" + record.cell_type_name +
                                      "\"; rendered name only");
        }
    }

    std::string text = "This sample consists of a " + record.cell_type_name;
    if (!definition.empty()) text += ", " + definition;
    text += ". It originates from the " + record.tissue + " of a " + record.disease + " " +
            std::string(to_string(record.sex)) + " during " + record.development_stage + ".";

    static constexpr std::string_view kPathwayLead[2] = {" This cell is associated with ",
                                                         " Additionally, it involves "};
    for (std::size_t i = 0; i < record.pathways.size(); ++i) {
        const PathwayCatalog::Entry* entry = catalog.find(record.pathways[i]);
        if (entry == nullptr) {
            throw ValidationError("unknown pathway id: " + record.pathways[i]);
        }
        text += std::string(kPathwayLead[i]);
        text += strip_trailing_period(entry->definition);
        text += ".";
    }

    result.text = std::move(text);
    return result;
}

namespace {

constexpr std::string_view kCueConsists = "consists of a ";
constexpr std::string_view kCueConsistsAn = "consists of an ";
constexpr std::string_view kCueOriginates = "originates from the ";
constexpr std::string_view kCueOfA = " of a ";
constexpr std::string_view kCueOfAn = " of an ";
constexpr std::string_view kCueDuring = " during ";
constexpr std::string_view kCueAssociated = "associated with ";
constexpr std::string_view kCueAdditionally = "additionally, it involves ";

/// Capture from `begin` to the sentence boundary before `bound` (npos = end of
/// text), then strip whitespace and one trailing period.
std::string capture_sentence(std::string_view text, std::size_t begin, std::size_t bound) {
    const std::size_t end = bound == std::string::npos ? text.size() : bound;
    if (begin >= end) return {};
    std::string_view cap = text.substr(begin, end - begin);
    if (bound != std::string::npos) {
        const std::size_t cut = cap.rfind(". ");
        if (cut != std::string_view::npos) cap = cap.substr(0, cut + 1);
    }
    return std::string(strip_trailing_period(cap));
}

void assign_if_nonempty(std::optional<std::string>& field, std::string value) {
    if (!value.empty()) field = std::move(value);
}

} // namespace

ExtractedLabels parse_description(std::string_view text) {
    ExtractedLabels out;
    const std::string src(text);
    const std::string low = fold(text);

    // Cell type: "consists of a {name}[, {definition}]."
    std::size_t consists_end = std::string::npos;
    {
        const std::size_t a = ci_find(low, kCueConsists);
        const std::size_t an = ci_find(low, kCueConsistsAn);
        if (an != std::string::npos && (a == std::string::npos || an <= a)) {
            consists_end = an + kCueConsistsAn.size();
        } else if (a != std::string::npos) {
            consists_end = a + kCueConsists.size();
        }
    }
    if (consists_end == std::string::npos) {
        out.diagnostics.emplace_back("consists of a");
    } else {
        std::size_t stop = src.size();
        const std::size_t comma = src.find(", ", consists_end);
        const std::size_t period = src.find('.', consists_end);
        if (comma != std::string::npos) stop = std::min(stop, comma);
        if (period != std::string::npos) stop = std::min(stop, period);
        assign_if_nonempty(out.cell_type, std::string(trim(src.substr(consists_end, stop - consists_end))));
        if (!out.cell_type) out.diagnostics.emplace_back("consists of a");
    }

    // Provenance: "originates from the {tissue} of a {disease} {sex} during {stage}."
    const std::size_t orig = ci_find(low, kCueOriginates);
    if (orig == std::string::npos) {
        out.diagnostics.emplace_back("originates from the");
        out.diagnostics.emplace_back("of a");
        out.diagnostics.emplace_back("during");
    } else {
        const std::size_t orig_end = orig + kCueOriginates.size();
        std::size_t of_pos = std::string::npos;
        std::size_t of_end = std::string::npos;
        {
            const std::size_t a = ci_find(low, kCueOfA, orig_end);
            const std::size_t an = ci_find(low, kCueOfAn, orig_end);
            if (an != std::string::npos && (a == std::string::npos || an <= a)) {
                of_pos = an;
                of_end = an + kCueOfAn.size();
            } else if (a != std::string::npos) {
                of_pos = a;
                of_end = a + kCueOfA.size();
            }
        }
        if (of_pos == std::string::npos) {
            out.diagnostics.emplace_back("of a");
            out.diagnostics.emplace_back("during");
        } else {
            assign_if_nonempty(out.tissue, std::string(trim(src.substr(orig_end, of_pos - orig_end))));
            if (!out.tissue) out.diagnostics.emplace_back("of a");

            const std::size_t dur = ci_find(low, kCueDuring, of_end);
            std::size_t span_end = dur;
            if (dur == std::string::npos) {
                const std::size_t period = src.find('.', of_end);
                span_end = period == std::string::npos ? src.size() : period;
            }
            const std::string span_store(trim(src.substr(of_end, span_end - of_end)));
            std::string_view span = span_store;

            // Sex is the trailing vocabulary word of the disease span.
            std::string_view sex_word;
            const std::size_t last_space = span.rfind(' ');
            std::string_view tail = last_space == std::string_view::npos
                                        ? span
                                        : span.substr(last_space + 1);
            const std::string tail_fold = fold(tail);
            if (tail_fold == "male" || tail_fold == "female" || tail_fold == "unknown") {
                sex_word = tail;
                span = trim(span.substr(0, span.size() - tail.size()));
            }
            assign_if_nonempty(out.disease, std::string(span));
            if (!out.disease) out.diagnostics.emplace_back("of a");
            if (!sex_word.empty()) {
                out.sex = fold(sex_word);
            } else {
                out.diagnostics.emplace_back("sex keyword");
            }

            if (dur == std::string::npos) {
                out.diagnostics.emplace_back("during");
            } else {
                const std::size_t dur_end = dur + kCueDuring.size();
                const std::size_t period = src.find('.', dur_end);
                const std::size_t stop = period == std::string::npos ? src.size() : period;
                assign_if_nonempty(out.development_stage,
                                   std::string(trim(src.substr(dur_end, stop - dur_end))));
                if (!out.development_stage) out.diagnostics.emplace_back("during");
            }
        }
    }

    // Pathway sentences may appear in either order; each bounds the other.
    const std::size_t assoc = ci_find(low, kCueAssociated);
    const std::size_t addit = ci_find(low, kCueAdditionally);
    if (assoc == std::string::npos) {
        out.diagnostics.emplace_back("associated with");
    }
    if (addit == std::string::npos && assoc != std::string::npos) {
        out.diagnostics.emplace_back("Additionally, it involves");
    }
    if (assoc != std::string::npos) {
        const std::size_t begin = assoc + kCueAssociated.size();
        const std::size_t bound = (addit != std::string::npos && addit > begin)
                                      ? addit
                                      : std::string::npos;
        std::string cap = capture_sentence(src, begin, bound);
        if (!cap.empty()) out.pathways.push_back(std::move(cap));
    }
    if (addit != std::string::npos) {
        const std::size_t begin = addit + kCueAdditionally.size();
        const std::size_t bound = (assoc != std::string::npos && assoc > begin)
                                      ? assoc
                                      : std::string::npos;
        std::string cap = capture_sentence(src, begin, bound);
        if (!cap.empty()) out.pathways.push_back(std::move(cap));
    }
    return out;
}

ExtractedLabels parse_description(std::string_view text, const PathwayCatalog& catalog) {
    ExtractedLabels out = parse_description(text);
    for (auto& p : out.pathways) {
        const PathwayCatalog::Entry* entry = catalog.match_definition(p);
        if (entry != nullptr) {
            p = entry->display_name;
        } else {
            std::string prefix = p.substr(0, std::min<std::size_t>(p.size(), 40));
            out.diagnostics.push_back("pathway definition unmatched: " + prefix);
        }
    }
    return out;
}

CanonicalizeResult canonicalize_label(std::string_view raw,
                                      std::span<const std::string> vocabulary,
                                      const Ontology* ontology) {
    if (vocabulary.empty()) throw ValidationError("empty label vocabulary");
    const std::string needle = fold(trim(raw));

    for (const auto& v : vocabulary) {
        if (fold(v) == needle) return {true, v};
    }
    if (ontology != nullptr && !needle.empty()) {
        const LookupResult hit = lookup_term(*ontology, trim(raw));
        if (hit) {
            const OntologyTerm* term = ontology->find(hit.id);
            const std::string name_fold = fold(term->name);
            for (const auto& v : vocabulary) {
                if (v == term->id || fold(v) == name_fold) return {true, v};
            }
        }
    }
    return {false, std::string(trim(raw))};
}

std::vector<CellRecord> records_from_table(const Table& table) {
    const std::size_t id_col = table.require_column("cell_id");
    std::size_t name_col;
    if (auto c = table.column_index("cell_type_name")) {
        name_col = *c;
    } else if (auto c2 = table.column_index("cell_type")) {
        name_col = *c2;
    } else {
        throw ValidationError("missing column: cell_type_name (or cell_type)");
    }
    const std::size_t tissue_col = table.require_column("tissue");
    const std::size_t disease_col = table.require_column("disease");
    const std::size_t sex_col = table.require_column("sex");
    const std::size_t stage_col = table.require_column("development_stage");
    const auto type_id_col = table.column_index("cell_type_id");
    const auto donor_col = table.column_index("donor_id");
    const auto assay_col = table.column_index("assay");
    const auto p1_col = table.column_index("pathway_1");
    const auto p2_col = table.column_index("pathway_2");

    std::vector<CellRecord> records;
    records.reserve(table.rows().size());
    for (const auto& row : table.rows()) {
        CellRecord rec;
        rec.cell_id = row[id_col];
        rec.cell_type_name = row[name_col];
        rec.tissue = row[tissue_col];
        rec.disease = row[disease_col];
        rec.sex = sex_from_string(row[sex_col]);
        rec.development_stage = row[stage_col];
        if (type_id_col) rec.cell_type_id = row[*type_id_col];
        if (donor_col) rec.donor_id = row[*donor_col];
        if (assay_col) rec.assay = row[*assay_col];
        if (p1_col && !trim(row[*p1_col]).empty()) rec.pathways.emplace_back(trim(row[*p1_col]));
        if (p2_col && !trim(row[*p2_col]).empty()) rec.pathways.emplace_back(trim(row[*p2_col]));
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<Description> read_descriptions(std::istream& in) {
    std::vector<Description> out;
    std::string line;
    std::size_t line_no = 0;
    bool mode_known = false;
    bool jsonl = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string_view content = trim(line);
        if (content.empty()) continue;
        if (!mode_known) {
            jsonl = content.front() == '{';
            mode_known = true;
        }
        if (jsonl) {
            nlohmann::json obj;
            try {
                obj = nlohmann::json::parse(content);
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(std::string("bad description JSON: ") + e.what(), line_no);
            }
            if (!obj.contains("cell_id") || !obj.contains("text")) {
                throw ParseError("description object needs cell_id and text", line_no);
            }
            Description d;
            d.cell_id = obj["cell_id"].is_string() ? obj["cell_id"].get<std::string>()
                                                   : obj["cell_id"].dump();
            d.text = obj["text"].get<std::string>();
            out.push_back(std::move(d));
        } else {
            out.push_back({std::to_string(out.size() + 1), line});
        }
    }
    return out;
}

void write_descriptions_jsonl(std::span<const Description> descriptions, std::ostream& out) {
    for (const auto& d : descriptions) {
        nlohmann::json obj;
        obj["cell_id"] = d.cell_id;
        obj["text"] = d.text;
        out << obj.dump() << "\n";
    }
}

} // namespace celldesc
