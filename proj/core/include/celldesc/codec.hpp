#ifndef CELLDESC_CODEC_HPP_
#define CELLDESC_CODEC_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "celldesc/ontology.hpp"
#include "celldesc/table.hpp"

namespace celldesc {

enum class Sex { male, female, unknown };

std::string_view to_string(Sex sex);
Sex sex_from_string(std::string_view s); // case-insensitive; unrecognized -> unknown

/// One cell's metadata, the unit the description template renders.
struct CellRecord {
    std::string cell_id;
    std::string cell_type_id; // CURIE; may be empty when only the name is known
    std::string cell_type_name;
    std::string tissue;
    std::string disease;
    Sex sex = Sex::unknown;
    std::string development_stage;
    std::string donor_id;
    std::string assay;
    std::vector<std::string> pathways; // 0..2 pathway ids, no duplicates

    void validate() const; // throws ValidationError on pathway count/duplicates
};

/// Pathway id -> (display name, human-readable definition).
class PathwayCatalog {
public:
    struct Entry {
        std::string id;
        std::string display_name;
        std::string definition;
    };

    void add(Entry entry); // throws ValidationError on duplicate id / empty definition
    const Entry* find(std::string_view id) const;
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// Maps free text back to the entry whose definition it matches: exact
    /// (case-folded, trailing period ignored), then containment, then longest
    /// common substring above a length floor. Returns nullptr when nothing
    /// matches well enough.
    const Entry* match_definition(std::string_view text) const;

    /// TSV columns: pathway_id, display_name, definition. A header row is
    /// detected by the literal first cell "pathway_id".
    static PathwayCatalog load_tsv(std::istream& in);
    static PathwayCatalog load_tsv_file(const std::string& path);

private:
    std::vector<Entry> entries_;
};

struct RenderResult {
    std::string text;
    std::vector<std::string> warnings;
};

/// Renders the canonical description template:
///   "This sample consists of a {name}, {term definition}. It originates from
///    the {tissue} of a {disease} {sex} during {stage}. This cell is
///    associated with {pathway 1 definition}. Additionally, it involves
///    {pathway 2 definition}."
/// The term definition clause is dropped (with a warning) when the ontology
/// cannot supply one; pathway sentences are dropped when the record carries
/// fewer than two pathways. Unknown pathway ids throw ValidationError.
RenderResult render_description(const CellRecord& record, const Ontology* ontology,
                                const PathwayCatalog& catalog);

struct ExtractedLabels {
    std::optional<std::string> cell_type;
    std::optional<std::string> tissue;
    std::optional<std::string> disease;
    std::optional<std::string> sex;
    std::optional<std::string> development_stage;
    std::vector<std::string> pathways;    // raw definition text, or display names when mapped
    std::vector<std::string> diagnostics; // cue phrases that failed to match
};

/// Total, cue-anchored extraction; never throws. Unmatched cues yield absent
/// fields and a diagnostics entry.
ExtractedLabels parse_description(std::string_view text);

/// Same extraction, with pathway definition text mapped to catalog display
/// names via PathwayCatalog::match_definition. Unmapped captures stay raw.
ExtractedLabels parse_description(std::string_view text, const PathwayCatalog& catalog);

struct CanonicalizeResult {
    bool matched = false;
    std::string label; // vocabulary entry verbatim when matched
};

/// Case-insensitive exact match against the vocabulary, then an ontology
/// synonym hop (raw -> term -> term name/id in vocabulary). Never fuzzy.
/// Throws ValidationError on an empty vocabulary.
CanonicalizeResult canonicalize_label(std::string_view raw,
                                      std::span<const std::string> vocabulary,
                                      const Ontology* ontology = nullptr);

/// Reads CellRecords from a header table. Recognized columns: cell_id,
/// cell_type_id, cell_type_name (or cell_type), tissue, disease, sex,
/// development_stage, donor_id, assay, pathway_1, pathway_2.
std::vector<CellRecord> records_from_table(const Table& table);

struct Description {
    std::string cell_id;
    std::string text;
};

/// JSON-lines {"cell_id":..., "text":...} or plain one-description-per-line
/// (detected by a leading '{'); plain lines get 1-based positional ids.
std::vector<Description> read_descriptions(std::istream& in);
void write_descriptions_jsonl(std::span<const Description> descriptions, std::ostream& out);

} // namespace celldesc

#endif // CELLDESC_CODEC_HPP_
