// celldesc: command-line driver for the cell-description toolkit.
//
// Exit codes: 0 success, 1 usage, 2 I/O, 3 parse, 4 validation.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "celldesc/aucell.hpp"
#include "celldesc/codec.hpp"
#include "celldesc/cohort.hpp"
#include "celldesc/errors.hpp"
#include "celldesc/label_metrics.hpp"
#include "celldesc/ontology.hpp"
#include "celldesc/similarity.hpp"
#include "celldesc/table.hpp"
#include "celldesc/text_metrics.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = CELLDESC_VERSION;

// ---------------------------------------------------------------------------
// Config file support: TOML via CLI11's reader, JSON by sniffing a leading '{'.

class JsonAwareConfig : public CLI::ConfigBase {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        const auto start = input.tellg();
        char first = 0;
        while (input.get(first) && std::isspace(static_cast<unsigned char>(first))) {
        }
        input.clear();
        input.seekg(start);
        if (first != '{') return CLI::ConfigBase::from_config(input);

        json doc;
        try {
            doc = json::parse(input);
        } catch (const json::exception& e) {
            throw CLI::ConfigError(std::string("bad JSON config: ") + e.what());
        }
        std::vector<CLI::ConfigItem> items;
        flatten(doc, {}, items);
        return items;
    }

private:
    static std::string scalar(const json& value) {
        if (value.is_string()) return value.get<std::string>();
        if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
        return value.dump();
    }

    static void flatten(const json& obj, std::vector<std::string> parents,
                        std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, value] : obj.items()) {
            if (value.is_object()) {
                auto nested = parents;
                nested.push_back(key);
                flatten(value, nested, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            if (value.is_array()) {
                for (const auto& element : value) item.inputs.push_back(scalar(element));
            } else {
                item.inputs.push_back(scalar(value));
            }
            out.push_back(std::move(item));
        }
    }
};

// ---------------------------------------------------------------------------
// Small shared helpers.

double pct(double unit) { return 100.0 * unit; }

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw celldesc::IoError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw celldesc::IoError("cannot open '" + path + "' for writing");
    return out;
}

void write_json(const json& doc, const std::string& path) {
    if (path.empty()) {
        std::cout << doc.dump(2) << "\n";
        return;
    }
    auto out = open_output(path);
    out << doc.dump(2) << "\n";
}

std::string sanitize_tsv(std::string text) {
    for (char& c : text) {
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

std::string format_score(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

// ---------------------------------------------------------------------------
// Per-subcommand option bags.

struct OntologyOpts {
    std::string obo;
    std::string out_edges;
    std::string out_terms;
    std::string summary;
    bool include_obsolete = false;
};

struct SimilarityOpts {
    std::string graph;
    std::string out;
    std::string stats;
    std::string cdf;
    std::string fit;
    double damping = 0.85;
    double tolerance = 1e-10;
    std::size_t max_iterations = 10000;
    double tau = 0.1;
    bool symmetrize = false;
    int threads = 1;
};

struct EvaluateOpts {
    std::string task;
    std::string predictions;
    std::string references;
    std::string pairs;
    std::string matrix;
    std::string obo;
    std::string out;
    std::vector<std::string> embeddings; // NAME=path
    bool pooled_bleu = false;
    bool drop_unresolved = false;
    double rouge_beta = 1.2;
};

struct PathwaysOpts {
    std::string expression;
    std::string gene_sets;
    std::string out;
    std::string top_out;
    std::string prevalence_out;
    double top_fraction = 0.05;
    std::size_t hvg = 0;
    std::size_t top_k = 2;
    double threshold = 0.005;
};

struct SampleOpts {
    std::string table;
    std::string out;
    std::string report;
    std::size_t target_n = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> objective{"cell_type", "tissue", "disease"};
};

struct SplitOpts {
    std::string table;
    std::string out;
    std::string report;
    std::uint64_t seed = 0;
    std::vector<double> ratios{0.8, 0.1, 0.1};
};

struct DescribeOpts {
    std::string records;
    std::string catalog;
    std::string obo;
    std::string out;
};

struct PipelineOpts {
    std::string cohort;
    std::string expression;
    std::string gene_sets;
    std::string catalog;
    std::string obo;
    std::string out_dir;
    std::size_t target_n = 0;
    std::uint64_t seed = 0;
    std::vector<double> ratios{0.8, 0.1, 0.1};
    std::vector<std::string> objective{"cell_type", "tissue", "disease"};
    double top_fraction = 0.05;
    std::size_t hvg = 0;
    double threshold = 0.005;
    std::vector<std::string> exclusions;
};

// ---------------------------------------------------------------------------
// ontology: OBO -> edge list, term table, summary.

int run_ontology(const OntologyOpts& opt) {
    auto in = open_input(opt.obo);
    const celldesc::Ontology onto = celldesc::parse_obo(in);
    const celldesc::OntologyGraph graph = celldesc::build_graph(onto, opt.include_obsolete);

    {
        auto out = open_output(opt.out_edges);
        graph.export_edges(out);
    }
    if (!opt.out_terms.empty()) {
        auto out = open_output(opt.out_terms);
        out << "id\tname\tobsolete\tdefinition\n";
        for (const auto& term : onto.terms()) {
            out << term.id << '\t' << sanitize_tsv(term.name) << '\t'
                << (term.obsolete ? "true" : "false") << '\t'
                << sanitize_tsv(term.definition.value_or("")) << '\n';
        }
    }
    if (!opt.summary.empty()) {
        json summary;
        summary["terms"] = onto.size();
        summary["graph_nodes"] = graph.node_count();
        summary["edges"] = graph.edge_count();
        summary["warning_count"] = graph.warnings().size();
        json warnings = json::array();
        for (const auto& w : graph.warnings()) {
            warnings.push_back(w.source_id + " -> " + w.target_id + ": " + w.reason);
        }
        summary["warnings"] = warnings;
        write_json(summary, opt.summary);
    }
    std::cerr << "ontology: " << onto.size() << " terms, " << graph.edge_count() << " edges, "
              << graph.warnings().size() << " warnings\n";
    return 0;
}

// ---------------------------------------------------------------------------
// similarity: edge list -> PPR similarity matrix and distribution reports.

int run_similarity(const SimilarityOpts& opt) {
    auto in = open_input(opt.graph);
    const celldesc::OntologyGraph graph = celldesc::OntologyGraph::from_edge_list(in);

    celldesc::PprConfig config;
    config.damping = opt.damping;
    config.tolerance = opt.tolerance;
    config.max_iterations = opt.max_iterations;
    config.tau = opt.tau;
    config.validate();

    const celldesc::SimilarityMatrix matrix =
        celldesc::similarity_matrix(graph, config, opt.symmetrize, opt.threads);
    matrix.save_file(opt.out);

    if (!opt.stats.empty()) {
        auto out = open_output(opt.stats);
        celldesc::write_stats_json(celldesc::similarity_stats(matrix), out);
    }
    if (!opt.cdf.empty()) {
        auto out = open_output(opt.cdf);
        celldesc::export_cdf(matrix, out);
    }
    if (!opt.fit.empty()) {
        auto out = open_output(opt.fit);
        celldesc::write_fit_json(celldesc::heavy_tail_fit(matrix), out);
    }
    std::cerr << "similarity: " << matrix.size() << " terms"
              << (matrix.symmetrized() ? ", symmetrized" : "") << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate: metric reports whose field names mirror the result tables.

std::vector<celldesc::Description> read_descriptions_file(const std::string& path) {
    auto in = open_input(path);
    return celldesc::read_descriptions(in);
}

json evaluate_generation_report(const EvaluateOpts& opt) {
    const auto preds = read_descriptions_file(opt.predictions);
    const auto refs = read_descriptions_file(opt.references);
    if (refs.empty()) throw celldesc::ValidationError("no references");

    std::map<std::string, std::string> by_id;
    for (const auto& d : preds) {
        if (!by_id.emplace(d.cell_id, d.text).second) {
            throw celldesc::ValidationError("duplicate prediction for cell '" + d.cell_id + "'");
        }
    }
    std::vector<std::string> pred_texts, ref_texts;
    std::vector<std::string> missing;
    for (const auto& d : refs) {
        const auto it = by_id.find(d.cell_id);
        if (it == by_id.end()) {
            missing.push_back(d.cell_id);
            pred_texts.emplace_back();
        } else {
            pred_texts.push_back(it->second);
            by_id.erase(it);
        }
        ref_texts.push_back(d.text);
    }
    if (!by_id.empty()) {
        throw celldesc::ValidationError("prediction for unknown cell '" +
                                        by_id.begin()->first + "'");
    }

    celldesc::GenerationReport report =
        celldesc::evaluate_generation(pred_texts, ref_texts, opt.pooled_bleu, opt.rouge_beta);
    for (const auto& id : missing) {
        report.warnings.push_back("no prediction for cell '" + id + "', scored empty");
    }

    json doc;
    doc["Exct"] = pct(report.exact_match);
    doc["B-2"] = pct(report.bleu2);
    doc["B-4"] = pct(report.bleu4);
    doc["R-1"] = pct(report.rouge1);
    doc["R-2"] = pct(report.rouge2);
    doc["R-L"] = pct(report.rougeL);
    doc["pairs"] = refs.size();

    json details = json::object();
    for (const auto& spec : opt.embeddings) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size()) {
            throw celldesc::UsageError("--embeddings expects NAME=path, got '" + spec + "'");
        }
        const std::string name = spec.substr(0, eq);
        auto in = open_input(spec.substr(eq + 1));
        const auto pairs = celldesc::read_embedding_pairs(in);
        const celldesc::EmbeddingScore score = celldesc::corpus_embedding_score(pairs);
        doc[name + "-f1"] = pct(score.f1);
        details[name] = {{"precision", pct(score.precision)}, {"recall", pct(score.recall)}};
    }
    if (!details.empty()) doc["embedding_details"] = details;
    if (!report.warnings.empty()) doc["warnings"] = report.warnings;
    return doc;
}

json evaluate_classify_report(const EvaluateOpts& opt) {
    const celldesc::Table table = celldesc::read_table_file(opt.pairs);
    const auto pairs = celldesc::label_pairs_from_table(table);
    const celldesc::ClassificationReport report = celldesc::classification_report(pairs);

    json doc;
    doc["accuracy"] = pct(report.accuracy);
    doc["f1-score"] = pct(report.weighted_f1);
    doc["pairs"] = pairs.size();
    json per_class = json::object();
    for (const auto& stats : report.per_class) {
        per_class[stats.label] = {{"precision", pct(stats.precision)},
                                  {"recall", pct(stats.recall)},
                                  {"f1", pct(stats.f1)},
                                  {"support", stats.support}};
    }
    doc["per_class"] = per_class;
    return doc;
}

json evaluate_pathways_report(const EvaluateOpts& opt) {
    const celldesc::Table table = celldesc::read_table_file(opt.pairs);
    const auto pairs = celldesc::labelset_pairs_from_table(table);
    const celldesc::MultiLabelReport report = celldesc::multilabel_report(pairs);

    json doc;
    doc["Acc"] = pct(report.subset_accuracy);
    doc["Jac"] = pct(report.jaccard);
    doc["F1"] = pct(report.weighted_f1);
    doc["pairs"] = pairs.size();
    return doc;
}

json evaluate_ps_report(const EvaluateOpts& opt) {
    if (opt.matrix.empty()) {
        throw celldesc::UsageError("the ps task requires --matrix");
    }
    const celldesc::SimilarityMatrix matrix = celldesc::SimilarityMatrix::load_file(opt.matrix);
    celldesc::Ontology onto;
    bool have_onto = false;
    if (!opt.obo.empty()) {
        auto in = open_input(opt.obo);
        onto = celldesc::parse_obo(in);
        have_onto = true;
    }
    const celldesc::Table table = celldesc::read_table_file(opt.pairs);
    const auto pairs = celldesc::label_pairs_from_table(table);
    const celldesc::PsReport report = celldesc::pagerank_similarity_score(
        pairs, matrix, have_onto ? &onto : nullptr, opt.drop_unresolved);

    json doc;
    doc["PS"] = report.average;
    doc["pairs"] = pairs.size();
    doc["scored_pairs"] = report.scored_pairs;
    doc["unresolved_predictions"] = report.unresolved_predictions;
    doc["drop_unresolved"] = opt.drop_unresolved;
    return doc;
}

int run_evaluate(const EvaluateOpts& opt) {
    json doc;
    if (opt.task == "generation") {
        doc = evaluate_generation_report(opt);
    } else if (opt.task == "classify") {
        doc = evaluate_classify_report(opt);
    } else if (opt.task == "pathways") {
        doc = evaluate_pathways_report(opt);
    } else {
        doc = evaluate_ps_report(opt);
    }
    doc["task"] = opt.task;
    write_json(doc, opt.out);
    return 0;
}

// ---------------------------------------------------------------------------
// pathways: expression + gene sets -> activity, top-k lists, prevalence.

void write_top_lists(const std::vector<std::vector<celldesc::RankedPathway>>& lists,
                     const std::vector<std::string>& cells, std::size_t k, std::ostream& out) {
    out << "cell_id";
    for (std::size_t i = 1; i <= k; ++i) {
        out << "\tpathway_" << i << "\tscore_" << i;
    }
    out << '\n';
    for (std::size_t c = 0; c < lists.size(); ++c) {
        out << cells[c];
        for (std::size_t i = 0; i < k; ++i) {
            if (i < lists[c].size()) {
                out << '\t' << lists[c][i].id << '\t' << format_score(lists[c][i].score);
            } else {
                out << "\t\t";
            }
        }
        out << '\n';
    }
}

int run_pathways(const PathwaysOpts& opt) {
    celldesc::ExpressionMatrix expr = celldesc::read_expression_matrix(opt.expression);
    const auto sets = celldesc::read_gmt_file(opt.gene_sets);

    if (opt.hvg > 0) {
        const celldesc::HvgResult hvg = celldesc::select_hvg(expr, opt.hvg);
        for (const auto& w : hvg.warnings) std::cerr << "warning: " << w << "\n";
        expr = celldesc::subset_genes(expr, hvg.genes);
    }

    const celldesc::ActivityMatrix activity =
        celldesc::score_matrix(expr, sets, opt.top_fraction);
    for (const auto& w : activity.warnings) std::cerr << "warning: " << w << "\n";
    {
        auto out = open_output(opt.out);
        celldesc::write_activity_csv(activity, out);
    }

    if (!opt.top_out.empty() || !opt.prevalence_out.empty()) {
        const auto lists = celldesc::top_k_pathways(activity, opt.top_k);
        if (!opt.top_out.empty()) {
            auto out = open_output(opt.top_out);
            write_top_lists(lists, activity.cells, opt.top_k, out);
        }
        if (!opt.prevalence_out.empty()) {
            const celldesc::PrevalenceReport report =
                celldesc::prevalence_filter(lists, activity.pathways, opt.threshold);
            json doc;
            doc["threshold"] = opt.threshold;
            doc["retained"] = report.retained;
            doc["prevalence"] = report.prevalence;
            write_json(doc, opt.prevalence_out);
        }
    }
    std::cerr << "pathways: " << activity.cells.size() << " cells x "
              << activity.pathways.size() << " sets\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sample / split: seeded cohort operations.

int run_sample(const SampleOpts& opt) {
    const celldesc::Table table = celldesc::read_table_file(opt.table);
    std::vector<std::string> columns;
    for (const auto& logical : opt.objective) {
        columns.push_back(celldesc::resolve_column(table, logical));
    }

    json before = json::object();
    for (const auto& col : columns) before[col] = celldesc::column_diversity(table, col);

    const celldesc::Table sampled =
        celldesc::stratified_sample(table, opt.target_n, columns, opt.seed);
    celldesc::write_table_file(sampled, opt.out);

    json after = json::object();
    for (const auto& col : columns) after[col] = celldesc::column_diversity(sampled, col);

    json doc;
    doc["seed"] = opt.seed;
    doc["target_n"] = opt.target_n;
    doc["objective_columns"] = columns;
    doc["diversity_before"] = before;
    doc["diversity_after"] = after;
    write_json(doc, opt.report);
    return 0;
}

json split_report(const celldesc::SplitAssignment& assignment, std::uint64_t seed,
                  const std::vector<double>& ratios) {
    std::array<std::size_t, 3> donors{};
    for (const auto& [donor, split] : assignment.by_donor) {
        ++donors[static_cast<std::size_t>(split)];
    }
    json doc;
    doc["seed"] = seed;
    doc["ratios"] = ratios;
    for (std::size_t s = 0; s < 3; ++s) {
        const std::string name(celldesc::to_string(static_cast<celldesc::Split>(s)));
        doc["cells"][name] = assignment.cells[s];
        doc["achieved"][name] = assignment.achieved[s];
        doc["donors"][name] = donors[s];
    }
    return doc;
}

int run_split(const SplitOpts& opt) {
    const celldesc::Table table = celldesc::read_table_file(opt.table);
    const celldesc::SplitAssignment assignment =
        celldesc::donor_split(table, {opt.ratios[0], opt.ratios[1], opt.ratios[2]}, opt.seed);
    {
        auto out = open_output(opt.out);
        celldesc::write_split_tsv(assignment, out);
    }
    write_json(split_report(assignment, opt.seed, opt.ratios), opt.report);
    return 0;
}

// ---------------------------------------------------------------------------
// describe: records -> rendered descriptions.

int run_describe(const DescribeOpts& opt) {
    const celldesc::Table table = celldesc::read_table_file(opt.records);
    const auto records = celldesc::records_from_table(table);
    celldesc::PathwayCatalog catalog;
    if (!opt.catalog.empty()) catalog = celldesc::PathwayCatalog::load_tsv_file(opt.catalog);

    celldesc::Ontology onto;
    bool have_onto = false;
    if (!opt.obo.empty()) {
        auto in = open_input(opt.obo);
        onto = celldesc::parse_obo(in);
        have_onto = true;
    }

    std::vector<celldesc::Description> descriptions;
    std::size_t warning_count = 0;
    for (const auto& record : records) {
        const celldesc::RenderResult rendered =
            celldesc::render_description(record, have_onto ? &onto : nullptr, catalog);
        for (const auto& w : rendered.warnings) {
            std::cerr << "warning: " << record.cell_id << ": " << w << "\n";
            ++warning_count;
        }
        descriptions.push_back({record.cell_id, rendered.text});
    }
    if (opt.out.empty()) {
        celldesc::write_descriptions_jsonl(descriptions, std::cout);
    } else {
        auto out = open_output(opt.out);
        celldesc::write_descriptions_jsonl(descriptions, out);
    }
    std::cerr << "describe: " << descriptions.size() << " descriptions, " << warning_count
              << " warnings\n";
    return 0;
}

// ---------------------------------------------------------------------------
// pipeline: cohort -> filter -> sample -> score -> describe -> split.

int run_pipeline(const PipelineOpts& opt) {
    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    const fs::path dir(opt.out_dir);
    const std::string sampled_path = (dir / "sampled.tsv").string();
    const std::string activity_path = (dir / "activity.csv").string();
    const std::string descriptions_path = (dir / "descriptions.jsonl").string();
    const std::string split_path = (dir / "split.tsv").string();
    const std::string manifest_path = (dir / "manifest.json").string();

    const auto cleanup = [&] {
        for (const auto& p :
             {sampled_path, activity_path, descriptions_path, split_path, manifest_path}) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    };

    try {
        const celldesc::Table cohort = celldesc::read_table_file(opt.cohort);

        std::span<const std::string> exclusions = opt.exclusions;
        if (exclusions.empty()) exclusions = celldesc::default_assay_exclusions();
        const celldesc::AssayFilterReport filtered =
            celldesc::assay_filter(cohort, exclusions);

        std::vector<std::string> columns;
        for (const auto& logical : opt.objective) {
            columns.push_back(celldesc::resolve_column(filtered.table, logical));
        }
        json diversity_before = json::object();
        for (const auto& col : columns) {
            diversity_before[col] = celldesc::column_diversity(filtered.table, col);
        }

        const celldesc::Table sampled =
            celldesc::stratified_sample(filtered.table, opt.target_n, columns, opt.seed);
        celldesc::write_table_file(sampled, sampled_path);

        json diversity_after = json::object();
        for (const auto& col : columns) {
            diversity_after[col] = celldesc::column_diversity(sampled, col);
        }

        // Score only the sampled cells, in sampled row order.
        const std::size_t id_col = sampled.require_column("cell_id");
        std::vector<std::string> cell_ids;
        cell_ids.reserve(sampled.row_count());
        for (const auto& row : sampled.rows()) cell_ids.push_back(row[id_col]);

        celldesc::ExpressionMatrix expr =
            celldesc::subset_cells(celldesc::read_expression_matrix(opt.expression), cell_ids);
        const auto sets = celldesc::read_gmt_file(opt.gene_sets);

        std::size_t scoring_warnings = 0;
        if (opt.hvg > 0) {
            const celldesc::HvgResult hvg = celldesc::select_hvg(expr, opt.hvg);
            for (const auto& w : hvg.warnings) {
                std::cerr << "warning: " << w << "\n";
                ++scoring_warnings;
            }
            expr = celldesc::subset_genes(expr, hvg.genes);
        }
        const celldesc::ActivityMatrix activity =
            celldesc::score_matrix(expr, sets, opt.top_fraction);
        for (const auto& w : activity.warnings) {
            std::cerr << "warning: " << w << "\n";
            ++scoring_warnings;
        }
        {
            auto out = open_output(activity_path);
            celldesc::write_activity_csv(activity, out);
        }

        const auto top_lists = celldesc::top_k_pathways(activity, 2);
        const celldesc::PrevalenceReport prevalence =
            celldesc::prevalence_filter(top_lists, activity.pathways, opt.threshold);
        const std::set<std::string> retained(prevalence.retained.begin(),
                                             prevalence.retained.end());

        celldesc::PathwayCatalog catalog;
        if (!opt.catalog.empty()) {
            catalog = celldesc::PathwayCatalog::load_tsv_file(opt.catalog);
        } else {
            for (const auto& set : sets) {
                if (set.name.empty()) {
                    throw celldesc::ValidationError(
                        "gene set " + set.id +
                        " has no description usable as a definition; provide --catalog");
                }
                catalog.add({set.id, set.id, set.name});
            }
        }

        celldesc::Ontology onto;
        bool have_onto = false;
        if (!opt.obo.empty()) {
            auto in = open_input(opt.obo);
            onto = celldesc::parse_obo(in);
            have_onto = true;
        }

        auto records = celldesc::records_from_table(sampled);
        std::size_t render_warnings = 0;
        std::vector<celldesc::Description> descriptions;
        descriptions.reserve(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            records[i].pathways.clear();
            for (const auto& entry : top_lists[i]) {
                if (retained.count(entry.id) > 0) records[i].pathways.push_back(entry.id);
            }
            const celldesc::RenderResult rendered = celldesc::render_description(
                records[i], have_onto ? &onto : nullptr, catalog);
            render_warnings += rendered.warnings.size();
            descriptions.push_back({records[i].cell_id, rendered.text});
        }
        {
            auto out = open_output(descriptions_path);
            celldesc::write_descriptions_jsonl(descriptions, out);
        }

        const celldesc::SplitAssignment assignment = celldesc::donor_split(
            sampled, {opt.ratios[0], opt.ratios[1], opt.ratios[2]}, opt.seed);
        {
            auto out = open_output(split_path);
            celldesc::write_split_tsv(assignment, out);
        }

        json manifest;
        manifest["tool"] = "celldesc";
        manifest["version"] = kVersion;
        manifest["seed"] = opt.seed;
        manifest["parameters"] = {
            {"target_n", opt.target_n},
            {"ratios", opt.ratios},
            {"objective_columns", columns},
            {"top_fraction", opt.top_fraction},
            {"hvg", opt.hvg},
            {"prevalence_threshold", opt.threshold},
            {"assay_exclusions", std::vector<std::string>(exclusions.begin(), exclusions.end())},
        };
        manifest["counts"] = {
            {"input_rows", cohort.row_count()},
            {"removed_by_assay", filtered.removed_rows},
            {"after_assay_filter", filtered.table.row_count()},
            {"sampled", sampled.row_count()},
            {"donors", assignment.by_donor.size()},
            {"gene_sets", sets.size()},
            {"retained_pathways", prevalence.retained.size()},
            {"descriptions", descriptions.size()},
        };
        manifest["removed_by_assay"] = filtered.removed_by_assay;
        manifest["diversity_before"] = diversity_before;
        manifest["diversity_after"] = diversity_after;
        manifest["retained_pathways"] = prevalence.retained;
        for (std::size_t s = 0; s < 3; ++s) {
            const std::string name(celldesc::to_string(static_cast<celldesc::Split>(s)));
            manifest["achieved_ratios"][name] = assignment.achieved[s];
        }
        manifest["warnings"] = {{"scoring", scoring_warnings}, {"render", render_warnings}};
        write_json(manifest, manifest_path);
    } catch (...) {
        cleanup();
        throw;
    }
    std::cerr << "pipeline: outputs in " << opt.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int dispatch(int argc, char** argv) {
    CLI::App app{"Cell description toolkit: ontology similarity, metadata-to-text "
                 "descriptions, pathway scoring, and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("celldesc ") + kVersion);
    app.config_formatter(std::make_shared<JsonAwareConfig>());
    app.set_config("--config", "", "TOML or JSON file with option defaults");

    OntologyOpts ontology_opts;
    auto* cmd_ontology =
        app.add_subcommand("ontology", "Parse an OBO file into an is_a edge list");
    cmd_ontology->add_option("--obo", ontology_opts.obo, "OBO input")
        ->required();
    cmd_ontology->add_option("--out-edges", ontology_opts.out_edges, "edge list TSV output")
        ->required();
    cmd_ontology->add_option("--out-terms", ontology_opts.out_terms, "term table TSV output");
    cmd_ontology->add_option("--summary", ontology_opts.summary, "summary JSON output");
    cmd_ontology->add_flag("--include-obsolete", ontology_opts.include_obsolete,
                           "keep obsolete terms as isolated nodes");

    SimilarityOpts similarity_opts;
    auto* cmd_similarity =
        app.add_subcommand("similarity", "Personalized-PageRank similarity matrix");
    cmd_similarity->add_option("--graph", similarity_opts.graph, "edge list TSV")
        ->required();
    cmd_similarity->add_option("--out", similarity_opts.out, "matrix output (PPRS binary)")
        ->required();
    cmd_similarity->add_option("--damping", similarity_opts.damping, "PPR damping factor");
    cmd_similarity->add_option("--tolerance", similarity_opts.tolerance, "L1 convergence bound");
    cmd_similarity->add_option("--max-iterations", similarity_opts.max_iterations,
                               "power iteration cap");
    cmd_similarity->add_option("--tau", similarity_opts.tau, "log scaling temperature");
    cmd_similarity->add_flag("--symmetrize", similarity_opts.symmetrize,
                             "average S(i,j) and S(j,i)");
    cmd_similarity->add_option("--threads", similarity_opts.threads,
                               "row workers (0 = hardware)");
    cmd_similarity->add_option("--stats", similarity_opts.stats,
                               "off-diagonal distribution stats JSON");
    cmd_similarity->add_option("--cdf", similarity_opts.cdf, "empirical CDF TSV");
    cmd_similarity->add_option("--fit", similarity_opts.fit, "power-law fit JSON");

    EvaluateOpts evaluate_opts;
    auto* cmd_evaluate = app.add_subcommand("evaluate", "Metric reports for model outputs");
    cmd_evaluate
        ->add_option("--task", evaluate_opts.task, "generation | classify | pathways | ps")
        ->required()
        ->check(CLI::IsMember({"generation", "classify", "pathways", "ps"}));
    cmd_evaluate->add_option("--predictions", evaluate_opts.predictions,
                             "predicted descriptions (generation task)");
    cmd_evaluate->add_option("--references", evaluate_opts.references,
                             "reference descriptions (generation task)");
    cmd_evaluate->add_option("--pairs", evaluate_opts.pairs,
                             "cell_id/predicted/reference table (label tasks)");
    cmd_evaluate->add_option("--matrix", evaluate_opts.matrix, "similarity matrix (ps task)");
    cmd_evaluate->add_option("--ontology", evaluate_opts.obo, "OBO file for label resolution");
    cmd_evaluate->add_option("--embeddings", evaluate_opts.embeddings,
                             "NAME=path of token-embedding JSONL (repeatable)");
    cmd_evaluate->add_flag("--pooled-bleu", evaluate_opts.pooled_bleu,
                           "corpus-pooled BLEU instead of sentence average");
    cmd_evaluate->add_flag("--drop-unresolved", evaluate_opts.drop_unresolved,
                           "exclude unresolvable predictions from the PS average");
    cmd_evaluate->add_option("--rouge-beta", evaluate_opts.rouge_beta, "ROUGE-L beta");
    cmd_evaluate->add_option("--out", evaluate_opts.out, "report JSON (default stdout)");

    PathwaysOpts pathways_opts;
    auto* cmd_pathways = app.add_subcommand("pathways", "AUCell activity scores");
    cmd_pathways
        ->add_option("--expression", pathways_opts.expression,
                     "expression matrix (.mtx with sidecars, or dense CSV)")
        ->required();
    cmd_pathways->add_option("--gene-sets", pathways_opts.gene_sets, "GMT gene sets")
        ->required();
    cmd_pathways->add_option("--out", pathways_opts.out, "activity CSV output")->required();
    cmd_pathways->add_option("--top-fraction", pathways_opts.top_fraction,
                             "AUCell ranking window fraction");
    cmd_pathways->add_option("--hvg", pathways_opts.hvg,
                             "restrict to N highly variable genes (0 = off)");
    cmd_pathways->add_option("--top-k", pathways_opts.top_k, "pathways per cell");
    cmd_pathways->add_option("--top-out", pathways_opts.top_out, "per-cell top-k TSV");
    cmd_pathways->add_option("--prevalence-threshold", pathways_opts.threshold,
                             "minimum active fraction");
    cmd_pathways->add_option("--prevalence-out", pathways_opts.prevalence_out,
                             "prevalence report JSON");

    SampleOpts sample_opts;
    auto* cmd_sample = app.add_subcommand("sample", "Diversity-maximizing subsample");
    cmd_sample->add_option("--table", sample_opts.table, "cohort CSV/TSV")
        ->required();
    cmd_sample->add_option("--target-n", sample_opts.target_n, "rows to select")->required();
    cmd_sample->add_option("--seed", sample_opts.seed, "RNG seed")->required();
    cmd_sample->add_option("--objective", sample_opts.objective,
                           "objective columns (default cell_type tissue disease)");
    cmd_sample->add_option("--out", sample_opts.out, "sampled table output")->required();
    cmd_sample->add_option("--report", sample_opts.report,
                           "diversity report JSON (default stdout)");

    SplitOpts split_opts;
    auto* cmd_split = app.add_subcommand("split", "Donor-level train/val/test split");
    cmd_split->add_option("--table", split_opts.table, "cohort CSV/TSV")
        ->required();
    cmd_split->add_option("--seed", split_opts.seed, "RNG seed")->required();
    cmd_split->add_option("--ratios", split_opts.ratios, "train val test cell-count ratios")
        ->expected(3);
    cmd_split->add_option("--out", split_opts.out, "split TSV output")->required();
    cmd_split->add_option("--report", split_opts.report, "split report JSON (default stdout)");

    DescribeOpts describe_opts;
    auto* cmd_describe = app.add_subcommand("describe", "Render description templates");
    cmd_describe->add_option("--records", describe_opts.records, "cell record table")
        ->required();
    cmd_describe->add_option("--catalog", describe_opts.catalog,
                             "pathway catalog TSV (id, display name, definition)");
    cmd_describe->add_option("--obo", describe_opts.obo, "OBO file for term definitions");
    cmd_describe->add_option("--out", describe_opts.out,
                             "descriptions JSONL (default stdout)");

    PipelineOpts pipeline_opts;
    auto* cmd_pipeline =
        app.add_subcommand("pipeline", "Cohort to descriptions, activity, and splits");
    cmd_pipeline->add_option("--cohort", pipeline_opts.cohort, "cohort CSV/TSV")
        ->required();
    cmd_pipeline->add_option("--expression", pipeline_opts.expression, "expression matrix")
        ->required();
    cmd_pipeline->add_option("--gene-sets", pipeline_opts.gene_sets, "GMT gene sets")
        ->required();
    cmd_pipeline->add_option("--catalog", pipeline_opts.catalog, "pathway catalog TSV");
    cmd_pipeline->add_option("--obo", pipeline_opts.obo, "OBO file for term definitions");
    cmd_pipeline->add_option("--out-dir", pipeline_opts.out_dir, "output directory")
        ->required();
    cmd_pipeline->add_option("--target-n", pipeline_opts.target_n, "rows to sample")
        ->required();
    cmd_pipeline->add_option("--seed", pipeline_opts.seed, "RNG seed")->required();
    cmd_pipeline->add_option("--ratios", pipeline_opts.ratios,
                             "train val test cell-count ratios")
        ->expected(3);
    cmd_pipeline->add_option("--objective", pipeline_opts.objective, "objective columns");
    cmd_pipeline->add_option("--top-fraction", pipeline_opts.top_fraction,
                             "AUCell ranking window fraction");
    cmd_pipeline->add_option("--hvg", pipeline_opts.hvg,
                             "restrict to N highly variable genes (0 = off)");
    cmd_pipeline->add_option("--prevalence-threshold", pipeline_opts.threshold,
                             "minimum active fraction");
    cmd_pipeline->add_option("--exclude-assays", pipeline_opts.exclusions,
                             "assay exclusion patterns (default Smart-seq family et al.)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion") {
            return app.exit(e);
        }
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    if (cmd_ontology->parsed()) return run_ontology(ontology_opts);
    if (cmd_similarity->parsed()) return run_similarity(similarity_opts);
    if (cmd_evaluate->parsed()) return run_evaluate(evaluate_opts);
    if (cmd_pathways->parsed()) return run_pathways(pathways_opts);
    if (cmd_sample->parsed()) return run_sample(sample_opts);
    if (cmd_split->parsed()) return run_split(split_opts);
    if (cmd_describe->parsed()) return run_describe(describe_opts);
    return run_pipeline(pipeline_opts);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const celldesc::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const celldesc::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const celldesc::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const celldesc::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
