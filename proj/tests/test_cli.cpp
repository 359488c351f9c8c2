#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "celldesc/similarity.hpp"
#include "support/subprocess.hpp"
#include "support/tempdir.hpp"

using nlohmann::json;
using testsupport::RunResult;
using testsupport::run_command;
using testsupport::slurp;
using testsupport::TempDir;

namespace {

const std::string kCli = CELLDESC_CLI_PATH;

const char kMiniObo[] =
    "format-version: 1.2\n"
    "\n"
    "[Term]\n"
    "id: XX:0000001\n"
    "name: cell\n"
    "\n"
    "[Term]\n"
    "id: XX:0000002\n"
    "name: T cell\n"
    "is_a: XX:0000001 ! cell\n";

const char kChainEdges[] = "B\tA\nC\tB\n";

std::string records_tsv() {
    return "cell_id\tcell_type\ttissue\tdisease\tsex\tdevelopment_stage\n"
           "c1\tT cell\tblood\tnormal\tmale\tadult stage\n"
           "c2\tneuron\tbrain\tnormal\tfemale\tchild stage\n";
}

/// 12-cell cohort over 4 donors with everything the pipeline needs.
std::string cohort_tsv() {
    std::ostringstream out;
    out << "cell_id\tcell_type\ttissue\tdisease\tsex\tdevelopment_stage\tdonor_id\tassay\n";
    const char* types[] = {"T cell", "B cell", "neuron"};
    const char* tissues[] = {"blood", "lung"};
    for (int i = 0; i < 12; ++i) {
        out << "c" << i << '\t' << types[i % 3] << '\t' << tissues[i % 2]
            << "\tnormal\t" << (i % 2 == 0 ? "male" : "female") << "\tadult stage\tD"
            << (i % 4) << "\t10x 3' v3\n";
    }
    return out.str();
}

std::string expression_csv() {
    std::ostringstream out;
    out << "cell_id,g1,g2,g3,g4,g5,g6\n";
    for (int i = 0; i < 12; ++i) {
        out << "c" << i;
        for (int g = 0; g < 6; ++g) out << ',' << ((i * 7 + g * 3) % 11);
        out << '\n';
    }
    return out.str();
}

const char kGmt[] =
    "SET_ALPHA\tGenes of the alpha module.\tg1\tg2\tg3\n"
    "SET_BETA\tGenes of the beta module.\tg4\tg5\tg6\n";

json parse_json_file(const std::string& path) { return json::parse(slurp(path)); }

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("version and help exit zero") {
    const RunResult version = run_command({kCli, "--version"});
    CHECK(version.exit_code == 0);
    CHECK(version.out.find("celldesc") != std::string::npos);

    const RunResult help = run_command({kCli, "--help"});
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("similarity") != std::string::npos);
    CHECK(help.out.find("pipeline") != std::string::npos);
}

TEST_CASE("usage problems exit one") {
    SUBCASE("no subcommand") {
        const RunResult r = run_command({kCli});
        CHECK(r.exit_code == 1);
    }
    SUBCASE("unknown flag") {
        const RunResult r = run_command({kCli, "ontology", "--frobnicate"});
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("usage error") != std::string::npos);
    }
    SUBCASE("bad task name") {
        const RunResult r = run_command({kCli, "evaluate", "--task", "nonsense"});
        CHECK(r.exit_code == 1);
    }
    SUBCASE("ps task without a matrix") {
        TempDir tmp;
        const auto pairs = tmp.file("pairs.csv", "cell_id,predicted,reference\nc1,A,A\n");
        const RunResult r =
            run_command({kCli, "evaluate", "--task", "ps", "--pairs", pairs});
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("--matrix") != std::string::npos);
    }
    SUBCASE("malformed embeddings spec") {
        TempDir tmp;
        const auto refs =
            tmp.file("refs.jsonl", "{\"cell_id\": \"c1\", \"text\": \"a b c d e\"}\n");
        const RunResult r = run_command({kCli, "evaluate", "--task", "generation",
                                         "--predictions", refs, "--references", refs,
                                         "--embeddings", "noequals"});
        CHECK(r.exit_code == 1);
    }
}

TEST_CASE("missing input files exit two") {
    TempDir tmp;
    const RunResult r = run_command({kCli, "ontology", "--obo", tmp.join("absent.obo"),
                                     "--out-edges", tmp.join("edges.tsv")});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("i/o error") != std::string::npos);
}

TEST_CASE("unparseable input exits three") {
    TempDir tmp;
    const auto obo = tmp.file("broken.obo", "[Term]\nname: orphan\n");
    const RunResult r = run_command(
        {kCli, "ontology", "--obo", obo, "--out-edges", tmp.join("edges.tsv")});
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("parse error") != std::string::npos);
}

TEST_CASE("semantic problems exit four") {
    TempDir tmp;
    SUBCASE("duplicate ontology term") {
        const auto obo = tmp.file("dup.obo",
                                  "[Term]\nid: XX:0000001\nname: cell\n\n"
                                  "[Term]\nid: XX:0000001\nname: cell again\n");
        const RunResult r = run_command(
            {kCli, "ontology", "--obo", obo, "--out-edges", tmp.join("edges.tsv")});
        CHECK(r.exit_code == 4);
        CHECK(r.err.find("validation error") != std::string::npos);
    }
    SUBCASE("sample target larger than the table") {
        const auto cohort = tmp.file("cohort.tsv", cohort_tsv());
        const RunResult r = run_command({kCli, "sample", "--table", cohort, "--target-n",
                                         "500", "--seed", "1", "--out",
                                         tmp.join("sampled.tsv")});
        CHECK(r.exit_code == 4);
    }
    SUBCASE("split ratios not summing to one") {
        const auto cohort = tmp.file("cohort.tsv", cohort_tsv());
        const RunResult r =
            run_command({kCli, "split", "--table", cohort, "--seed", "1", "--ratios", "0.5",
                         "0.2", "0.2", "--out", tmp.join("split.tsv")});
        CHECK(r.exit_code == 4);
    }
}

TEST_CASE("ontology subcommand exports edges, terms, and a summary") {
    TempDir tmp;
    const auto obo = tmp.file("mini.obo", kMiniObo);
    const auto edges = tmp.join("edges.tsv");
    const auto terms = tmp.join("terms.tsv");
    const auto summary = tmp.join("summary.json");
    const RunResult r = run_command({kCli, "ontology", "--obo", obo, "--out-edges", edges,
                                     "--out-terms", terms, "--summary", summary});
    REQUIRE(r.exit_code == 0);

    CHECK(slurp(edges) == "XX:0000002\tXX:0000001\n");
    CHECK(slurp(terms).find("id\tname\tobsolete\tdefinition\n") == 0);
    CHECK(slurp(terms).find("XX:0000002\tT cell\tfalse\t") != std::string::npos);

    const json doc = parse_json_file(summary);
    CHECK(doc["terms"] == 2);
    CHECK(doc["graph_nodes"] == 2);
    CHECK(doc["edges"] == 1);
    CHECK(doc["warning_count"] == 0);
    CHECK(doc["warnings"].empty());
}

TEST_CASE("similarity subcommand writes a loadable matrix deterministically") {
    TempDir tmp;
    const auto graph = tmp.file("edges.tsv", kChainEdges);
    const auto m1 = tmp.join("m1.pprs");
    const auto m2 = tmp.join("m2.pprs");
    const auto stats = tmp.join("stats.json");

    const RunResult r1 = run_command(
        {kCli, "similarity", "--graph", graph, "--out", m1, "--stats", stats});
    REQUIRE(r1.exit_code == 0);
    const RunResult r2 = run_command({kCli, "similarity", "--graph", graph, "--out", m2});
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(m1) == slurp(m2));

    const celldesc::SimilarityMatrix matrix = celldesc::SimilarityMatrix::load_file(m1);
    REQUIRE(matrix.size() == 3);
    CHECK(matrix.terms() == std::vector<std::string>{"A", "B", "C"});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(matrix.at(i, i) == 1.0);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(matrix.at(i, j) >= 0.0);
            CHECK(matrix.at(i, j) <= 1.0);
        }
    }

    const json doc = parse_json_file(stats);
    CHECK(doc.contains("mean"));
    CHECK(doc.contains("percentile_95"));
    CHECK(doc["count"] == 6);
}

TEST_CASE("config files supply option defaults") {
    TempDir tmp;
    const auto graph = tmp.file("edges.tsv", kChainEdges);
    const auto direct = tmp.join("direct.pprs");
    REQUIRE(run_command({kCli, "similarity", "--graph", graph, "--out", direct, "--damping",
                         "0.5"})
                .exit_code == 0);
    const auto defaults = tmp.join("defaults.pprs");
    REQUIRE(run_command({kCli, "similarity", "--graph", graph, "--out", defaults})
                .exit_code == 0);
    REQUIRE(slurp(direct) != slurp(defaults)); // damping must matter for the comparison

    SUBCASE("toml") {
        const auto config = tmp.file("config.toml", "[similarity]\ndamping = 0.5\n");
        const auto out = tmp.join("toml.pprs");
        const RunResult r = run_command(
            {kCli, "--config", config, "similarity", "--graph", graph, "--out", out});
        REQUIRE(r.exit_code == 0);
        CHECK(slurp(out) == slurp(direct));
    }
    SUBCASE("json") {
        const auto config = tmp.file("config.json", "{\"similarity\": {\"damping\": 0.5}}\n");
        const auto out = tmp.join("json.pprs");
        const RunResult r = run_command(
            {kCli, "--config", config, "similarity", "--graph", graph, "--out", out});
        REQUIRE(r.exit_code == 0);
        CHECK(slurp(out) == slurp(direct));
    }
    SUBCASE("command line overrides the config") {
        const auto config = tmp.file("config.toml", "[similarity]\ndamping = 0.3\n");
        const auto out = tmp.join("override.pprs");
        const RunResult r = run_command({kCli, "--config", config, "similarity", "--graph",
                                         graph, "--out", out, "--damping", "0.5"});
        REQUIRE(r.exit_code == 0);
        CHECK(slurp(out) == slurp(direct));
    }
}

TEST_CASE("evaluate generation scores identical texts at one hundred") {
    TempDir tmp;
    const std::string jsonl =
        "{\"cell_id\": \"c1\", \"text\": \"This sample consists of a T cell.\"}\n"
        "{\"cell_id\": \"c2\", \"text\": \"This sample consists of a neuron.\"}\n";
    const auto preds = tmp.file("preds.jsonl", jsonl);
    const auto refs = tmp.file("refs.jsonl", jsonl);
    const std::string embed =
        "{\"cell_id\": \"c1\", \"pred_vectors\": [[1, 0], [0, 1]],"
        " \"ref_vectors\": [[1, 0], [0, 1]]}\n";
    const auto rbt = tmp.file("rbt.jsonl", embed);
    const auto bbt = tmp.file("bbt.jsonl", embed);
    const auto report = tmp.join("report.json");

    const RunResult r = run_command({kCli, "evaluate", "--task", "generation",
                                     "--predictions", preds, "--references", refs,
                                     "--embeddings", "RBT=" + rbt, "--embeddings",
                                     "BBT=" + bbt, "--out", report});
    REQUIRE(r.exit_code == 0);

    const json doc = parse_json_file(report);
    CHECK(doc["task"] == "generation");
    CHECK(doc["pairs"] == 2);
    for (const char* key : {"Exct", "B-2", "B-4", "R-1", "R-2", "R-L", "RBT-f1", "BBT-f1"}) {
        INFO("key ", key);
        CHECK(doc.at(key).get<double>() == doctest::Approx(100.0));
    }
    CHECK(doc["embedding_details"]["RBT"]["precision"].get<double>() ==
          doctest::Approx(100.0));
    CHECK(!doc.contains("warnings"));
}

TEST_CASE("evaluate generation scores a missing prediction as empty") {
    TempDir tmp;
    const auto refs = tmp.file(
        "refs.jsonl",
        "{\"cell_id\": \"c1\", \"text\": \"one two three\"}\n"
        "{\"cell_id\": \"c2\", \"text\": \"four five six\"}\n");
    const auto preds =
        tmp.file("preds.jsonl", "{\"cell_id\": \"c1\", \"text\": \"one two three\"}\n");
    const auto report = tmp.join("report.json");
    const RunResult r =
        run_command({kCli, "evaluate", "--task", "generation", "--predictions", preds,
                     "--references", refs, "--out", report});
    REQUIRE(r.exit_code == 0);
    const json doc = parse_json_file(report);
    CHECK(doc["Exct"].get<double>() == doctest::Approx(50.0));
    REQUIRE(doc.contains("warnings"));
    bool mentions_c2 = false;
    for (const auto& w : doc["warnings"]) {
        if (w.get<std::string>().find("c2") != std::string::npos) mentions_c2 = true;
    }
    CHECK(mentions_c2);
}

TEST_CASE("evaluate generation rejects a prediction for an unknown cell") {
    TempDir tmp;
    const auto refs =
        tmp.file("refs.jsonl", "{\"cell_id\": \"c1\", \"text\": \"one two\"}\n");
    const auto preds =
        tmp.file("preds.jsonl",
                 "{\"cell_id\": \"c1\", \"text\": \"one two\"}\n"
                 "{\"cell_id\": \"ghost\", \"text\": \"three\"}\n");
    const RunResult r = run_command({kCli, "evaluate", "--task", "generation",
                                     "--predictions", preds, "--references", refs});
    CHECK(r.exit_code == 4);
}

TEST_CASE("evaluate classify reports accuracy and weighted f1") {
    TempDir tmp;
    const auto pairs = tmp.file("pairs.csv",
                                "cell_id,predicted,reference\n"
                                "c1,A,A\n"
                                "c2,B,A\n"
                                "c3,B,B\n"
                                "c4,B,B\n");
    const auto report = tmp.join("report.json");
    const RunResult r = run_command(
        {kCli, "evaluate", "--task", "classify", "--pairs", pairs, "--out", report});
    REQUIRE(r.exit_code == 0);
    const json doc = parse_json_file(report);
    CHECK(doc["task"] == "classify");
    CHECK(doc["accuracy"].get<double>() == doctest::Approx(75.0));
    CHECK(doc["f1-score"].get<double>() == doctest::Approx(100.0 * 11.0 / 15.0));
    CHECK(doc["pairs"] == 4);
    CHECK(doc["per_class"]["A"]["support"] == 2);
}

TEST_CASE("evaluate pathways reports set metrics") {
    TempDir tmp;
    const auto pairs = tmp.file("pairs.csv",
                                "cell_id,predicted,reference\n"
                                "c1,P1; P2,P1; P2\n"
                                "c2,P1,P1; P2\n");
    const auto report = tmp.join("report.json");
    const RunResult r = run_command(
        {kCli, "evaluate", "--task", "pathways", "--pairs", pairs, "--out", report});
    REQUIRE(r.exit_code == 0);
    const json doc = parse_json_file(report);
    CHECK(doc["task"] == "pathways");
    CHECK(doc["Acc"].get<double>() == doctest::Approx(50.0));
    CHECK(doc["Jac"].get<double>() == doctest::Approx(75.0));
    CHECK(doc["pairs"] == 2);
}

TEST_CASE("evaluate ps scores exact matches against a matrix") {
    TempDir tmp;
    const auto graph = tmp.file("edges.tsv", "CL:0000002\tCL:0000001\n");
    const auto matrix = tmp.join("matrix.pprs");
    REQUIRE(run_command({kCli, "similarity", "--graph", graph, "--out", matrix}).exit_code ==
            0);
    const auto pairs = tmp.file("pairs.csv",
                                "cell_id,predicted,reference\n"
                                "c1,CL:0000001,CL:0000001\n");
    const auto report = tmp.join("report.json");
    const RunResult r = run_command({kCli, "evaluate", "--task", "ps", "--pairs", pairs,
                                     "--matrix", matrix, "--out", report});
    REQUIRE(r.exit_code == 0);
    const json doc = parse_json_file(report);
    CHECK(doc["task"] == "ps");
    CHECK(doc["PS"].get<double>() == doctest::Approx(100.0));
    CHECK(doc["scored_pairs"] == 1);
    CHECK(doc["unresolved_predictions"] == 0);
    CHECK(doc["drop_unresolved"] == false);
}

TEST_CASE("describe renders records and round trips through evaluate") {
    TempDir tmp;
    const auto records = tmp.file("records.tsv", records_tsv());
    const auto out = tmp.join("descriptions.jsonl");
    const RunResult r = run_command({kCli, "describe", "--records", records, "--out", out});
    REQUIRE(r.exit_code == 0);

    std::istringstream lines(slurp(out));
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        const json obj = json::parse(line);
        CHECK(obj["text"].get<std::string>().rfind("This sample consists of a ", 0) == 0);
        ++count;
    }
    CHECK(count == 2);

    const auto report = tmp.join("report.json");
    const RunResult self = run_command({kCli, "evaluate", "--task", "generation",
                                        "--predictions", out, "--references", out, "--out",
                                        report});
    REQUIRE(self.exit_code == 0);
    const json doc = parse_json_file(report);
    CHECK(doc["Exct"].get<double>() == doctest::Approx(100.0));
}

TEST_CASE("pathways subcommand writes activity, top lists, and prevalence") {
    TempDir tmp;
    const auto expr = tmp.file("expr.csv", expression_csv());
    const auto gmt = tmp.file("sets.gmt", kGmt);
    const auto activity = tmp.join("activity.csv");
    const auto top = tmp.join("top.tsv");
    const auto prevalence = tmp.join("prevalence.json");
    const RunResult r = run_command({kCli, "pathways", "--expression", expr, "--gene-sets",
                                     gmt, "--out", activity, "--top-fraction", "0.5",
                                     "--top-out", top, "--prevalence-out", prevalence});
    REQUIRE(r.exit_code == 0);

    const std::string csv = slurp(activity);
    CHECK(csv.rfind("cell_id,SET_ALPHA,SET_BETA\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13); // header + 12 cells

    const std::string top_text = slurp(top);
    CHECK(top_text.rfind("cell_id\tpathway_1\tscore_1\tpathway_2\tscore_2\n", 0) == 0);

    const json doc = parse_json_file(prevalence);
    CHECK(doc["threshold"].get<double>() == doctest::Approx(0.005));
    CHECK(doc["retained"].size() == 2); // both sets appear in every top-2 list
    CHECK(doc["prevalence"]["SET_ALPHA"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("sample subcommand is deterministic per seed") {
    TempDir tmp;
    const auto cohort = tmp.file("cohort.tsv", cohort_tsv());
    const auto out1 = tmp.join("s1.tsv");
    const auto out2 = tmp.join("s2.tsv");
    const auto rep1 = tmp.join("r1.json");
    const auto rep2 = tmp.join("r2.json");
    for (const auto& [out, rep] : {std::pair{out1, rep1}, std::pair{out2, rep2}}) {
        const RunResult r = run_command({kCli, "sample", "--table", cohort, "--target-n",
                                         "8", "--seed", "11", "--out", out, "--report", rep});
        REQUIRE(r.exit_code == 0);
    }
    CHECK(slurp(out1) == slurp(out2));
    CHECK(slurp(rep1) == slurp(rep2));

    const json doc = parse_json_file(rep1);
    CHECK(doc["seed"] == 11);
    CHECK(doc["target_n"] == 8);
    CHECK(doc["objective_columns"].size() == 3);
    CHECK(doc["diversity_after"].contains("cell_type"));
    const std::string sampled = slurp(out1);
    CHECK(std::count(sampled.begin(), sampled.end(), '\n') == 9); // header + 8 rows
}

TEST_CASE("sample resolves the cell type column alias") {
    TempDir tmp;
    std::string text = cohort_tsv();
    text.replace(text.find("cell_type"), 9, "cell_type_name");
    const auto cohort = tmp.file("cohort.tsv", text);
    const auto rep = tmp.join("report.json");
    const RunResult r =
        run_command({kCli, "sample", "--table", cohort, "--target-n", "6", "--seed", "2",
                     "--objective", "cell_type", "--out", tmp.join("out.tsv"), "--report",
                     rep});
    REQUIRE(r.exit_code == 0);
    const json doc = parse_json_file(rep);
    REQUIRE(doc["objective_columns"].size() == 1);
    CHECK(doc["objective_columns"][0] == "cell_type_name");
    CHECK(doc["diversity_before"].contains("cell_type_name"));
}

TEST_CASE("split subcommand assigns every donor exactly once") {
    TempDir tmp;
    const auto cohort = tmp.file("cohort.tsv", cohort_tsv());
    const auto out1 = tmp.join("split1.tsv");
    const auto out2 = tmp.join("split2.tsv");
    const auto report = tmp.join("report.json");
    REQUIRE(run_command({kCli, "split", "--table", cohort, "--seed", "3", "--out", out1,
                         "--report", report})
                .exit_code == 0);
    REQUIRE(run_command({kCli, "split", "--table", cohort, "--seed", "3", "--out", out2})
                .exit_code == 0);
    CHECK(slurp(out1) == slurp(out2));

    const std::string tsv = slurp(out1);
    CHECK(tsv.rfind("donor_id\tsplit\n", 0) == 0);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 5); // header + 4 donors

    const json doc = parse_json_file(report);
    CHECK(doc["seed"] == 3);
    const auto donors = doc["donors"]["train"].get<int>() + doc["donors"]["val"].get<int>() +
                        doc["donors"]["test"].get<int>();
    CHECK(donors == 4);
    const auto cells = doc["cells"]["train"].get<int>() + doc["cells"]["val"].get<int>() +
                       doc["cells"]["test"].get<int>();
    CHECK(cells == 12);
}

TEST_CASE("pipeline produces a reproducible output bundle") {
    TempDir tmp;
    const auto cohort = tmp.file("cohort.tsv", cohort_tsv());
    const auto expr = tmp.file("expr.csv", expression_csv());
    const auto gmt = tmp.file("sets.gmt", kGmt);

    const std::vector<std::string> names = {"sampled.tsv", "activity.csv",
                                            "descriptions.jsonl", "split.tsv",
                                            "manifest.json"};
    const auto dir1 = tmp.join("run1");
    const auto dir2 = tmp.join("run2");
    for (const auto& dir : {dir1, dir2}) {
        const RunResult r = run_command({kCli, "pipeline", "--cohort", cohort,
                                         "--expression", expr, "--gene-sets", gmt,
                                         "--out-dir", dir, "--target-n", "8", "--seed", "5",
                                         "--ratios", "0.5", "0.25", "0.25"});
        REQUIRE(r.exit_code == 0);
        for (const auto& name : names) {
            CHECK(std::filesystem::exists(std::filesystem::path(dir) / name));
        }
    }
    for (const auto& name : names) {
        INFO("file ", name);
        CHECK(slurp((std::filesystem::path(dir1) / name).string()) ==
              slurp((std::filesystem::path(dir2) / name).string()));
    }

    const json manifest = parse_json_file((std::filesystem::path(dir1) / "manifest.json").string());
    CHECK(manifest["tool"] == "celldesc");
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["counts"]["input_rows"] == 12);
    CHECK(manifest["counts"]["removed_by_assay"] == 0);
    CHECK(manifest["counts"]["sampled"] == 8);
    CHECK(manifest["counts"]["descriptions"] == 8);
    CHECK(manifest["counts"]["gene_sets"] == 2);
    CHECK(manifest["retained_pathways"].size() == 2);
    CHECK(manifest["parameters"]["target_n"] == 8);
    const double achieved = manifest["achieved_ratios"]["train"].get<double>() +
                            manifest["achieved_ratios"]["val"].get<double>() +
                            manifest["achieved_ratios"]["test"].get<double>();
    CHECK(achieved == doctest::Approx(1.0));

    // Every description line is a JSON object with the template opener.
    std::istringstream lines(slurp((std::filesystem::path(dir1) / "descriptions.jsonl").string()));
    std::string line;
    std::size_t described = 0;
    while (std::getline(lines, line)) {
        const json obj = json::parse(line);
        CHECK(obj["text"].get<std::string>().rfind("This sample consists of a ", 0) == 0);
        ++described;
    }
    CHECK(described == 8);
}

TEST_CASE("pipeline removes partial outputs when a stage fails") {
    TempDir tmp;
    const auto cohort = tmp.file("cohort.tsv", cohort_tsv());
    const auto expr = tmp.file("expr.csv", expression_csv());
    const auto gmt = tmp.file("sets.gmt", kGmt);
    const auto dir = tmp.join("broken");
    const RunResult r = run_command({kCli, "pipeline", "--cohort", cohort, "--expression",
                                     expr, "--gene-sets", gmt, "--out-dir", dir,
                                     "--target-n", "500", "--seed", "5"});
    CHECK(r.exit_code == 4);
    for (const char* name : {"sampled.tsv", "activity.csv", "descriptions.jsonl",
                             "split.tsv", "manifest.json"}) {
        CHECK(!std::filesystem::exists(std::filesystem::path(dir) / name));
    }
}

TEST_SUITE_END();
