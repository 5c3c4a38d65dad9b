#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "germkg/pipeline.hpp"

using namespace germkg;

TEST_CASE("golden corpus matches the hand-computed report and triples") {
    auto r = fixture::build_golden();
    CHECK(r.report == fixture::expected_report());
    CHECK(fixture::listing(r.graph) == fixture::expected_triples());
}

TEST_CASE("golden build is deterministic") {
    auto a = fixture::build_golden();
    auto b = fixture::build_golden();
    CHECK(store::serialize(a.graph) == store::serialize(b.graph));
    CHECK(a.report == b.report);
    CHECK(pipeline::mentions_jsonl(a.mentions) == pipeline::mentions_jsonl(b.mentions));
}

TEST_CASE("annotation mode exercises split, approximate and drop") {
    auto genes = fixture::golden_genes();
    auto diseases = fixture::golden_diseases();
    pipeline::Inputs in;
    in.corpus = ingest::load_corpus(fixture::dir() / "annotated" / "corpus.jsonl", CorpusFormat::jsonl);
    in.genes = &genes;
    in.diseases = &diseases;
    in.annotations = ner::load_annotations(fixture::dir() / "annotated" / "annotations.jsonl");
    auto r = pipeline::run(std::move(in));
    CHECK(r.report.abstracts == 2);
    CHECK(r.report.sentences == 4);
    CHECK(r.report.gene_mentions == 3);
    CHECK(r.report.disease_mentions == 2);
    CHECK(r.report.normalized_exact == 1);
    CHECK(r.report.normalized_split == 1);
    CHECK(r.report.normalized_approximate == 1);
    CHECK(r.report.dropped_entities == 2);
    CHECK(r.report.triples == 4);
    CHECK(r.report.nodes == 5);
    std::vector<fixture::ExpectedTriple> want{{"2000001", "DISEASES_IN", "Stomach (Malignant)", "1"},
                                              {"2000001", "GENES_IN", "BRCA1", "0"},
                                              {"2000001", "GENES_IN", "BRCA2", "0"},
                                              {"2000001", "GENES_IN", "CDH1", "1"}};
    CHECK(fixture::listing(r.graph) == want);
    CHECK(pipeline::drop_log_tsv(r.dropped) ==
          "pubmed_id\tsentence_index\tkind\tsurface\n2000002\t0\tgene\tXYZ9\n2000002\t0\tdisease\tglioblastoma\n");
}

TEST_CASE("the entity count mirrors the label counts on every build") {
    auto r = fixture::build_golden();
    CHECK(r.report.nodes == r.report.pubmed_ids + r.report.genes + r.report.diseases);
    CHECK(r.report.normalized_entities + r.report.dropped_entities ==
          r.report.gene_mentions + r.report.disease_mentions);
}

TEST_CASE("stage errors carry the stage name") {
    auto genes = fixture::golden_genes();
    auto diseases = fixture::golden_diseases();
    pipeline::Inputs in;
    in.genes = &genes;
    in.diseases = &diseases;
    CHECK_THROWS_WITH(pipeline::run(in), Catch::Matchers::StartsWith("[ingest]"));

    in.corpus = {{"1", "BRCA1 text."}};
    in.annotations = ner::parse_annotations(R"({"pubmed_id":"1","sentence_index":3,"tokens":[],"labels":[]})");
    CHECK_THROWS_WITH(pipeline::run(in), Catch::Matchers::StartsWith("[ner]"));
}

TEST_CASE("config validation") {
    PipelineConfig cfg;
    cfg.corpus = "c.jsonl";
    cfg.genes = "g.csv";
    cfg.diseases = "d.csv";
    cfg.out = "o.json";
    CHECK_THROWS_AS(cfg.validate(), ValidationError); // no NER source
    cfg.gazetteer = true;
    CHECK_NOTHROW(cfg.validate());
    cfg.annotations = "a.jsonl";
    CHECK_THROWS_AS(cfg.validate(), ValidationError); // both sources
    cfg.annotations.reset();
    cfg.threshold = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.threshold = 0.85;
    cfg.max_segment_chars = 16;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("write_outputs writes every requested artifact") {
    fixture::TempDir tmp;
    PipelineConfig cfg;
    cfg.corpus = fixture::golden("corpus.jsonl");
    cfg.genes = fixture::golden("genes.csv");
    cfg.diseases = fixture::golden("diseases.csv");
    cfg.gazetteer = true;
    cfg.out = tmp / "graph.json";
    cfg.report = tmp / "report.json";
    cfg.drop_log = tmp / "drops.tsv";
    cfg.dump_dir = tmp / "dumps";
    auto r = pipeline::run(cfg);
    pipeline::write_outputs(r, cfg);
    CHECK(store::load(tmp / "graph.json").triples().size() == 54);
    CHECK(BuildReport::from_json(nlohmann::json::parse(fs_util::read_file(tmp / "report.json"))) == r.report);
    CHECK(fs_util::read_file(tmp / "drops.tsv") == "pubmed_id\tsentence_index\tkind\tsurface\n");
    std::size_t dumps = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(tmp / "dumps")) ++dumps;
    CHECK(dumps >= 3);
}
