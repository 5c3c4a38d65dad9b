#include <catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "germkg/kg.hpp"
#include "germkg/store.hpp"

using namespace germkg;

namespace {

NormalizedEntity entity(const std::string& pid, std::size_t sentence, Kind kind, std::vector<std::string> masters) {
    EntityMention m{"x", kind, pid, sentence, 0, {0, 0}};
    return {std::move(masters), kind, MatchMethod::exact, 1.0, m};
}

} // namespace

TEST_CASE("build_triples for an article star") {
    std::vector<NormalizedEntity> es{entity("9024708", 0, Kind::gene, {"BRCA1"}),
                                     entity("9024708", 0, Kind::disease, {"Breast (Malignant)"})};
    auto ts = kg::build_triples("9024708", es);
    REQUIRE(ts.size() == 2);
    CHECK(ts[0].relation == Relation::diseases_in);
    CHECK(ts[1].relation == Relation::genes_in);
    CHECK(kg::build_triples("1", std::vector<NormalizedEntity>{}).empty());
}

TEST_CASE("repeated mentions collapse with merged provenance") {
    std::vector<NormalizedEntity> es{entity("1", 0, Kind::gene, {"BRCA1"}), entity("1", 2, Kind::gene, {"BRCA1"}),
                                     entity("1", 5, Kind::gene, {"BRCA1", "BRCA2"})};
    auto ts = kg::build_triples("1", es);
    REQUIRE(ts.size() == 2);
    CHECK(ts[0].entity == "BRCA1");
    CHECK(ts[0].sentences == std::set<std::size_t>{0, 2, 5});
    CHECK(ts[1].sentences == std::set<std::size_t>{5});
}

TEST_CASE("build_triples rejects entities of another article") {
    std::vector<NormalizedEntity> es{entity("2", 0, Kind::gene, {"BRCA1"})};
    CHECK_THROWS_AS(kg::build_triples("1", es), ValidationError);
}

TEST_CASE("assemble_graph shares entity nodes") {
    std::vector<Triple> ts{{"1", Relation::genes_in, "BRCA1", {0}}, {"2", Relation::genes_in, "BRCA1", {1}}};
    auto g = kg::assemble_graph(ts);
    auto s = kg::stats(g);
    CHECK(s.genes == 1);
    CHECK(s.pubmed_ids == 2);
    CHECK(s.triples == 2);
    CHECK(s.entities == 3);
}

TEST_CASE("assemble_graph merges duplicate triples") {
    std::vector<Triple> ts{{"1", Relation::genes_in, "BRCA1", {0}}, {"1", Relation::genes_in, "BRCA1", {3}}};
    auto g = kg::assemble_graph(ts);
    REQUIRE(g.triples().size() == 1);
    CHECK(g.triples()[0].sentences == std::set<std::size_t>{0, 3});
}

TEST_CASE("empty graph statistics") {
    auto s = kg::stats(KnowledgeGraph{});
    CHECK(s.triples == 0);
    CHECK(s.entities == 0);
    CHECK(s.pubmed_ids + s.genes + s.diseases == 0);
}

TEST_CASE("node ids and validation") {
    KnowledgeGraph g;
    auto d = g.add_node(NodeLabel::disease, "Teeth (Benign)");
    CHECK(g.node(d).id == "disease:teethbenign");
    CHECK(g.add_node(NodeLabel::disease, "Teeth (Benign)") == d);
    CHECK(g.node(g.add_node(NodeLabel::pubmed_id, "9024708")).id == "pmid:9024708");
    CHECK_THROWS_AS(g.add_node(NodeLabel::pubmed_id, "PMC1"), ValidationError);
    CHECK_THROWS_AS(g.add_node(NodeLabel::gene, "--"), ValidationError);
    CHECK_THROWS_AS(g.add_node(NodeLabel::disease, "teeth benign"), ValidationError); // id clash
    CHECK(g.find(NodeLabel::disease, "Teeth (Benign)") == d);
    CHECK(g.find_id("disease:teethbenign") == d);
}

TEST_CASE("relation order and names") {
    CHECK(Relation::diseases_in < Relation::genes_in);
    CHECK(parse_relation("GENES_IN") == Relation::genes_in);
    CHECK_THROWS_AS(parse_relation("LINKS"), ValidationError);
    CHECK(tail_label(Relation::diseases_in) == NodeLabel::disease);
}

TEST_CASE("golden graph counts") {
    auto r = fixture::build_golden();
    auto s = kg::stats(r.graph);
    CHECK(s.entities == s.pubmed_ids + s.genes + s.diseases);
    CHECK(s.triples == 54);
    CHECK(s.entities == 41);
}

TEST_CASE("triple count equals distinct (article, kind, master) combinations") {
    auto r = fixture::build_golden();
    std::set<std::tuple<std::string, Kind, std::string>> combos;
    for (const auto& n : r.normalized)
        for (const auto& m : n.masters) combos.insert({n.source.pubmed_id, n.kind, m});
    CHECK(combos.size() == r.graph.triples().size());
}

TEST_CASE("save and load round trip") {
    fixture::TempDir tmp;
    auto g = fixture::build_golden().graph;
    store::save(g, tmp / "g.json");
    auto back = store::load(tmp / "g.json");
    CHECK(kg::equivalent(g, back));
    CHECK(store::serialize(back) == store::serialize(g));

    store::save(KnowledgeGraph{}, tmp / "empty.json");
    CHECK(store::load(tmp / "empty.json").empty());
}

TEST_CASE("load rejects damaged documents") {
    fixture::TempDir tmp;
    auto text = store::serialize(fixture::build_golden().graph);
    tmp.write("trunc.json", text.substr(0, text.size() / 2));
    CHECK_THROWS_WITH(store::load(tmp / "trunc.json"), Catch::Matchers::ContainsSubstring("truncated"));

    auto v2 = text;
    v2.replace(v2.find("\"version\": 1"), 12, "\"version\": 2");
    tmp.write("v2.json", v2);
    CHECK_THROWS_WITH(store::load(tmp / "v2.json"), Catch::Matchers::ContainsSubstring("unsupported graph version 2"));

    CHECK_THROWS_AS(store::deserialize("{\"format\":\"other\"}"), ValidationError);
    CHECK_THROWS_AS(store::deserialize(
                        R"({"format":"germkg-graph","version":1,"nodes":[],"triples":[{"head":"pmid:1","relation":"GENES_IN","tail":"gene:x","sentences":[]}]})"),
                    ValidationError);
    CHECK_THROWS_AS(store::load(tmp / "missing.json"), IoError);
}
