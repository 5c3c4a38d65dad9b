#ifndef GERMKG_TEST_FIXTURES_HPP
#define GERMKG_TEST_FIXTURES_HPP

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "germkg/lexnorm.hpp"
#include "germkg/pipeline.hpp"
#include "germkg/text.hpp"

namespace fixture {

namespace fs = std::filesystem;

inline fs::path dir() { return fs::path(GERMKG_FIXTURE_DIR); }
inline fs::path golden(const std::string& name) { return dir() / "golden" / name; }

inline germkg::Lexicon golden_genes() { return germkg::load_lexicon(golden("genes.csv"), germkg::Kind::gene); }
inline germkg::Lexicon golden_diseases() {
    return germkg::load_lexicon(golden("diseases.csv"), germkg::Kind::disease);
}

/// Runs the whole pipeline over the golden corpus with gazetteer tagging.
inline germkg::BuildResult build_golden() {
    auto genes = golden_genes();
    auto diseases = golden_diseases();
    germkg::pipeline::Inputs in;
    in.corpus = germkg::ingest::load_corpus(golden("corpus.jsonl"), germkg::CorpusFormat::jsonl);
    in.genes = &genes;
    in.diseases = &diseases;
    return germkg::pipeline::run(std::move(in));
}

struct ExpectedTriple {
    std::string head, relation, tail, sentences;
    bool operator==(const ExpectedTriple&) const = default;
};

/// Rows of expected_triples.tsv, comment lines skipped.
inline std::vector<ExpectedTriple> expected_triples() {
    std::vector<ExpectedTriple> out;
    const auto content = germkg::fs_util::read_file(golden("expected_triples.tsv"));
    for (auto line : germkg::fs_util::split_lines(content)) {
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cols;
        std::string cur;
        for (char c : line) {
            if (c == '\t') {
                cols.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cols.push_back(cur);
        if (cols.size() == 4) out.push_back({cols[0], cols[1], cols[2], cols[3]});
    }
    return out;
}

inline std::vector<ExpectedTriple> listing(const germkg::KnowledgeGraph& g) {
    std::vector<ExpectedTriple> out;
    for (const auto& t : germkg::kg::sorted_triples(g)) {
        std::string s;
        for (auto i : t.sentences) s += (s.empty() ? "" : ";") + std::to_string(i);
        out.push_back({t.pubmed_id, std::string(germkg::to_string(t.relation)), t.entity, s});
    }
    return out;
}

inline germkg::BuildReport expected_report() {
    return germkg::BuildReport::from_json(nlohmann::json::parse(germkg::fs_util::read_file(golden("expected_report.json"))));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("germkg-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

    fs::path write(const std::string& name, const std::string& content) const {
        germkg::fs_util::write_file_atomic(path_ / name, content);
        return path_ / name;
    }

private:
    fs::path path_;
};

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    return out + "'";
}

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs a command line through the shell, capturing stdout and stderr.
inline CommandResult run(const std::vector<std::string>& argv, const TempDir& scratch) {
    std::string cmd;
    for (const auto& a : argv) cmd += shell_quote(a) + ' ';
    auto out_path = scratch / "cmd.stdout";
    auto err_path = scratch / "cmd.stderr";
    cmd += ">" + shell_quote(out_path.string()) + " 2>" + shell_quote(err_path.string());
    int status = std::system(cmd.c_str());
    CommandResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = germkg::fs_util::read_file(out_path);
    r.err = germkg::fs_util::read_file(err_path);
    return r;
}

} // namespace fixture

#endif
