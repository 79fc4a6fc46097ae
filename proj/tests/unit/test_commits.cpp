#include <doctest.h>

#include "curator/bm25.hpp"
#include "curator/commits.hpp"
#include "curator/errors.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace curator;
using namespace curator::commits;

namespace {

CommitRecord sample_record() {
    CommitRecord r;
    r.id = "c1";
    r.repo.repo_id = "octo/widget";
    r.repo.stars = 500;
    r.repo.forks = 40;
    r.repo.commit_count = 900;
    r.repo.active_days = 300;
    r.repo.readme = "# widget\nA widget.\n";
    r.files = {{"src/parser.py", "def parse(tokens): return tokens"},
               {"src/lexer.py", "def lex(text): return text.split()"},
               {"docs/guide.md", "how to use the widget parser"},
               {"setup.py", "setup(name='widget')"}};
    r.message = "Fix parser crash on empty tokens";
    r.patch = "--- a/src/parser.py\n+++ b/src/parser.py\n@@ -1 +1 @@\n-x\n+y\n"
              "--- /dev/null\n+++ b/src/empty.py\n@@ -0,0 +1 @@\n+pass\n";
    r.modified_paths = {"src/parser.py", "src/empty.py"};
    r.merged = true;
    return r;
}

}  // namespace

TEST_CASE("bm25 scores match brute force") {
    Rng rng(12);
    const auto vocab = gen::vocabulary(40, rng);
    std::vector<SourceFile> files;
    std::vector<std::string> texts;
    for (int i = 0; i < 30; ++i) {
        texts.push_back(gen::join(gen::random_words(5 + rng.below(50), vocab, rng)));
        files.push_back({"f" + std::to_string(i), texts.back()});
    }
    const Bm25Index idx(files);
    for (int q = 0; q < 20; ++q) {
        const auto query = gen::join(gen::random_words(1 + rng.below(6), vocab, rng));
        const auto want = oracle_ref::bm25(query, texts);
        const auto got = idx.scores(query);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
    }
    CHECK(idx.idf("never-seen") > 0.0);
}

TEST_CASE("bm25 ranking orders by score then path") {
    std::vector<SourceFile> files{{"b", "apple"}, {"a", "apple"}, {"c", "pear"}};
    const auto top = bm25_rank("apple", files, 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].path == "a");
    CHECK(top[1].path == "b");
    CHECK_THROWS_AS(bm25_rank("apple", files, 0), ConfigError);
    CHECK(bm25_rank("apple", {}, 3).empty());
}

TEST_CASE("eligibility thresholds") {
    auto r = sample_record();
    CHECK(repo_eligible(r.repo));
    r.repo.forks = 9;
    CHECK_FALSE(repo_eligible(r.repo));
}

TEST_CASE("created paths and validation") {
    auto r = sample_record();
    CHECK(created_paths(r.patch) == std::vector<std::string>{"src/empty.py"});
    CHECK_NOTHROW(validate(r));
    r.modified_paths.push_back("nowhere.py");
    CHECK_THROWS_AS(validate(r), ConfigError);
    r.modified_paths.clear();
    CHECK_THROWS_AS(validate(r), ConfigError);
}

TEST_CASE("directory tree rendering") {
    const std::vector<std::string> paths{"src/b.py", "README.md", "src/a/x.py"};
    CHECK(render_directory_tree(paths) == "README.md\nsrc/\n  a/\n    x.py\n  b.py\n");
}

TEST_CASE("sample keeps top files by relevance and round-trips") {
    const auto r = sample_record();
    const auto s = build_commit_sample(r, 2);
    REQUIRE(s.retrieved.size() == 2);
    CHECK(s.retrieved[0].path == "src/parser.py");
    CHECK(s.readme == *r.repo.readme);
    CHECK(s.target_paths == r.modified_paths);
    const auto text = serialize(s);
    CHECK(parse_commit_sample(text) == s);
    CHECK_THROWS_AS(parse_commit_sample(text.substr(0, text.size() - 3)), Error);
    CHECK_THROWS_AS(parse_commit_sample(text + "junk"), Error);
    CHECK(format_commit_sample(r, 2) == text);
}

TEST_CASE("payloads containing header-like lines survive") {
    auto r = sample_record();
    r.message = "@@ message 3\nfake\n@@ readme 0\n";
    const auto s = build_commit_sample(r);
    CHECK(parse_commit_sample(serialize(s)) == s);
}

TEST_CASE("record json round trip and commit dedup") {
    const auto r = sample_record();
    const auto back = commit_from_json(to_json(r));
    CHECK(back.id == r.id);
    CHECK(back.files == r.files);
    CHECK(back.modified_paths == r.modified_paths);
    auto dup = r;
    dup.id = "c0";
    auto other = r;
    other.id = "c2";
    other.message = "different";
    const auto out = dedup_commits({r, dup, other});
    REQUIRE(out.size() == 2);
    CHECK(out[0].id == "c0");
    CHECK(out[1].id == "c2");
}
