#include <doctest.h>

#include "curator/errors.hpp"
#include "curator/longctx.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace curator;
using namespace curator::pack;

namespace {

DepGraph to_dep(const gen::Graph& g) {
    DepGraph d;
    d.language = "Python";
    d.nodes = g.nodes;
    d.edges = g.edges;
    std::sort(d.edges.begin(), d.edges.end());
    d.edges.erase(std::unique(d.edges.begin(), d.edges.end()), d.edges.end());
    return d;
}

bool has_edge(const DepGraph& g, const std::string& a, const std::string& b) {
    return std::find(g.edges.begin(), g.edges.end(), std::pair{a, b}) != g.edges.end();
}

}  // namespace

TEST_CASE("python imports resolve to repository files") {
    std::vector<SourceFile> files{{"pkg/__init__.py", ""},
                                  {"pkg/helper.py", "from . import util\n"},
                                  {"pkg/util.py", "import os\n"},
                                  {"main.py", "import pkg.helper\nfrom pkg import util as u\nimport missing\n"}};
    const auto g = extract_deps(files, "Python");
    CHECK(has_edge(g, "main.py", "pkg/helper.py"));
    CHECK(has_edge(g, "main.py", "pkg/util.py"));
    CHECK(has_edge(g, "pkg/helper.py", "pkg/util.py"));
    CHECK_NOTHROW(g.validate());
    CHECK_THROWS_AS(extract_deps(files, "Haskell"), ConfigError);
}

TEST_CASE("c includes resolve relative, root and suffix") {
    std::vector<SourceFile> files{{"src/a.c", "#include \"a.h\"\n#include <stdio.h>\n#include \"util/b.h\"\n"},
                                  {"src/a.h", ""},
                                  {"include/util/b.h", "#include \"../c.h\"\n"},
                                  {"include/c.h", ""}};
    const auto g = extract_deps(files, "C");
    CHECK(has_edge(g, "src/a.c", "src/a.h"));
    CHECK(has_edge(g, "src/a.c", "include/util/b.h"));
    CHECK(has_edge(g, "include/util/b.h", "include/c.h"));
    CHECK(g.edges.size() == 3);
}

TEST_CASE("java and javascript imports") {
    std::vector<SourceFile> java{{"src/com/x/App.java", "import com.x.util.*;\nimport com.x.Model;\n"},
                                 {"src/com/x/Model.java", ""},
                                 {"src/com/x/util/A.java", ""},
                                 {"src/com/x/util/B.java", ""}};
    const auto gj = extract_deps(java, "Java");
    CHECK(gj.edges.size() == 3);
    std::vector<SourceFile> js{{"src/index.js", "import x from './lib';\nconst y = require('../top.js');\n"},
                               {"src/lib.ts", ""},
                               {"top.js", ""}};
    const auto g = extract_deps(js, "JavaScript");
    CHECK(has_edge(g, "src/index.js", "src/lib.ts"));
    CHECK(has_edge(g, "src/index.js", "top.js"));
}

TEST_CASE("custom rules load from json") {
    auto rules = ImportRules::defaults();
    rules.add_from_json(Json::parse(R"({"language":"Lua","rules":[{"pattern":"require\\s*\\(?\"([^\"]+)\"","group":1,"resolver":"include"}]})"));
    std::vector<SourceFile> files{{"a.lua", "local b = require(\"b.lua\")\n"}, {"b.lua", ""}};
    const auto g = extract_deps(files, "Lua", rules);
    CHECK(has_edge(g, "a.lua", "b.lua"));
}

TEST_CASE("graph validation") {
    DepGraph g{"Python", {"a", "b"}, {{"a", "c"}}};
    CHECK_THROWS_AS(g.validate(), ConfigError);
    g.edges = {{"a", "a"}};
    CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("topological order respects acyclic edges on random graphs") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto g = to_dep(gen::random_graph(12 + seed % 20, 0.15, seed, seed % 3));
        const auto order = topo_order(g);
        CHECK(order.size() == g.nodes.size());
        CHECK(std::set(order.begin(), order.end()).size() == g.nodes.size());
        CHECK(oracle_ref::topo_valid(order, g.nodes, g.edges));
    }
}

TEST_CASE("cycles are contiguous") {
    DepGraph g{"Python", {"a", "b", "c", "d"}, {{"a", "b"}, {"b", "a"}, {"c", "a"}, {"d", "c"}}};
    CHECK(topo_order(g) == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("best cut is optimal on small graphs") {
    Rng rng(99);
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto g = to_dep(gen::random_graph(6 + seed % 9, 0.3, seed));
        std::map<std::string, std::size_t> sizes;
        std::size_t total = 0;
        for (const auto& n : g.nodes) total += sizes[n] = 1 + rng.below(20);
        const std::size_t cap = std::max<std::size_t>(total / 2, 20);
        const auto cut = best_cut(g, g.nodes, sizes, cap);
        CHECK(cut.crossing == oracle_ref::exhaustive_min_cut(g.nodes, g.edges, sizes, cap));
        CHECK(cut.part_size <= cap);
        CHECK(cut.part.size() < g.nodes.size());
    }
}

TEST_CASE("decomposition respects the cap and covers every file once") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto g = to_dep(gen::random_graph(40, 0.08, seed, 2));
        Rng rng(seed);
        std::map<std::string, std::size_t> sizes;
        for (const auto& n : g.nodes) sizes[n] = 10 + rng.below(90);
        sizes[g.nodes[0]] = 500;
        const auto parts = decompose_oversize(g, sizes, 300);
        std::multiset<std::string> seen;
        for (const auto& p : parts) {
            std::size_t s = 0;
            for (const auto& n : p.nodes) {
                seen.insert(n);
                s += sizes.at(n);
            }
            CHECK(p.size == s);
            if (p.oversize) {
                CHECK(p.nodes.size() == 1);
                CHECK(p.size > 300);
            } else {
                CHECK(p.size <= 300);
            }
        }
        CHECK(seen.size() == g.nodes.size());
        CHECK(std::set(seen.begin(), seen.end()).size() == g.nodes.size());
    }
}

TEST_CASE("file headers use the language comment style") {
    CHECK(file_header("a.py", "Python") == "# a.py");
    CHECK(file_header("a.c", "C") == "// a.c");
    CHECK(file_header("a.html", "HTML") == "<!-- a.html -->");
    CHECK(file_header("a.hs", "Haskell") == "-- a.hs");
    CHECK(file_block({"a.py", "x = 1"}, "Python") == "# a.py\nx = 1\n");
}

TEST_CASE("topo pack orders imports first and splits by cap") {
    std::vector<SourceFile> files{{"main.py", "import lib\nprint(lib.x)\n"}, {"lib.py", "x = 1\n"}};
    const auto g = extract_deps(files, "Python");
    const auto seqs = topo_pack(g, "repo", files);
    REQUIRE(seqs.size() == 1);
    CHECK(seqs[0].files == std::vector<std::string>{"lib.py", "main.py"});
    CHECK(seqs[0].text == "# lib.py\nx = 1\n# main.py\nimport lib\nprint(lib.x)\n");
    CHECK(seqs[0].token_estimate == estimate_tokens(seqs[0].text.size()));

    const auto tiny = topo_pack(g, "repo", files, 8);
    CHECK(tiny.size() == 2);
}

TEST_CASE("random pack is a seeded permutation") {
    std::vector<SourceFile> files;
    for (int i = 0; i < 20; ++i) files.push_back({"f" + std::to_string(i) + ".txt", std::string(40, 'x')});
    const auto a = random_pack("r", files, "Text", 7, 50);
    const auto b = random_pack("r", files, "Text", 7, 50);
    const auto c = random_pack("r", files, "Text", 8, 50);
    std::vector<std::string> fa, fc;
    for (const auto& s : a) {
        CHECK(s.token_estimate <= 50);
        fa.insert(fa.end(), s.files.begin(), s.files.end());
    }
    for (const auto& s : c) fc.insert(fc.end(), s.files.begin(), s.files.end());
    CHECK(fa.size() == 20);
    CHECK(std::set(fa.begin(), fa.end()).size() == 20);
    CHECK(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].files == b[i].files);
    CHECK(fa != fc);
}
