#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curator/bm25.hpp"
#include "curator/document.hpp"

namespace curator::pack {

/// Dependency graph over repository files; an edge (importer, imported) means
/// the importer depends on the imported file.
struct DepGraph {
    std::string language;
    std::vector<std::string> nodes;                             // sorted, unique
    std::vector<std::pair<std::string, std::string>> edges;     // sorted, unique, no self-edges

    /// Throws ConfigError on dangling or self edges.
    void validate() const;
};

/// How an import target is mapped to repository paths.
enum class Resolver {
    PythonModule,  // dotted module names, relative dots, package __init__.py
    Include,       // importer directory, repository root, then unique suffix
    JavaClass,     // a.b.C -> .../a/b/C.java, a.b.* -> every .java in a/b
    JsRelative,    // ./x and ../x with common script extensions
};

struct ImportRule {
    std::string pattern;  // ECMAScript regex, matched per line
    int group = 1;        // capture group holding the import target(s)
    Resolver resolver = Resolver::Include;
};

struct ImportRuleSet {
    std::string language;
    std::vector<ImportRule> rules;
};

/// Language -> import rules. Starts with Python, C, C++, CUDA, Java,
/// JavaScript and TypeScript; more can be registered or loaded from JSON
/// ({"language": ..., "rules": [{"pattern", "group", "resolver"}]}).
class ImportRules {
public:
    static ImportRules defaults();

    void add(ImportRuleSet set);
    void add_from_json(const Json& j);
    const ImportRuleSet* find(const std::string& language) const;

private:
    std::map<std::string, ImportRuleSet> sets_;
};

/// Builds the dependency graph of `files` from static import statements of
/// files written in `language`. Unresolvable imports are ignored. Throws
/// ConfigError when no rule set exists (use random_pack instead).
DepGraph extract_deps(std::span<const SourceFile> files, const std::string& language,
                      const ImportRules& rules = ImportRules::defaults());

/// ceil(bytes / 4).
constexpr std::size_t estimate_tokens(std::size_t bytes) { return (bytes + 3) / 4; }

/// Comment-style header line naming the file ("# a.py", "// a.c", ...).
std::string file_header(const std::string& path, const std::string& language);

/// Header plus content plus a terminating newline, as placed in a sequence.
std::string file_block(const SourceFile& file, const std::string& language);

/// Topological order in which every imported file precedes its importers.
/// Strongly connected components are emitted contiguously in path order;
/// ready components are taken smallest-path first.
std::vector<std::string> topo_order(const DepGraph& graph);

struct Subgraph {
    std::vector<std::string> nodes;  // sorted
    std::size_t size = 0;            // token estimate
    bool oversize = false;

    friend bool operator==(const Subgraph&, const Subgraph&) = default;
};

struct Cut {
    std::vector<std::string> part;  // side with size <= cap
    std::size_t crossing = 0;       // edges between the two sides
    std::size_t part_size = 0;
};

/// Proper subset of `nodes` with total size <= cap minimizing the number of
/// crossing edges; larger parts win ties. Exhaustive for up to 16 nodes,
/// greedy growth from several seeds above that.
Cut best_cut(const DepGraph& graph, std::span<const std::string> nodes, const std::map<std::string, std::size_t>& sizes,
             std::size_t cap);

/// Splits the graph into subgraphs of estimated size <= cap. Files larger than
/// cap become flagged singletons; components larger than cap are cut with
/// best_cut; pieces are then packed first-fit decreasing.
std::vector<Subgraph> decompose_oversize(const DepGraph& graph, const std::map<std::string, std::size_t>& sizes,
                                         std::size_t cap);

struct PackedSequence {
    std::string repo_id;
    std::vector<std::string> files;
    std::string text;
    std::size_t token_estimate = 0;
    bool oversize = false;
};

inline constexpr std::size_t kDefaultCapTokens = 32768;

/// One sequence per subgraph, each in topological order.
std::vector<PackedSequence> topo_pack(const DepGraph& graph, const std::string& repo_id,
                                      std::span<const SourceFile> files, std::size_t cap = kDefaultCapTokens);

/// Seeded uniform shuffle of the files, chunked greedily by cap.
std::vector<PackedSequence> random_pack(const std::string& repo_id, std::span<const SourceFile> files,
                                        const std::string& language, std::uint64_t seed,
                                        std::size_t cap = kDefaultCapTokens);

}  // namespace curator::pack
