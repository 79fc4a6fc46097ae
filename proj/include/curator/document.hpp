#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace curator {

using Json = nlohmann::json;

/// One source file or web page. `tags` accumulates per-stage outputs keyed by
/// stage name; documents are otherwise treated as immutable once ingested.
struct CodeDocument {
    std::string id;
    std::optional<std::string> repo_id;
    std::string path;
    std::string language;
    std::string content;
    std::size_t byte_len = 0;
    Json tags = Json::object();

    static CodeDocument make(std::string id, std::string path, std::string content,
                             std::optional<std::string> repo_id = std::nullopt);

    friend bool operator==(const CodeDocument&, const CodeDocument&) = default;
};

struct RepoSnapshot {
    std::string repo_id;
    std::string name;
    std::uint64_t stars = 0;
    std::uint64_t forks = 0;
    std::uint64_t commit_count = 0;
    std::uint64_t active_days = 0;
    std::optional<std::string> readme;
    std::vector<std::string> documents;
    std::vector<std::pair<std::string, std::string>> dep_edges;

    friend bool operator==(const RepoSnapshot&, const RepoSnapshot&) = default;
};

Json to_json(const CodeDocument& doc);
CodeDocument document_from_json(const Json& j);

Json to_json(const RepoSnapshot& repo);
RepoSnapshot repo_from_json(const Json& j);

/// Groups documents by repo_id into snapshots (documents without a repo are
/// skipped). Repositories and member lists are id-sorted.
std::vector<RepoSnapshot> group_repositories(std::span<const CodeDocument> docs);

/// Id-indexed read-only view over a document collection.
class DocumentStore {
public:
    DocumentStore() = default;
    explicit DocumentStore(std::vector<CodeDocument> docs);

    const CodeDocument* find(const std::string& id) const;
    const CodeDocument& at(const std::string& id) const;
    bool contains(const std::string& id) const { return index_.contains(id); }

    std::span<const CodeDocument> documents() const { return docs_; }
    std::size_t size() const { return docs_.size(); }

private:
    std::vector<CodeDocument> docs_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace curator
