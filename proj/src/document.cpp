#include "curator/document.hpp"

#include <algorithm>
#include <map>

#include "curator/errors.hpp"
#include "curator/language.hpp"

namespace curator {

CodeDocument CodeDocument::make(std::string id, std::string path, std::string content,
                                std::optional<std::string> repo_id) {
    CodeDocument doc;
    doc.id = std::move(id);
    doc.repo_id = std::move(repo_id);
    doc.language = infer_language(path, content);
    doc.path = std::move(path);
    doc.content = std::move(content);
    doc.byte_len = doc.content.size();
    return doc;
}

Json to_json(const CodeDocument& doc) {
    Json j;
    j["id"] = doc.id;
    j["repo_id"] = doc.repo_id ? Json(*doc.repo_id) : Json(nullptr);
    j["path"] = doc.path;
    j["language"] = doc.language;
    j["content"] = doc.content;
    j["byte_len"] = doc.byte_len;
    j["tags"] = doc.tags;
    return j;
}

CodeDocument document_from_json(const Json& j) {
    CodeDocument doc;
    doc.id = j.at("id").get<std::string>();
    if (j.contains("repo_id") && !j["repo_id"].is_null()) doc.repo_id = j["repo_id"].get<std::string>();
    doc.path = j.value("path", std::string{});
    doc.content = j.at("content").get<std::string>();
    doc.language = j.contains("language") ? j["language"].get<std::string>()
                                          : infer_language(doc.path, doc.content);
    doc.byte_len = j.value("byte_len", doc.content.size());
    if (doc.byte_len != doc.content.size()) {
        throw Error(doc.id + ": byte_len " + std::to_string(doc.byte_len) + " does not match content size " +
                    std::to_string(doc.content.size()));
    }
    if (j.contains("tags")) doc.tags = j["tags"];
    return doc;
}

Json to_json(const RepoSnapshot& repo) {
    Json j;
    j["repo_id"] = repo.repo_id;
    j["name"] = repo.name;
    j["stars"] = repo.stars;
    j["forks"] = repo.forks;
    j["commit_count"] = repo.commit_count;
    j["active_days"] = repo.active_days;
    j["readme"] = repo.readme ? Json(*repo.readme) : Json(nullptr);
    j["documents"] = repo.documents;
    Json edges = Json::array();
    for (const auto& [from, to] : repo.dep_edges) edges.push_back({from, to});
    j["dep_edges"] = std::move(edges);
    return j;
}

RepoSnapshot repo_from_json(const Json& j) {
    RepoSnapshot r;
    r.repo_id = j.at("repo_id").get<std::string>();
    r.name = j.value("name", r.repo_id);
    auto count = [&](const char* key) -> std::uint64_t {
        if (!j.contains(key)) return 0;
        const auto& v = j[key];
        if (v.is_number_integer() && v.get<std::int64_t>() < 0)
            throw Error(r.repo_id + ": negative " + key);
        return v.get<std::uint64_t>();
    };
    r.stars = count("stars");
    r.forks = count("forks");
    r.commit_count = count("commit_count");
    r.active_days = count("active_days");
    if (j.contains("readme") && !j["readme"].is_null()) r.readme = j["readme"].get<std::string>();
    if (j.contains("documents")) r.documents = j["documents"].get<std::vector<std::string>>();
    if (j.contains("dep_edges")) {
        for (const auto& e : j["dep_edges"]) r.dep_edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    }
    return r;
}

std::vector<RepoSnapshot> group_repositories(std::span<const CodeDocument> docs) {
    std::map<std::string, RepoSnapshot> repos;
    for (const auto& d : docs) {
        if (!d.repo_id) continue;
        auto& r = repos[*d.repo_id];
        if (r.repo_id.empty()) {
            r.repo_id = *d.repo_id;
            r.name = *d.repo_id;
        }
        r.documents.push_back(d.id);
    }
    std::vector<RepoSnapshot> out;
    out.reserve(repos.size());
    for (auto& [_, r] : repos) {
        std::sort(r.documents.begin(), r.documents.end());
        out.push_back(std::move(r));
    }
    return out;
}

DocumentStore::DocumentStore(std::vector<CodeDocument> docs) : docs_(std::move(docs)) {
    index_.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (!index_.emplace(docs_[i].id, i).second) throw ConfigError("duplicate document id: " + docs_[i].id);
    }
}

const CodeDocument* DocumentStore::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &docs_[it->second];
}

const CodeDocument& DocumentStore::at(const std::string& id) const {
    const auto* d = find(id);
    if (!d) throw ConfigError("unknown document id: " + id);
    return *d;
}

}  // namespace curator
