#include "curator/commits.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "curator/errors.hpp"
#include "curator/hashing.hpp"

namespace curator::commits {

CommitRecord commit_from_json(const Json& j) {
    CommitRecord r;
    r.id = j.at("id").get<std::string>();
    r.repo = repo_from_json(j.at("repo"));
    if (j.contains("files")) {
        for (const auto& f : j["files"]) r.files.push_back({f.at("path").get<std::string>(), f.at("content").get<std::string>()});
    }
    r.message = j.at("message").get<std::string>();
    r.patch = j.at("patch").get<std::string>();
    r.merged = j.value("merged", false);
    r.modified_paths = j.at("modified_paths").get<std::vector<std::string>>();
    return r;
}

Json to_json(const CommitRecord& r) {
    Json files = Json::array();
    for (const auto& f : r.files) files.push_back({{"path", f.path}, {"content", f.content}});
    return Json{{"id", r.id},           {"repo", to_json(r.repo)}, {"files", files},
                {"message", r.message}, {"patch", r.patch},        {"merged", r.merged},
                {"modified_paths", r.modified_paths}};
}

bool repo_eligible(const RepoSnapshot& repo, const EligibilityThresholds& t) {
    return repo.stars >= t.min_stars && repo.forks >= t.min_forks && repo.commit_count >= t.min_commits &&
           repo.active_days >= t.min_active_days;
}

std::vector<std::string> created_paths(std::string_view patch) {
    std::vector<std::string> out;
    bool from_null = false;
    std::size_t pos = 0;
    while (pos < patch.size()) {
        auto end = patch.find('\n', pos);
        if (end == std::string_view::npos) end = patch.size();
        const auto line = patch.substr(pos, end - pos);
        if (line.starts_with("--- ")) {
            from_null = line.substr(4).starts_with("/dev/null");
        } else if (line.starts_with("+++ ") && from_null) {
            auto path = line.substr(4);
            if (path.starts_with("b/")) path.remove_prefix(2);
            if (auto tab = path.find('\t'); tab != std::string_view::npos) path = path.substr(0, tab);
            out.emplace_back(path);
            from_null = false;
        }
        pos = end + 1;
    }
    return out;
}

void validate(const CommitRecord& r) {
    if (r.modified_paths.empty()) throw ConfigError("commit " + r.id + ": no modified paths");
    std::set<std::string> known;
    for (const auto& f : r.files) known.insert(f.path);
    for (const auto& p : created_paths(r.patch)) known.insert(p);
    for (const auto& p : r.modified_paths) {
        if (p.find('\n') != std::string::npos) throw ConfigError("commit " + r.id + ": path contains a newline");
        if (!known.contains(p)) throw ConfigError("commit " + r.id + ": modified path not in snapshot: " + p);
    }
}

std::string render_directory_tree(std::span<const std::string> paths) {
    struct Node {
        std::map<std::string, Node> children;
        bool is_file = false;
    };
    Node root;
    for (const auto& p : paths) {
        Node* node = &root;
        std::size_t start = 0;
        while (start <= p.size()) {
            auto slash = p.find('/', start);
            const bool last = slash == std::string::npos;
            const std::string part = p.substr(start, last ? std::string::npos : slash - start);
            if (!part.empty()) {
                node = &node->children[part];
                if (last) node->is_file = true;
            }
            if (last) break;
            start = slash + 1;
        }
    }
    std::string out;
    auto render = [&](auto& self, const Node& node, std::size_t depth) -> void {
        for (const auto& [name, child] : node.children) {
            out.append(depth * 2, ' ');
            out += name;
            if (!child.children.empty()) {
                out += "/\n";
                self(self, child, depth + 1);
            } else {
                out += '\n';
            }
        }
    };
    render(render, root, 0);
    return out;
}

CommitSample build_commit_sample(const CommitRecord& record, std::size_t topk) {
    validate(record);
    CommitSample s;
    s.readme = record.repo.readme.value_or("");
    std::vector<std::string> paths;
    for (const auto& f : record.files) paths.push_back(f.path);
    s.directory_tree = render_directory_tree(paths);
    for (const auto& ranked : bm25_rank(record.message, record.files, topk)) {
        auto it = std::find_if(record.files.begin(), record.files.end(), [&](const auto& f) { return f.path == ranked.path; });
        s.retrieved.push_back(*it);
    }
    s.message = record.message;
    s.target_paths = record.modified_paths;
    s.target_patch = record.patch;
    return s;
}

namespace {

void section(std::string& out, std::string_view name, std::string_view payload, std::string_view path = {}) {
    out += "@@ ";
    out += name;
    out += ' ';
    out += std::to_string(payload.size());
    if (!path.empty()) {
        out += ' ';
        out += path;
    }
    out += '\n';
    out += payload;
    out += '\n';
}

struct Section {
    std::string name;
    std::string path;
    std::string_view payload;
};

class SectionReader {
public:
    explicit SectionReader(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }

    Section next() {
        const auto eol = text_.find('\n', pos_);
        if (eol == std::string_view::npos || !text_.substr(pos_).starts_with("@@ ")) throw Error("commit sample: expected section header");
        const auto header = text_.substr(pos_ + 3, eol - pos_ - 3);
        const auto sp1 = header.find(' ');
        if (sp1 == std::string_view::npos) throw Error("commit sample: malformed header");
        Section s;
        s.name = std::string(header.substr(0, sp1));
        auto rest = header.substr(sp1 + 1);
        const auto sp2 = rest.find(' ');
        const auto len_str = rest.substr(0, sp2);
        if (sp2 != std::string_view::npos) s.path = std::string(rest.substr(sp2 + 1));
        std::size_t len = 0;
        auto [p, ec] = std::from_chars(len_str.data(), len_str.data() + len_str.size(), len);
        if (ec != std::errc{} || p != len_str.data() + len_str.size()) throw Error("commit sample: bad section length");
        const std::size_t start = eol + 1;
        if (start + len + 1 > text_.size() || text_[start + len] != '\n') throw Error("commit sample: truncated section " + s.name);
        s.payload = text_.substr(start, len);
        pos_ = start + len + 1;
        return s;
    }

    Section expect(std::string_view name) {
        auto s = next();
        if (s.name != name) throw Error("commit sample: expected section " + std::string(name) + ", got " + s.name);
        return s;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize(const CommitSample& s) {
    std::string out;
    section(out, "readme", s.readme);
    section(out, "tree", s.directory_tree);
    for (const auto& f : s.retrieved) section(out, "file", f.content, f.path);
    section(out, "message", s.message);
    std::string paths;
    for (std::size_t i = 0; i < s.target_paths.size(); ++i) {
        if (i) paths += '\n';
        paths += s.target_paths[i];
    }
    section(out, "target-paths", paths);
    section(out, "target-patch", s.target_patch);
    return out;
}

CommitSample parse_commit_sample(std::string_view text) {
    SectionReader reader(text);
    CommitSample s;
    s.readme = std::string(reader.expect("readme").payload);
    s.directory_tree = std::string(reader.expect("tree").payload);
    Section sec = reader.next();
    while (sec.name == "file") {
        s.retrieved.push_back({sec.path, std::string(sec.payload)});
        sec = reader.next();
    }
    if (sec.name != "message") throw Error("commit sample: expected section message, got " + sec.name);
    s.message = std::string(sec.payload);
    const auto paths = reader.expect("target-paths").payload;
    std::size_t start = 0;
    while (start < paths.size()) {
        auto nl = paths.find('\n', start);
        if (nl == std::string_view::npos) nl = paths.size();
        s.target_paths.emplace_back(paths.substr(start, nl - start));
        start = nl + 1;
    }
    s.target_patch = std::string(reader.expect("target-patch").payload);
    if (!reader.done()) throw Error("commit sample: trailing data");
    return s;
}

std::string format_commit_sample(const CommitRecord& record, std::size_t topk) {
    return serialize(build_commit_sample(record, topk));
}

std::vector<CommitRecord> dedup_commits(std::vector<CommitRecord> records) {
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::set<Sha256Digest> seen;
    std::vector<CommitRecord> out;
    for (auto& r : records) {
        // length prefix keeps (message, patch) boundaries unambiguous
        const std::string key = std::to_string(r.message.size()) + ":" + r.message + r.patch;
        if (seen.insert(sha256(key)).second) out.push_back(std::move(r));
    }
    return out;
}

}  // namespace curator::commits
