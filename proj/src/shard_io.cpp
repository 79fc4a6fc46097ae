#include "curator/shard_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "curator/errors.hpp"
#include "curator/hashing.hpp"
#include "curator/text.hpp"

namespace curator {

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open " + p.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + p.string());
    return data;
}

void write_file(const fs::path& p, std::string_view data) {
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
}

fs::path sidecar(const fs::path& shard) { return shard.string() + ".sha256"; }

std::string shard_name(const std::string& prefix, std::size_t id) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05zu", id);
    return prefix + "-" + buf + ".jsonl";
}

bool is_hidden(const fs::path& rel) {
    for (const auto& part : rel) {
        const auto s = part.string();
        if (!s.empty() && s[0] == '.' && s != "." && s != "..") return true;
    }
    return false;
}

}  // namespace

std::vector<CorpusShard> write_shards(std::span<const CodeDocument> docs, const fs::path& dir,
                                      std::size_t shard_size, const std::string& prefix) {
    if (shard_size < 1) throw ConfigError("shard_size must be >= 1");

    std::vector<const CodeDocument*> sorted;
    sorted.reserve(docs.size());
    for (const auto& d : docs) {
        if (!text::is_valid_utf8(d.content)) throw EncodingError(d.id, "content is not valid UTF-8");
        if (d.byte_len != d.content.size()) throw Error(d.id + ": byte_len does not match content");
        sorted.push_back(&d);
    }
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i]->id == sorted[i - 1]->id) throw ConfigError("duplicate document id: " + sorted[i]->id);
    }

    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    std::vector<CorpusShard> shards;
    for (std::size_t begin = 0, id = 0; begin < sorted.size(); begin += shard_size, ++id) {
        const std::size_t end = std::min(sorted.size(), begin + shard_size);
        std::string bytes;
        for (std::size_t i = begin; i < end; ++i) {
            bytes += to_json(*sorted[i]).dump();
            bytes += '\n';
        }
        CorpusShard shard;
        shard.shard_id = id;
        shard.path = dir / shard_name(prefix, id);
        shard.records = end - begin;
        shard.checksum = sha256_hex(bytes);
        write_file(shard.path, bytes);
        write_file(sidecar(shard.path), shard.checksum + "  " + shard.path.filename().string() + "\n");
        shards.push_back(std::move(shard));
    }
    return shards;
}

std::vector<fs::path> list_shards(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<CodeDocument> read_shard(const fs::path& path) {
    const std::string name = path.string();
    std::string bytes;
    std::string expected;
    try {
        bytes = read_file(path);
        expected = read_file(sidecar(path));
    } catch (const IoError& e) {
        throw ShardError(name, e.what());
    }
    expected = expected.substr(0, expected.find_first_of(" \n"));
    if (sha256_hex(bytes) != expected) throw ShardError(name, "checksum mismatch");

    std::vector<CodeDocument> docs;
    std::istringstream in(bytes);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            docs.push_back(document_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            throw ShardError(name, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return docs;
}

std::vector<CodeDocument> read_shards(std::span<const fs::path> paths, ReadOptions opts) {
    std::vector<CodeDocument> out;
    for (const auto& p : paths) {
        try {
            auto docs = read_shard(p);
            std::move(docs.begin(), docs.end(), std::back_inserter(out));
        } catch (const ShardError& e) {
            if (!opts.skip_corrupt) throw;
            spdlog::error("skipping shard {}", e.what());
        }
    }
    return out;
}

std::vector<CodeDocument> read_corpus(const fs::path& dir, ReadOptions opts) {
    const auto paths = list_shards(dir);
    return read_shards(paths, opts);
}

std::vector<CodeDocument> ingest_tree(const fs::path& root, IngestStats* stats) {
    if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
    IngestStats local;
    std::vector<fs::path> files;
    for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
        const fs::path rel = fs::relative(it->path(), root);
        if (is_hidden(rel)) {
            if (it->is_directory()) it.disable_recursion_pending();
            continue;
        }
        if (it->is_regular_file()) files.push_back(rel);
    }
    std::sort(files.begin(), files.end());

    std::vector<CodeDocument> docs;
    for (const auto& rel : files) {
        ++local.files_seen;
        std::string content = read_file(root / rel);
        const std::string id = rel.generic_string();
        if (!text::is_valid_utf8(content)) {
            ++local.rejected_encoding;
            spdlog::warn("ingest: rejecting {}: content is not valid UTF-8", id);
            continue;
        }
        std::optional<std::string> repo;
        auto first = rel.begin();
        if (std::distance(rel.begin(), rel.end()) > 1) repo = first->string();
        // path is repository-relative when the file belongs to a repository
        std::string path = repo ? fs::relative(rel, *repo).generic_string() : id;
        docs.push_back(CodeDocument::make(id, std::move(path), std::move(content), std::move(repo)));
        ++local.ingested;
    }
    if (stats) *stats = local;
    return docs;
}

}  // namespace curator
