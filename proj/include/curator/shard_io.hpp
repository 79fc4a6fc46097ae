#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "curator/document.hpp"

namespace curator {

namespace fs = std::filesystem;

struct CorpusShard {
    std::size_t shard_id = 0;
    fs::path path;
    std::size_t records = 0;
    std::string checksum;  // sha256 hex of the shard bytes
};

/// Writes `docs` as id-sorted JSONL shards `<prefix>-NNNNN.jsonl` with a
/// `.sha256` sidecar each. Duplicate ids and non-UTF-8 content are rejected.
/// shard_size must be >= 1.
std::vector<CorpusShard> write_shards(std::span<const CodeDocument> docs, const fs::path& dir,
                                      std::size_t shard_size, const std::string& prefix = "part");

/// Shard files in `dir` in name order.
std::vector<fs::path> list_shards(const fs::path& dir);

/// Loads one shard after verifying its sidecar checksum. Throws ShardError.
std::vector<CodeDocument> read_shard(const fs::path& path);

struct ReadOptions {
    /// Skip shards that fail verification (logged) instead of throwing.
    bool skip_corrupt = false;
};

std::vector<CodeDocument> read_shards(std::span<const fs::path> paths, ReadOptions opts = {});

/// read_shards(list_shards(dir)).
std::vector<CodeDocument> read_corpus(const fs::path& dir, ReadOptions opts = {});

inline constexpr std::size_t kDefaultShardSize = 10000;

struct IngestStats {
    std::size_t files_seen = 0;
    std::size_t ingested = 0;
    std::size_t rejected_encoding = 0;
};

/// Walks a directory tree and turns every regular file into a document.
/// Each top-level subdirectory of `root` is treated as a repository; the
/// document id is the root-relative path. Hidden entries are skipped.
std::vector<CodeDocument> ingest_tree(const fs::path& root, IngestStats* stats = nullptr);

}  // namespace curator
