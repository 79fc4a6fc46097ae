#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curator/bm25.hpp"
#include "curator/document.hpp"

namespace curator::commits {

/// One commit with its pre-commit repository snapshot.
struct CommitRecord {
    std::string id;
    RepoSnapshot repo;               // metadata and README of the snapshot
    std::vector<SourceFile> files;   // pre-commit file contents
    std::string message;
    std::string patch;               // unified diff
    bool merged = false;
    std::vector<std::string> modified_paths;
};

CommitRecord commit_from_json(const Json& j);
Json to_json(const CommitRecord& record);

struct EligibilityThresholds {
    std::uint64_t min_stars = 100;
    std::uint64_t min_forks = 10;
    std::uint64_t min_commits = 100;
    std::uint64_t min_active_days = 100;
};

/// Repository passes every popularity and maintenance threshold.
bool repo_eligible(const RepoSnapshot& repo, const EligibilityThresholds& t = {});

/// Paths the patch creates ("--- /dev/null" followed by "+++ b/<path>").
std::vector<std::string> created_paths(std::string_view patch);

/// Throws ConfigError unless modified_paths is non-empty and every path is in
/// the snapshot or created by the patch.
void validate(const CommitRecord& record);

inline constexpr std::size_t kRetrievedFiles = 5;

struct CommitSample {
    std::string readme;
    std::string directory_tree;
    std::vector<SourceFile> retrieved;  // at most kRetrievedFiles, by BM25 rank
    std::string message;
    std::vector<std::string> target_paths;
    std::string target_patch;

    friend bool operator==(const CommitSample&, const CommitSample&) = default;
};

/// Sorted, two-space indented listing; directories carry a trailing '/'.
std::string render_directory_tree(std::span<const std::string> paths);

/// Builds the sample context: README, directory tree, and the top-k snapshot
/// files ranked by BM25 against the commit message.
CommitSample build_commit_sample(const CommitRecord& record, std::size_t topk = kRetrievedFiles);

/// Sections in fixed order (readme, tree, files, message, target-paths,
/// target-patch), each framed by a "@@ <name> <byte-length>[ <path>]" header
/// line followed by the payload and a newline.
std::string serialize(const CommitSample& sample);

/// Inverse of serialize. Throws Error on malformed input.
CommitSample parse_commit_sample(std::string_view text);

std::string format_commit_sample(const CommitRecord& record, std::size_t topk = kRetrievedFiles);

/// Exact dedup on (message, patch); the smallest commit id survives. Output is id-sorted.
std::vector<CommitRecord> dedup_commits(std::vector<CommitRecord> records);

}  // namespace curator::commits
