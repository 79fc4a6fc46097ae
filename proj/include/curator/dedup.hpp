#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curator/document.hpp"
#include "curator/hashing.hpp"

namespace curator::dedup {

struct MinHashParams {
    std::size_t k = 256;
    std::size_t shingle_width = 5;
    std::uint64_t seed = 1;
};

struct MinHashSignature {
    std::string doc_id;
    std::vector<std::uint64_t> values;
};

/// Sorted, unique 64-bit hashes of the word shingles of `content` (lowercased,
/// whitespace-split tokens joined by a single space). Content with fewer than
/// `width` words yields a single shingle over all of its tokens.
std::vector<std::uint64_t> shingle_hashes(std::string_view content, std::size_t width);

/// Computes MinHash signatures using k universal hash functions
/// h(x) = (a*x + b) mod (2^61 - 1) drawn from the configured seed.
class MinHasher {
public:
    explicit MinHasher(MinHashParams params = {});

    MinHashSignature sign(const CodeDocument& doc) const { return sign(doc.id, doc.content); }
    MinHashSignature sign(std::string id, std::string_view content) const;
    MinHashSignature sign_shingles(std::string id, std::span<const std::uint64_t> shingles) const;

    const MinHashParams& params() const noexcept { return params_; }

private:
    MinHashParams params_;
    std::vector<std::uint64_t> a_;
    std::vector<std::uint64_t> b_;
};

/// Fraction of positions where the two signatures agree.
double estimate_jaccard(const MinHashSignature& x, const MinHashSignature& y);

/// SHA-256 of the document's content bytes.
Sha256Digest content_hash(const CodeDocument& doc);

struct NearPair {
    std::string first;
    std::string second;
    double estimated_jaccard = 0.0;

    friend bool operator==(const NearPair&, const NearPair&) = default;
};

struct DedupReport {
    std::vector<std::vector<std::string>> exact_groups;  // groups of size >= 2, survivor first
    std::vector<NearPair> near_pairs;                      // first < second, sorted
    std::set<std::string> kept;
    std::map<std::string, std::string> dropped;  // id -> reason

    /// Fraction of input items dropped, in [0, 1]; 0 for empty input.
    double reduction() const;
};

struct LshParams {
    double threshold = 0.85;
    std::size_t bands = 16;
    std::size_t rows = 16;
};

/// Groups byte-identical documents; the lexicographically smallest id of each
/// group survives.
DedupReport exact_dedup(std::span<const CodeDocument> docs);

/// LSH banding over signatures. Candidate pairs whose signature estimate is at
/// least `threshold` are reported and merged into clusters (single linkage);
/// the smallest id in each cluster survives. Throws ConfigError when
/// bands * rows differs from the signature length or lengths disagree.
DedupReport near_dedup(std::span<const MinHashSignature> sigs, const LshParams& lsh);

struct DedupConfig {
    MinHashParams minhash;
    LshParams lsh;
    bool exact = true;
    bool near = true;
    unsigned workers = 1;
};

/// Exact dedup followed by near dedup over the exact survivors.
DedupReport deduplicate(std::span<const CodeDocument> docs, const DedupConfig& cfg = {});

/// Repository-level near dedup. A repository's signature is the MinHash over
/// the union of its member documents' shingles. Report ids are repo ids.
DedupReport repo_level_dedup(std::span<const RepoSnapshot> repos, const DocumentStore& docs,
                             const DedupConfig& cfg = {});

Json to_json(const DedupReport& report);

}  // namespace curator::dedup
