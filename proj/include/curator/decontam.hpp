#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "curator/document.hpp"
#include "curator/hashing.hpp"

namespace curator::decontam {

inline constexpr std::size_t kDefaultN = 10;
inline constexpr std::uint64_t kDefaultHashSeed = 0xdec0;

struct BenchmarkItem {
    std::string benchmark;
    std::string item_id;
    std::string text;
};

/// Reads benchmark items from a directory. A subdirectory is a benchmark
/// whose files are items; a top-level file is a benchmark named after its
/// stem. In either place a `.jsonl` file holds one item per line (a JSON
/// string, an object's "text" field, or else its string fields joined by
/// newlines) and any other file is a single item. Entries are read in name
/// order; hidden entries are skipped.
std::vector<BenchmarkItem> load_benchmarks(const std::filesystem::path& dir);

struct SourceRef {
    std::string benchmark;
    std::string item_id;

    friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

struct IndexOptions {
    std::size_t n = kDefaultN;
    std::uint64_t seed = kDefaultHashSeed;
    /// Store the gram strings instead of 128-bit hashes (audit mode).
    bool exact = false;
    unsigned workers = 1;
};

/// Gram key as stored: normalized words joined by single spaces.
std::string gram_key(std::span<const std::string> words);

/// Set of normalized word n-grams with the item that first contributed each.
class NgramIndex {
public:
    NgramIndex() = default;
    NgramIndex(std::size_t n, std::uint64_t seed, bool exact);

    std::size_t n() const noexcept { return n_; }
    std::uint64_t seed() const noexcept { return seed_; }
    bool exact() const noexcept { return exact_; }
    std::string algorithm() const { return exact_ ? "exact" : "murmur3_x64_128"; }
    std::size_t size() const noexcept { return exact_ ? strings_.size() : hashes_.size(); }
    bool empty() const noexcept { return size() == 0; }

    /// Items indexed per benchmark.
    const std::map<std::string, std::size_t>& manifest() const noexcept { return manifest_; }
    /// Items with fewer than n words, each indexed as one shorter gram.
    const std::vector<SourceRef>& short_items() const noexcept { return short_items_; }
    /// Word counts of those shorter grams; scrub checks grams of these lengths too.
    const std::set<std::size_t>& short_lengths() const noexcept { return short_lengths_; }

    /// Indexes every n-gram of the item (or its whole word sequence when shorter).
    void add_item(const BenchmarkItem& item);

    /// Source of the gram made of `words`, if indexed.
    const SourceRef* lookup(std::span<const std::string> words) const;

    void save(const std::filesystem::path& path) const;
    static NgramIndex load(const std::filesystem::path& path);

private:
    std::uint32_t source_id(const SourceRef& ref);
    void insert(std::span<const std::string> words, std::uint32_t source);

    std::size_t n_ = kDefaultN;
    std::uint64_t seed_ = kDefaultHashSeed;
    bool exact_ = false;
    std::vector<SourceRef> sources_;
    std::map<std::pair<std::string, std::string>, std::uint32_t> source_index_;
    std::unordered_map<Hash128, std::uint32_t, Hash128Hasher> hashes_;
    std::unordered_map<std::string, std::uint32_t> strings_;
    std::map<std::string, std::size_t> manifest_;
    std::vector<SourceRef> short_items_;
    std::set<std::size_t> short_lengths_;
};

/// Items are added in (benchmark, item id) order, so gram sources do not depend
/// on input order. n must be >= 1.
NgramIndex build_index(std::span<const BenchmarkItem> items, const IndexOptions& opts = {});

struct Removal {
    std::string doc_id;
    SourceRef source;
    std::string gram;  // the first matching gram of the document
};

struct ScrubResult {
    std::vector<std::string> kept;   // input order
    std::vector<Removal> removed;    // input order
};

/// Removes every document sharing any indexed gram.
ScrubResult scrub(std::span<const CodeDocument> docs, const NgramIndex& index, unsigned workers = 1);

/// First indexed gram of `text`, scanning positions left to right and, at each
/// position, the n-gram before shorter item lengths.
std::optional<Removal> first_match(const std::string& doc_id, std::string_view text, const NgramIndex& index);

Json to_json(const ScrubResult& result);

}  // namespace curator::decontam
