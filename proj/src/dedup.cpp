#include "curator/dedup.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "curator/errors.hpp"
#include "curator/parallel.hpp"
#include "curator/rng.hpp"
#include "curator/text.hpp"

namespace curator::dedup {

namespace {

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;
constexpr std::uint64_t kShingleSeed = 0x51e5u;

inline std::uint64_t mod61(unsigned __int128 x) {
    // x mod (2^61 - 1) for x < 2^122
    std::uint64_t lo = static_cast<std::uint64_t>(x & kMersenne61);
    std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
    std::uint64_t r = lo + hi;
    r = (r & kMersenne61) + (r >> 61);
    return r >= kMersenne61 ? r - kMersenne61 : r;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<std::uint64_t> shingle_hashes(std::string_view content, std::size_t width) {
    if (width < 1) throw ConfigError("shingle width must be >= 1");
    const auto words = text::lower_words(content);
    std::vector<std::uint64_t> out;
    if (words.size() < width) {
        out.push_back(murmur3_64(text::join(words, " "), kShingleSeed));
        return out;
    }
    out.reserve(words.size() - width + 1);
    std::string buf;
    for (std::size_t i = 0; i + width <= words.size(); ++i) {
        buf.clear();
        for (std::size_t k = 0; k < width; ++k) {
            if (k) buf += ' ';
            buf += words[i + k];
        }
        out.push_back(murmur3_64(buf, kShingleSeed));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MinHasher::MinHasher(MinHashParams params) : params_(params) {
    if (params_.k < 16) throw ConfigError("minhash k must be >= 16");
    if (params_.shingle_width < 1) throw ConfigError("shingle width must be >= 1");
    Rng rng(params_.seed);
    a_.resize(params_.k);
    b_.resize(params_.k);
    for (std::size_t i = 0; i < params_.k; ++i) {
        a_[i] = 1 + rng.below(kMersenne61 - 1);
        b_[i] = rng.below(kMersenne61);
    }
}

MinHashSignature MinHasher::sign(std::string id, std::string_view content) const {
    const auto shingles = shingle_hashes(content, params_.shingle_width);
    return sign_shingles(std::move(id), shingles);
}

MinHashSignature MinHasher::sign_shingles(std::string id, std::span<const std::uint64_t> shingles) const {
    MinHashSignature sig;
    sig.doc_id = std::move(id);
    sig.values.assign(params_.k, kMersenne61);
    for (std::uint64_t s : shingles) {
        const std::uint64_t x = s % kMersenne61;
        for (std::size_t i = 0; i < params_.k; ++i) {
            const std::uint64_t h = mod61(static_cast<unsigned __int128>(a_[i]) * x + b_[i]);
            if (h < sig.values[i]) sig.values[i] = h;
        }
    }
    return sig;
}

double estimate_jaccard(const MinHashSignature& x, const MinHashSignature& y) {
    if (x.values.size() != y.values.size() || x.values.empty())
        throw ConfigError("signature lengths differ: " + x.doc_id + " vs " + y.doc_id);
    std::size_t same = 0;
    for (std::size_t i = 0; i < x.values.size(); ++i) same += x.values[i] == y.values[i];
    return static_cast<double>(same) / static_cast<double>(x.values.size());
}

Sha256Digest content_hash(const CodeDocument& doc) { return sha256(doc.content); }

double DedupReport::reduction() const {
    const std::size_t total = kept.size() + dropped.size();
    return total == 0 ? 0.0 : static_cast<double>(dropped.size()) / static_cast<double>(total);
}

DedupReport exact_dedup(std::span<const CodeDocument> docs) {
    std::map<Sha256Digest, std::vector<std::string>> groups;
    for (const auto& d : docs) groups[content_hash(d)].push_back(d.id);

    DedupReport report;
    for (auto& [digest, ids] : groups) {
        std::sort(ids.begin(), ids.end());
        report.kept.insert(ids.front());
        for (std::size_t i = 1; i < ids.size(); ++i) {
            report.dropped.emplace(ids[i], "exact-duplicate-of:" + ids.front());
        }
        if (ids.size() > 1) report.exact_groups.push_back(std::move(ids));
    }
    std::sort(report.exact_groups.begin(), report.exact_groups.end());
    return report;
}

DedupReport near_dedup(std::span<const MinHashSignature> sigs, const LshParams& lsh) {
    DedupReport report;
    if (sigs.empty()) return report;
    if (lsh.threshold < 0.0 || lsh.threshold > 1.0) throw ConfigError("threshold must lie in [0, 1]");
    const std::size_t k = sigs.front().values.size();
    if (lsh.bands * lsh.rows != k) {
        throw ConfigError("bands * rows (" + std::to_string(lsh.bands * lsh.rows) +
                          ") must equal signature length " + std::to_string(k));
    }

    // index order = id order, so survivors and pair order do not depend on input order
    std::vector<std::size_t> order(sigs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return sigs[a].doc_id < sigs[b].doc_id; });
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& s = sigs[order[i]];
        if (s.values.size() != k) throw ConfigError("inconsistent signature length for " + s.doc_id);
        if (i && s.doc_id == sigs[order[i - 1]].doc_id) throw ConfigError("duplicate id " + s.doc_id);
    }

    std::unordered_set<std::uint64_t> candidates;
    const std::size_t band_bytes = lsh.rows * sizeof(std::uint64_t);
    for (std::size_t band = 0; band < lsh.bands; ++band) {
        std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const auto* start = sigs[order[i]].values.data() + band * lsh.rows;
            const std::string_view bytes(reinterpret_cast<const char*>(start), band_bytes);
            buckets[murmur3_64(bytes, band)].push_back(static_cast<std::uint32_t>(i));
        }
        for (const auto& [_, members] : buckets) {
            for (std::size_t x = 0; x < members.size(); ++x) {
                for (std::size_t y = x + 1; y < members.size(); ++y) {
                    candidates.insert((std::uint64_t{members[x]} << 32) | members[y]);
                }
            }
        }
    }

    std::vector<std::uint64_t> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());
    UnionFind uf(order.size());
    for (std::uint64_t packed : sorted) {
        const auto i = static_cast<std::size_t>(packed >> 32);
        const auto j = static_cast<std::size_t>(packed & 0xffffffffu);
        const auto& a = sigs[order[i]];
        const auto& b = sigs[order[j]];
        const double est = estimate_jaccard(a, b);
        if (est >= lsh.threshold) {
            report.near_pairs.push_back({a.doc_id, b.doc_id, est});
            uf.unite(i, j);
        }
    }

    // the root of each set is its smallest index, i.e. its smallest id
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t root = uf.find(i);
        const auto& id = sigs[order[i]].doc_id;
        if (root == i) {
            report.kept.insert(id);
        } else {
            report.dropped.emplace(id, "near-duplicate-of:" + sigs[order[root]].doc_id);
        }
    }
    return report;
}

DedupReport deduplicate(std::span<const CodeDocument> docs, const DedupConfig& cfg) {
    DedupReport report;
    std::vector<const CodeDocument*> survivors;
    if (cfg.exact) {
        report = exact_dedup(docs);
        for (const auto& d : docs) {
            if (report.kept.contains(d.id)) survivors.push_back(&d);
        }
    } else {
        for (const auto& d : docs) {
            survivors.push_back(&d);
            report.kept.insert(d.id);
        }
    }
    if (!cfg.near || survivors.empty()) return report;

    const MinHasher hasher(cfg.minhash);
    std::vector<MinHashSignature> sigs(survivors.size());
    parallel_for(survivors.size(), cfg.workers, [&](std::size_t i) { sigs[i] = hasher.sign(*survivors[i]); });

    auto near = near_dedup(sigs, cfg.lsh);
    report.near_pairs = std::move(near.near_pairs);
    for (auto& [id, reason] : near.dropped) {
        report.kept.erase(id);
        report.dropped.emplace(id, std::move(reason));
    }
    return report;
}

DedupReport repo_level_dedup(std::span<const RepoSnapshot> repos, const DocumentStore& docs,
                             const DedupConfig& cfg) {
    const MinHasher hasher(cfg.minhash);
    std::vector<MinHashSignature> sigs(repos.size());
    parallel_for(repos.size(), cfg.workers, [&](std::size_t i) {
        const auto& repo = repos[i];
        if (repo.documents.empty()) throw ConfigError("repository without documents: " + repo.repo_id);
        std::vector<std::uint64_t> all;
        for (const auto& id : repo.documents) {
            const auto sh = shingle_hashes(docs.at(id).content, cfg.minhash.shingle_width);
            all.insert(all.end(), sh.begin(), sh.end());
        }
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        sigs[i] = hasher.sign_shingles(repo.repo_id, all);
    });
    return near_dedup(sigs, cfg.lsh);
}

Json to_json(const DedupReport& report) {
    Json j;
    j["exact_groups"] = report.exact_groups;
    Json pairs = Json::array();
    for (const auto& p : report.near_pairs) pairs.push_back({{"a", p.first}, {"b", p.second}, {"estimated_jaccard", p.estimated_jaccard}});
    j["near_pairs"] = std::move(pairs);
    j["kept"] = report.kept;
    j["dropped"] = report.dropped;
    j["kept_count"] = report.kept.size();
    j["dropped_count"] = report.dropped.size();
    j["reduction"] = report.reduction();
    return j;
}

}  // namespace curator::dedup
