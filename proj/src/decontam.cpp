#include "curator/decontam.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include <spdlog/spdlog.h>

#include "curator/errors.hpp"
#include "curator/parallel.hpp"
#include "curator/text.hpp"

namespace curator::decontam {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'C', 'R', 'N', 'X'};
constexpr std::uint32_t kVersion = 1;

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string item_text(const Json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (!j.is_object()) throw ConfigError("benchmark record is neither a string nor an object");
    if (auto it = j.find("text"); it != j.end() && it->is_string()) return it->get<std::string>();
    std::string out;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_string()) continue;
        if (!out.empty()) out += '\n';
        out += value.get<std::string>();
    }
    return out;
}

void load_file(const fs::path& file, const std::string& benchmark, const std::string& prefix,
               std::vector<BenchmarkItem>& out) {
    const std::string content = read_file(file);
    if (file.extension() != ".jsonl") {
        out.push_back({benchmark, prefix + file.filename().string(), content});
        return;
    }
    std::size_t pos = 0, line_no = 0;
    while (pos < content.size()) {
        auto end = content.find('\n', pos);
        if (end == std::string::npos) end = content.size();
        const std::string line = content.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::exception& e) {
            throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back({benchmark, prefix + file.filename().string() + ":" + std::to_string(line_no), item_text(j)});
    }
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename().string().starts_with(".")) continue;
        entries.push_back(e.path());
    }
    std::sort(entries.begin(), entries.end());
    return entries;
}

template <typename T>
void put(std::ostream& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.write(buf, sizeof(T));
}

void put_string(std::ostream& out, const std::string& s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& in) {
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T))) throw IoError("truncated index file");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

std::string get_string(std::istream& in) {
    const auto n = get<std::uint32_t>(in);
    std::string s(n, '\0');
    if (n && !in.read(s.data(), n)) throw IoError("truncated index file");
    return s;
}

}  // namespace

std::vector<BenchmarkItem> load_benchmarks(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ConfigError("benchmark directory not found: " + dir.string());
    std::vector<BenchmarkItem> items;
    for (const auto& entry : sorted_entries(dir)) {
        if (fs::is_directory(entry)) {
            const std::string benchmark = entry.filename().string();
            std::vector<fs::path> files;
            for (const auto& e : fs::recursive_directory_iterator(entry)) {
                if (e.is_regular_file() && !e.path().filename().string().starts_with(".")) files.push_back(e.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                const auto rel_dir = fs::relative(f.parent_path(), entry).generic_string();
                load_file(f, benchmark, rel_dir == "." ? "" : rel_dir + "/", items);
            }
        } else if (fs::is_regular_file(entry)) {
            load_file(entry, entry.stem().string(), "", items);
        }
    }
    return items;
}

std::string gram_key(std::span<const std::string> words) {
    std::string key;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) key += ' ';
        key += words[i];
    }
    return key;
}

NgramIndex::NgramIndex(std::size_t n, std::uint64_t seed, bool exact) : n_(n), seed_(seed), exact_(exact) {
    if (n == 0) throw ConfigError("n-gram order must be >= 1");
}

std::uint32_t NgramIndex::source_id(const SourceRef& ref) {
    auto [it, inserted] =
        source_index_.emplace(std::make_pair(ref.benchmark, ref.item_id), static_cast<std::uint32_t>(sources_.size()));
    if (inserted) sources_.push_back(ref);
    return it->second;
}

void NgramIndex::insert(std::span<const std::string> words, std::uint32_t source) {
    const std::string key = gram_key(words);
    if (exact_) {
        strings_.emplace(key, source);
    } else {
        hashes_.emplace(murmur3_128(key, seed_), source);
    }
}

void NgramIndex::add_item(const BenchmarkItem& item) {
    const auto words = text::normalized_words(item.text);
    ++manifest_[item.benchmark];
    if (words.empty()) {
        spdlog::warn("decontam: item {}/{} has no words; nothing indexed", item.benchmark, item.item_id);
        return;
    }
    const SourceRef ref{item.benchmark, item.item_id};
    const std::uint32_t source = source_id(ref);
    const std::span<const std::string> all(words);
    if (words.size() < n_) {
        short_items_.push_back(ref);
        short_lengths_.insert(words.size());
        insert(all, source);
        return;
    }
    for (std::size_t i = 0; i + n_ <= words.size(); ++i) insert(all.subspan(i, n_), source);
}

const SourceRef* NgramIndex::lookup(std::span<const std::string> words) const {
    const std::string key = gram_key(words);
    if (exact_) {
        auto it = strings_.find(key);
        return it == strings_.end() ? nullptr : &sources_[it->second];
    }
    auto it = hashes_.find(murmur3_128(key, seed_));
    return it == hashes_.end() ? nullptr : &sources_[it->second];
}

void NgramIndex::save(const fs::path& path) const {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(kMagic, 4);
        put<std::uint32_t>(out, kVersion);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(n_));
        put<std::uint64_t>(out, seed_);
        put<std::uint8_t>(out, exact_ ? 1 : 0);
        Json manifest = {{"algorithm", algorithm()}, {"n", n_}, {"seed", seed_}, {"benchmarks", manifest_}};
        put_string(out, manifest.dump());
        put<std::uint32_t>(out, static_cast<std::uint32_t>(sources_.size()));
        for (const auto& s : sources_) {
            put_string(out, s.benchmark);
            put_string(out, s.item_id);
        }
        put<std::uint32_t>(out, static_cast<std::uint32_t>(short_items_.size()));
        for (const auto& s : short_items_) put<std::uint32_t>(out, source_index_.at({s.benchmark, s.item_id}));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(short_lengths_.size()));
        for (auto len : short_lengths_) put<std::uint32_t>(out, static_cast<std::uint32_t>(len));
        put<std::uint64_t>(out, size());
        if (exact_) {
            std::vector<std::pair<std::string, std::uint32_t>> entries(strings_.begin(), strings_.end());
            std::sort(entries.begin(), entries.end());
            for (const auto& [key, src] : entries) {
                put_string(out, key);
                put<std::uint32_t>(out, src);
            }
        } else {
            std::vector<std::pair<Hash128, std::uint32_t>> entries(hashes_.begin(), hashes_.end());
            std::sort(entries.begin(), entries.end());
            for (const auto& [h, src] : entries) {
                put<std::uint64_t>(out, h.hi);
                put<std::uint64_t>(out, h.lo);
                put<std::uint32_t>(out, src);
            }
        }
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

NgramIndex NgramIndex::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw IoError(path.string() + ": not an n-gram index");
    if (get<std::uint32_t>(in) != kVersion) throw IoError(path.string() + ": unsupported index version");
    const auto n = get<std::uint32_t>(in);
    const auto seed = get<std::uint64_t>(in);
    const bool exact = get<std::uint8_t>(in) != 0;
    NgramIndex index(n, seed, exact);
    const Json manifest = Json::parse(get_string(in));
    index.manifest_ = manifest.at("benchmarks").get<std::map<std::string, std::size_t>>();
    const auto nsources = get<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < nsources; ++i) {
        SourceRef ref;
        ref.benchmark = get_string(in);
        ref.item_id = get_string(in);
        index.source_id(ref);
    }
    auto checked = [&](std::uint32_t src) {
        if (src >= index.sources_.size()) throw IoError(path.string() + ": corrupt source reference");
        return src;
    };
    const auto nshort = get<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < nshort; ++i) index.short_items_.push_back(index.sources_[checked(get<std::uint32_t>(in))]);
    const auto nlengths = get<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < nlengths; ++i) index.short_lengths_.insert(get<std::uint32_t>(in));
    const auto count = get<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < count; ++i) {
        if (exact) {
            std::string key = get_string(in);
            index.strings_.emplace(std::move(key), checked(get<std::uint32_t>(in)));
        } else {
            Hash128 h;
            h.hi = get<std::uint64_t>(in);
            h.lo = get<std::uint64_t>(in);
            index.hashes_.emplace(h, checked(get<std::uint32_t>(in)));
        }
    }
    return index;
}

NgramIndex build_index(std::span<const BenchmarkItem> items, const IndexOptions& opts) {
    NgramIndex index(opts.n, opts.seed, opts.exact);
    std::vector<const BenchmarkItem*> order;
    for (const auto& item : items) order.push_back(&item);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
        return std::tie(a->benchmark, a->item_id) < std::tie(b->benchmark, b->item_id);
    });
    for (const auto* item : order) index.add_item(*item);
    if (!index.short_items().empty()) {
        spdlog::warn("decontam: {} item(s) shorter than {} words indexed whole", index.short_items().size(), opts.n);
    }
    return index;
}

std::optional<Removal> first_match(const std::string& doc_id, std::string_view content, const NgramIndex& index) {
    if (index.empty()) return std::nullopt;
    const auto words = text::normalized_words(content);
    const std::span<const std::string> all(words);
    for (std::size_t i = 0; i < words.size(); ++i) {
        auto probe = [&](std::size_t len) -> std::optional<Removal> {
            if (i + len > words.size()) return std::nullopt;
            if (const SourceRef* src = index.lookup(all.subspan(i, len))) {
                return Removal{doc_id, *src, gram_key(all.subspan(i, len))};
            }
            return std::nullopt;
        };
        if (auto r = probe(index.n())) return r;
        for (auto it = index.short_lengths().rbegin(); it != index.short_lengths().rend(); ++it) {
            if (auto r = probe(*it)) return r;
        }
    }
    return std::nullopt;
}

ScrubResult scrub(std::span<const CodeDocument> docs, const NgramIndex& index, unsigned workers) {
    std::vector<std::optional<Removal>> matches(docs.size());
    parallel_for(docs.size(), workers, [&](std::size_t i) { matches[i] = first_match(docs[i].id, docs[i].content, index); });
    ScrubResult result;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (matches[i]) {
            result.removed.push_back(std::move(*matches[i]));
        } else {
            result.kept.push_back(docs[i].id);
        }
    }
    return result;
}

Json to_json(const ScrubResult& result) {
    Json removed = Json::array();
    for (const auto& r : result.removed) {
        removed.push_back({{"id", r.doc_id}, {"benchmark", r.source.benchmark}, {"item", r.source.item_id}, {"gram", r.gram}});
    }
    return {{"kept", result.kept.size()}, {"removed_count", result.removed.size()}, {"removed", removed}};
}

}  // namespace curator::decontam
