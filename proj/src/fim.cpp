#include "curator/fim.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "curator/errors.hpp"
#include "curator/hashing.hpp"
#include "curator/parallel.hpp"
#include "curator/text.hpp"

namespace curator::fim {

Mode parse_mode(std::string_view name) {
    if (name == "spm") return Mode::Spm;
    if (name == "psm") return Mode::Psm;
    throw ConfigError("unknown FIM mode: " + std::string(name));
}

std::string_view mode_name(Mode mode) { return mode == Mode::Spm ? "spm" : "psm"; }

Cuts draw_cuts(std::size_t length, Rng& rng) {
    // Pairs enumerated by j, then i: index t covers j(j+1)/2 + i.
    const std::uint64_t n = length + 1;
    const std::uint64_t total = n * (n + 1) / 2;
    const std::uint64_t t = rng.below(total);
    auto j = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(t) + 1.0) - 1.0) / 2.0);
    while (j * (j + 1) / 2 > t) --j;
    while ((j + 1) * (j + 2) / 2 <= t) ++j;
    return {static_cast<std::size_t>(t - j * (j + 1) / 2), static_cast<std::size_t>(j)};
}

FimSample split_at(std::string_view content, Cuts cuts) {
    const auto offsets = text::codepoint_offsets(content);
    const std::size_t length = offsets.size() - 1;
    if (cuts.i > cuts.j || cuts.j > length) {
        throw ConfigError("invalid FIM cuts (" + std::to_string(cuts.i) + ", " + std::to_string(cuts.j) +
                          ") for length " + std::to_string(length));
    }
    const std::size_t a = offsets[cuts.i];
    const std::size_t b = offsets[cuts.j];
    return {std::string(content.substr(0, a)), std::string(content.substr(a, b - a)), std::string(content.substr(b))};
}

FimSample split_fim(std::string_view content, Rng& rng) {
    const std::size_t length = text::codepoint_offsets(content).size() - 1;
    return split_at(content, draw_cuts(length, rng));
}

bool contains_sentinel(std::string_view text) {
    return text.find(kSuffixToken) != std::string_view::npos || text.find(kPrefixToken) != std::string_view::npos ||
           text.find(kMiddleToken) != std::string_view::npos;
}

std::string serialize_spm(const FimSample& s) {
    std::string out;
    out.reserve(s.prefix.size() + s.middle.size() + s.suffix.size() + 42);
    out.append(kSuffixToken).append(s.suffix);
    out.append(kPrefixToken).append(s.prefix);
    out.append(kMiddleToken).append(s.middle);
    return out;
}

std::string serialize_psm(const FimSample& s) {
    std::string out;
    out.reserve(s.prefix.size() + s.middle.size() + s.suffix.size() + 42);
    out.append(kPrefixToken).append(s.prefix);
    out.append(kSuffixToken).append(s.suffix);
    out.append(kMiddleToken).append(s.middle);
    return out;
}

std::string serialize(const FimSample& s, Mode mode) { return mode == Mode::Spm ? serialize_spm(s) : serialize_psm(s); }

FimSample deserialize(std::string_view text, Mode mode) {
    const std::string_view first = mode == Mode::Spm ? kSuffixToken : kPrefixToken;
    const std::string_view second = mode == Mode::Spm ? kPrefixToken : kSuffixToken;
    if (!text.starts_with(first)) throw Error("FIM text does not start with " + std::string(first));
    const auto p2 = text.find(second, first.size());
    if (p2 == std::string_view::npos) throw Error("FIM text lacks " + std::string(second));
    const auto p3 = text.find(kMiddleToken, p2 + second.size());
    if (p3 == std::string_view::npos) throw Error("FIM text lacks " + std::string(kMiddleToken));
    const std::string_view a = text.substr(first.size(), p2 - first.size());
    const std::string_view b = text.substr(p2 + second.size(), p3 - p2 - second.size());
    const std::string_view m = text.substr(p3 + kMiddleToken.size());
    if (contains_sentinel(a) || contains_sentinel(b) || contains_sentinel(m)) throw Error("repeated FIM sentinel");
    FimSample s;
    s.middle = m;
    if (mode == Mode::Spm) {
        s.suffix = a;
        s.prefix = b;
    } else {
        s.prefix = a;
        s.suffix = b;
    }
    return s;
}

std::vector<EmittedText> emit_corpus(std::span<const CodeDocument> docs, const FimOptions& opts) {
    if (!(opts.ratio >= 0.0 && opts.ratio <= 1.0)) throw ConfigError("FIM ratio must lie in [0, 1]");
    std::vector<EmittedText> out(docs.size());
    parallel_for(docs.size(), opts.workers, [&](std::size_t k) {
        const CodeDocument& doc = docs[k];
        EmittedText& e = out[k];
        e.doc_id = doc.id;
        Rng rng(derive_seed(opts.seed, doc.id));
        const bool selected = rng.bernoulli(opts.ratio);
        if (contains_sentinel(doc.content)) {
            e.text = doc.content;
            e.sentinel_collision = true;
            spdlog::warn("fim: {} contains a sentinel string; emitted verbatim", doc.id);
            return;
        }
        if (!selected) {
            e.text = doc.content;
            return;
        }
        e.text = serialize(split_fim(doc.content, rng), opts.mode);
        e.fim = true;
    });
    return out;
}

}  // namespace curator::fim
