#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curator/document.hpp"
#include "curator/rng.hpp"

namespace curator::fim {

inline constexpr std::string_view kSuffixToken = "<[fim-suffix]>";
inline constexpr std::string_view kPrefixToken = "<[fim-prefix]>";
inline constexpr std::string_view kMiddleToken = "<[fim-middle]>";

enum class Mode { Spm, Psm };

Mode parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);

struct FimSample {
    std::string prefix;
    std::string middle;
    std::string suffix;

    friend bool operator==(const FimSample&, const FimSample&) = default;
};

/// Cut indices in code points, 0 <= i <= j <= length.
struct Cuts {
    std::size_t i = 0;
    std::size_t j = 0;
};

/// Uniform draw over all (length+1)(length+2)/2 ordered pairs.
Cuts draw_cuts(std::size_t length, Rng& rng);

/// Slices valid UTF-8 `content` at code-point indices. Throws ConfigError when
/// the cuts are out of order or out of range.
FimSample split_at(std::string_view content, Cuts cuts);

FimSample split_fim(std::string_view content, Rng& rng);

bool contains_sentinel(std::string_view text);

/// <[fim-suffix]>S<[fim-prefix]>P<[fim-middle]>M
std::string serialize_spm(const FimSample& s);
/// <[fim-prefix]>P<[fim-suffix]>S<[fim-middle]>M
std::string serialize_psm(const FimSample& s);
std::string serialize(const FimSample& s, Mode mode);

/// Inverse of serialize for sentinel-free segments. Throws Error when the
/// sentinels are missing, repeated or out of order.
FimSample deserialize(std::string_view text, Mode mode = Mode::Spm);

struct FimOptions {
    double ratio = 0.5;
    Mode mode = Mode::Spm;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

struct EmittedText {
    std::string doc_id;
    std::string text;
    bool fim = false;
    bool sentinel_collision = false;  // document contained a sentinel; emitted verbatim
};

/// Each document is transformed with probability `ratio` using an RNG derived
/// from (seed, doc id), so the output does not depend on scheduling. Output
/// order follows input order. Throws ConfigError for ratio outside [0, 1].
std::vector<EmittedText> emit_corpus(std::span<const CodeDocument> docs, const FimOptions& opts);

}  // namespace curator::fim
