#include "curator/text.hpp"

#include <algorithm>

namespace curator::text {

namespace {

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Decodes one code point at s[i]; returns its byte length (1 for stray bytes).
std::size_t decode(std::string_view s, std::size_t i, char32_t& cp) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c < 0x80) {
        cp = c;
        return 1;
    }
    if ((c & 0xE0) == 0xC0) {
        len = 2;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        len = 3;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        len = 4;
        cp = c & 0x07;
    } else {
        cp = 0xFFFD;
        return 1;
    }
    if (i + len > s.size()) {
        cp = 0xFFFD;
        return 1;
    }
    for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    return len;
}

bool is_unicode_space(char32_t cp) {
    if (cp < 0x80) return is_ascii_space(static_cast<unsigned char>(cp));
    switch (cp) {
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

}  // namespace

bool is_valid_utf8(std::string_view s) noexcept {
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (c < 0x80) {
            ++i;
            continue;
        }
        std::size_t len;
        char32_t cp;
        if (c >= 0xC2 && c <= 0xDF) {
            len = 2;
            cp = c & 0x1F;
        } else if (c >= 0xE0 && c <= 0xEF) {
            len = 3;
            cp = c & 0x0F;
        } else if (c >= 0xF0 && c <= 0xF4) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, out of range
        if ((len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
            (cp >= 0xD800 && cp <= 0xDFFF))
            return false;
        i += len;
    }
    return true;
}

std::vector<std::size_t> codepoint_offsets(std::string_view s) {
    std::vector<std::size_t> out;
    out.reserve(s.size() + 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) out.push_back(i);
    }
    out.push_back(s.size());
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) {
        if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        while (i < n && is_ascii_space(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < n && !is_ascii_space(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::vector<std::string> lower_words(std::string_view s) {
    std::vector<std::string> out;
    for (auto w : split_ws(s)) out.push_back(ascii_lower(w));
    return out;
}

std::vector<std::string> normalized_words(std::string_view s) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        std::size_t b = 0;
        std::size_t e = current.size();
        // non-ASCII bytes have the high bit set and are kept as alphanumeric
        auto strip = [](unsigned char c) { return c < 0x80 && !is_ascii_alnum(c); };
        while (b < e && strip(static_cast<unsigned char>(current[b]))) ++b;
        while (e > b && strip(static_cast<unsigned char>(current[e - 1]))) --e;
        if (e > b) out.push_back(ascii_lower(std::string_view(current).substr(b, e - b)));
        current.clear();
    };
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t cp;
        const std::size_t len = decode(s, i, cp);
        if (is_unicode_space(cp)) {
            flush();
        } else {
            current.append(s.substr(i, len));
        }
        i += len;
    }
    flush();
    return out;
}

std::size_t word_count(std::string_view s) {
    std::size_t count = 0;
    bool in_word = false;
    for (char ch : s) {
        const bool space = is_ascii_space(static_cast<unsigned char>(ch));
        if (!space && !in_word) ++count;
        in_word = !space;
    }
    return count;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep, std::size_t first,
                 std::size_t count) {
    std::string out;
    const std::size_t end = count == std::string::npos ? parts.size() : std::min(parts.size(), first + count);
    for (std::size_t i = first; i < end; ++i) {
        if (i > first) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

std::string to_hex(const unsigned char* data, std::size_t n) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(n * 2, '0');
    for (std::size_t i = 0; i < n; ++i) {
        out[2 * i] = digits[data[i] >> 4];
        out[2 * i + 1] = digits[data[i] & 0xF];
    }
    return out;
}

}  // namespace curator::text
