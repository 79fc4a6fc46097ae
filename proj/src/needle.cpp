#include "curator/needle.hpp"

#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>

#include <spdlog/spdlog.h>

#include "curator/errors.hpp"
#include "curator/hashing.hpp"
#include "curator/parallel.hpp"
#include "curator/rng.hpp"

namespace curator::needle {

namespace {

constexpr std::array kVerbs = {"compute", "load",  "parse",   "merge", "update", "render", "scale",     "filter",
                               "build",   "resolve", "encode", "fetch", "apply",  "check",  "normalize", "count"};
constexpr std::array kNouns = {"buffer", "record", "matrix",  "token", "config", "index", "window", "payload",
                               "vector", "cache",  "graph",   "node",  "stream", "frame", "batch",  "queue"};
constexpr std::array kParams = {"items", "values", "data", "limit", "offset", "scale", "rows", "weights", "source", "size"};

template <std::size_t N>
const char* pick(const std::array<const char*, N>& a, Rng& rng) {
    return a[rng.below(N)];
}

std::string hex(std::uint64_t v, int digits) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s(static_cast<std::size_t>(digits), '0');
    for (int i = digits - 1; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 15];
    return s;
}

std::string filler(const std::string& name, Rng& rng) {
    const std::string a = pick(kParams, rng);
    std::string b = pick(kParams, rng);
    if (b == a) b += "_2";
    const auto k = 2 + rng.below(97);
    const auto k2 = 1 + rng.below(50);
    switch (rng.below(5)) {
        case 0:
            return fmt::format("def {}({}, {}):\n    total = 0\n    for item in {}:\n        total += item * {}\n"
                               "    return total + {}\n",
                               name, a, b, a, k, b);
        case 1:
            return fmt::format("def {}({}):\n    result = []\n    for value in {}:\n        if value % {} == 0:\n"
                               "            result.append(value)\n    return result\n",
                               name, a, a, k);
        case 2:
            return fmt::format("def {}({}, {}={}):\n    if {} is None:\n        return {}\n    return {} * {} - {}\n",
                               name, a, b, k, a, b, a, b, k2);
        case 3:
            return fmt::format("def {}({}):\n    mapping = {{}}\n    for key, value in {}.items():\n"
                               "        mapping[value] = key\n    return mapping\n",
                               name, a, a);
        default:
            return fmt::format("def {}({}, {}):\n    \"\"\"Clamp {} to a window starting at {}.\"\"\"\n"
                               "    low, high = {}, {} + {}\n    return max(low, min({}, high))\n",
                               name, a, b, a, b, b, b, k, a);
    }
}

std::uint64_t case_seed(std::size_t length, double depth, std::uint64_t seed) {
    return mix64(seed ^ mix64(static_cast<std::uint64_t>(length) ^ mix64(std::bit_cast<std::uint64_t>(depth))));
}

}  // namespace

std::string NeedleCase::prompt() const {
    return "Below is a Python source file.\n\n```python\n" + haystack + "```\n\nQuestion: " + query +
           "\nAnswer with the exact value only.\n";
}

NeedleCase generate_case(std::size_t length, double depth, std::uint64_t seed) {
    if (!(depth >= 0.0 && depth <= 1.0)) throw ConfigError("needle depth must lie in [0, 1]");
    Rng rng(case_seed(length, depth, seed));

    NeedleCase c;
    c.depth = depth;
    c.needle_name = fmt::format("secret_{}_{}", pick(kNouns, rng), hex(rng.next(), 6));
    c.expected = "kx-" + hex(rng.next(), 16);
    c.needle = fmt::format("def {}():\n    \"\"\"Return the deployment key.\"\"\"\n    return \"{}\"\n", c.needle_name,
                           c.expected);
    c.query = fmt::format("What string does the function `{}` return?", c.needle_name);
    if (length < c.needle.size()) {
        throw ConfigError(fmt::format("length {} is shorter than the needle ({} chars)", length, c.needle.size()));
    }

    std::vector<std::string> fillers;
    std::set<std::string> names{c.needle_name};
    std::size_t total = c.needle.size();
    while (total < length) {
        std::string name = fmt::format("{}_{}_{}", pick(kVerbs, rng), pick(kNouns, rng), hex(rng.below(1u << 16), 4));
        if (!names.insert(name).second) continue;
        std::string f = filler(name, rng);
        if (f.find(c.expected) != std::string::npos || f.find(c.needle_name) != std::string::npos) continue;
        total += f.size() + 1;  // blank line separator
        fillers.push_back(std::move(f));
    }

    c.position = static_cast<std::size_t>(std::llround(depth * static_cast<double>(fillers.size())));
    c.functions = fillers.size() + 1;
    for (std::size_t i = 0; i <= fillers.size(); ++i) {
        if (i) c.haystack += '\n';
        if (i == c.position) {
            c.needle_offset = c.haystack.size();
            c.haystack += c.needle;
        }
        if (i < fillers.size()) {
            if (i == c.position) c.haystack += '\n';
            c.haystack += fillers[i];
        }
    }
    return c;
}

std::string normalize_answer(std::string_view text) {
    std::string out;
    bool space = false;
    for (char ch : text) {
        if (ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v') {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += (ch >= 'A' && ch <= 'Z') ? static_cast<char>(ch - 'A' + 'a') : ch;
    }
    return out;
}

int grade(const NeedleCase& c, std::string_view answer) {
    return normalize_answer(answer).find(normalize_answer(c.expected)) != std::string::npos ? 1 : 0;
}

std::string OracleBackend::complete(const std::string& prompt) {
    const std::string marker = "function `";
    const auto q = prompt.rfind(marker);
    if (q == std::string::npos) return "no idea";
    const auto end = prompt.find('`', q + marker.size());
    if (end == std::string::npos) return "no idea";
    const std::string name = prompt.substr(q + marker.size(), end - q - marker.size());
    const auto def = prompt.find("def " + name + "(");
    if (def == std::string::npos) return "no idea";
    const auto ret = prompt.find("return ", def);
    if (ret == std::string::npos) return "no idea";
    const auto eol = prompt.find('\n', ret);
    std::string value = prompt.substr(ret + 7, eol == std::string::npos ? std::string::npos : eol - ret - 7);
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
        value = value.substr(1, value.size() - 2);
    }
    return value;
}

std::string CoinBackend::complete(const std::string& prompt) {
    if (mix64(murmur3_64(prompt) ^ seed_) & 1u) return oracle_.complete(prompt);
    return "no idea";
}

NeedleMatrix run_matrix(oracle::CompletionClient& backend, const MatrixOptions& opts) {
    if (opts.lengths.empty() || opts.depths.empty()) throw ConfigError("needle matrix needs lengths and depths");
    if (opts.trials == 0) throw ConfigError("needle matrix needs at least one trial");
    NeedleMatrix m;
    m.backend = backend.name();
    m.lengths = opts.lengths;
    m.depths = opts.depths;
    m.trials = opts.trials;
    const std::size_t nd = opts.depths.size();
    const std::size_t cells = opts.lengths.size() * nd;
    std::vector<int> scores(cells * opts.trials, 0);
    std::atomic<std::size_t> failures{0};
    parallel_for(scores.size(), opts.workers, [&](std::size_t task) {
        const std::size_t cell = task / opts.trials;
        const std::size_t trial = task % opts.trials;
        const NeedleCase c = generate_case(opts.lengths[cell / nd], opts.depths[cell % nd], mix64(opts.seed + trial));
        try {
            const auto response = oracle::query_oracle(c.prompt(), backend, opts.retry);
            scores[task] = grade(c, response.text);
        } catch (const std::exception& e) {
            ++failures;
            spdlog::warn("needle: backend failed (length {}, depth {}, trial {}): {}", c.haystack.size(), c.depth, trial,
                         e.what());
        }
    });
    m.backend_failures = failures.load();
    m.cells.assign(opts.lengths.size(), std::vector<double>(nd, 0.0));
    for (std::size_t cell = 0; cell < cells; ++cell) {
        long sum = 0;
        for (std::size_t t = 0; t < opts.trials; ++t) sum += scores[cell * opts.trials + t];
        m.cells[cell / nd][cell % nd] = static_cast<double>(sum) / static_cast<double>(opts.trials);
    }
    return m;
}

void write_csv(const NeedleMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "length";
    for (double d : m.depths) out << ',' << fmt::format("{:g}", d);
    out << '\n';
    for (std::size_t i = 0; i < m.lengths.size(); ++i) {
        out << m.lengths[i];
        for (double v : m.cells[i]) out << ',' << fmt::format("{:.4f}", v);
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_ppm(const NeedleMatrix& m, const std::filesystem::path& path, std::size_t cell_pixels) {
    if (cell_pixels == 0) throw ConfigError("cell size must be positive");
    const std::size_t w = m.depths.size() * cell_pixels;
    const std::size_t h = m.lengths.size() * cell_pixels;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P6\n" << w << ' ' << h << "\n255\n";
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double v = std::clamp(m.cells[y / cell_pixels][x / cell_pixels], 0.0, 1.0);
            const unsigned char px[3] = {static_cast<unsigned char>(std::lround((1.0 - v) * 220)),
                                         static_cast<unsigned char>(std::lround(v * 200)), 60};
            out.write(reinterpret_cast<const char*>(px), 3);
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace curator::needle
