#pragma once

// Brute-force reference implementations used to check the library. They are
// written from the definitions, share no code with src/, and favour clarity
// over speed.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace oracle_ref {

inline std::vector<std::string> ws_split_lower(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string w;
    while (in >> w) {
        for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(w);
    }
    return out;
}

// Word shingle set; fewer than w words gives the single whole-content shingle.
inline std::set<std::string> shingle_set(const std::string& text, std::size_t w) {
    const auto words = ws_split_lower(text);
    std::set<std::string> out;
    auto join = [&](std::size_t from, std::size_t count) {
        std::string s;
        for (std::size_t i = 0; i < count; ++i) s += (i ? " " : "") + words[from + i];
        return s;
    };
    if (words.size() < w) {
        out.insert(join(0, words.size()));
        return out;
    }
    for (std::size_t i = 0; i + w <= words.size(); ++i) out.insert(join(i, w));
    return out;
}

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

// Okapi BM25, IDF = ln((N - n + 0.5)/(n + 0.5) + 1), summed over query tokens.
inline std::vector<double> bm25(const std::string& query, const std::vector<std::string>& docs, double k1 = 1.2,
                                double b = 0.75) {
    std::vector<std::vector<std::string>> toks;
    double total = 0;
    for (const auto& d : docs) {
        toks.push_back(ws_split_lower(d));
        total += static_cast<double>(toks.back().size());
    }
    const double N = static_cast<double>(docs.size());
    const double avgdl = total / N;
    std::vector<double> out(docs.size(), 0.0);
    for (const auto& q : ws_split_lower(query)) {
        double n = 0;
        for (const auto& t : toks) n += std::count(t.begin(), t.end(), q) > 0 ? 1 : 0;
        const double idf = std::log((N - n + 0.5) / (n + 0.5) + 1.0);
        for (std::size_t d = 0; d < docs.size(); ++d) {
            const double f = static_cast<double>(std::count(toks[d].begin(), toks[d].end(), q));
            const double dl = static_cast<double>(toks[d].size());
            out[d] += idf * f * (k1 + 1) / (f + k1 * (1 - b + b * dl / avgdl));
        }
    }
    return out;
}

// Class-averaged and overall mean absolute error on the 0..10 scale. Empty
// classes are skipped and the class average renormalized.
inline std::pair<double, double> eps_errors(const std::vector<int>& labels, const std::vector<double>& preds) {
    double cmae = 0;
    int populated = 0;
    for (int i = 0; i <= 10; ++i) {
        double sum = 0;
        int count = 0;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] != i) continue;
            sum += std::fabs(preds[j] - i);
            ++count;
        }
        if (count == 0) continue;
        cmae += sum / count;
        ++populated;
    }
    double mae = 0;
    for (std::size_t j = 0; j < labels.size(); ++j) mae += std::fabs(preds[j] - labels[j]);
    return {cmae / populated, mae / static_cast<double>(labels.size())};
}

using Edge = std::pair<std::string, std::string>;

// reach[u][v]: v reachable from u through importer -> imported edges.
inline std::map<std::string, std::set<std::string>> reachability(const std::vector<std::string>& nodes,
                                                                  const std::vector<Edge>& edges) {
    std::map<std::string, std::set<std::string>> reach;
    for (const auto& n : nodes) reach[n];
    for (const auto& [u, v] : edges) reach[u].insert(v);
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [u, rs] : reach) {
            std::set<std::string> add;
            for (const auto& v : rs) {
                for (const auto& w : reach[v]) {
                    if (!rs.contains(w)) add.insert(w);
                }
            }
            if (!add.empty()) {
                rs.insert(add.begin(), add.end());
                changed = true;
            }
        }
    }
    return reach;
}

// Every edge u->v between files of `order` must have v before u unless u and v
// lie on a common cycle.
inline bool topo_valid(const std::vector<std::string>& order, const std::vector<std::string>& nodes,
                       const std::vector<Edge>& edges) {
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    const auto reach = reachability(nodes, edges);
    for (const auto& [u, v] : edges) {
        if (!pos.contains(u) || !pos.contains(v)) continue;
        const bool cyclic = reach.at(u).contains(v) && reach.at(v).contains(u);
        if (!cyclic && pos[v] > pos[u]) return false;
    }
    return true;
}

// Minimum crossing-edge count over every proper non-empty subset of size <= cap.
inline std::size_t exhaustive_min_cut(const std::vector<std::string>& nodes, const std::vector<Edge>& edges,
                                      const std::map<std::string, std::size_t>& sizes, std::size_t cap) {
    const std::size_t n = nodes.size();
    std::size_t best = SIZE_MAX;
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        std::set<std::string> side;
        std::size_t size = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1u) {
                side.insert(nodes[i]);
                size += sizes.at(nodes[i]);
            }
        }
        if (size > cap) continue;
        std::size_t crossing = 0;
        for (const auto& [u, v] : edges) crossing += side.contains(u) != side.contains(v);
        best = std::min(best, crossing);
    }
    return best;
}

// Decontamination words: whitespace split, lowercase, strip non-alphanumeric
// ASCII from both ends, drop empties. (Test corpora are ASCII.)
inline std::vector<std::string> decontam_words(const std::string& text) {
    std::vector<std::string> out;
    for (auto w : ws_split_lower(text)) {
        std::size_t b = 0, e = w.size();
        while (b < e && !std::isalnum(static_cast<unsigned char>(w[b]))) ++b;
        while (e > b && !std::isalnum(static_cast<unsigned char>(w[e - 1]))) --e;
        if (e > b) out.push_back(w.substr(b, e - b));
    }
    return out;
}

inline std::set<std::string> grams_of_length(const std::vector<std::string>& words, std::size_t n) {
    std::set<std::string> out;
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
        std::string g;
        for (std::size_t k = 0; k < n; ++k) g += (k ? " " : "") + words[i + k];
        out.insert(g);
    }
    return out;
}

// Documents sharing any benchmark gram. A benchmark item shorter than n words
// contributes its whole word sequence.
inline std::set<std::size_t> contaminated(const std::vector<std::string>& docs, const std::vector<std::string>& items,
                                          std::size_t n) {
    std::set<std::string> bench;
    std::set<std::size_t> short_lengths;
    for (const auto& item : items) {
        const auto w = decontam_words(item);
        if (w.empty()) continue;
        if (w.size() < n) {
            short_lengths.insert(w.size());
            const auto g = grams_of_length(w, w.size());
            bench.insert(g.begin(), g.end());
        } else {
            const auto g = grams_of_length(w, n);
            bench.insert(g.begin(), g.end());
        }
    }
    std::set<std::size_t> out;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        const auto w = decontam_words(docs[d]);
        std::set<std::size_t> lengths = short_lengths;
        lengths.insert(n);
        for (auto len : lengths) {
            for (const auto& g : grams_of_length(w, len)) {
                if (bench.contains(g)) out.insert(d);
            }
        }
    }
    return out;
}

// Longest run of consecutive words shared by the two texts.
inline std::size_t longest_common_run(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t best = 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
            best = std::max(best, cur[j]);
        }
        std::swap(prev, cur);
    }
    return best;
}

inline std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t count = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++count;
    return count;
}

// Asymptotic Kolmogorov tail probability with the Stephens small-n correction.
inline double ks_p_value(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0, sign = 1;
    for (int k = 1; k <= 100; ++k) {
        sum += sign * std::exp(-2.0 * k * k * lambda * lambda);
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Max |F_emp - F| over the support {0..max} of an integer sample.
inline double ks_statistic(const std::vector<std::size_t>& sample, const std::vector<double>& cdf) {
    std::vector<std::size_t> counts(cdf.size(), 0);
    for (auto x : sample) ++counts.at(x);
    double emp = 0, d = 0;
    for (std::size_t x = 0; x < cdf.size(); ++x) {
        emp += static_cast<double>(counts[x]) / static_cast<double>(sample.size());
        d = std::max(d, std::fabs(emp - cdf[x]));
    }
    return d;
}

}  // namespace oracle_ref
