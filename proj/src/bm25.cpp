#include "curator/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curator/errors.hpp"
#include "curator/text.hpp"

namespace curator {

Bm25Index::Bm25Index(const std::vector<SourceFile>& files, Bm25Params params) : params_(params) {
    std::size_t total = 0;
    tf_.reserve(files.size());
    for (const auto& f : files) {
        auto& counts = tf_.emplace_back();
        const auto words = text::lower_words(f.content);
        for (const auto& w : words) ++counts[w];
        for (const auto& [term, _] : counts) ++df_[term];
        doc_len_.push_back(words.size());
        total += words.size();
    }
    avgdl_ = files.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(files.size());
}

double Bm25Index::idf(const std::string& term) const {
    const double n = df_.contains(term) ? static_cast<double>(df_.at(term)) : 0.0;
    const double N = static_cast<double>(doc_len_.size());
    return std::log((N - n + 0.5) / (n + 0.5) + 1.0);
}

std::vector<double> Bm25Index::scores(std::string_view query) const {
    std::vector<double> out(doc_len_.size(), 0.0);
    for (const auto& term : text::lower_words(query)) {
        if (!df_.contains(term)) continue;
        const double w = idf(term);
        for (std::size_t d = 0; d < tf_.size(); ++d) {
            auto it = tf_[d].find(term);
            if (it == tf_[d].end()) continue;
            const double tf = static_cast<double>(it->second);
            const double norm = avgdl_ > 0.0 ? static_cast<double>(doc_len_[d]) / avgdl_ : 0.0;
            out[d] += w * tf * (params_.k1 + 1.0) / (tf + params_.k1 * (1.0 - params_.b + params_.b * norm));
        }
    }
    return out;
}

std::vector<RankedFile> bm25_rank(std::string_view query, const std::vector<SourceFile>& files, std::size_t k,
                                  Bm25Params params) {
    if (k < 1) throw ConfigError("bm25_rank: k must be >= 1");
    if (files.empty()) return {};
    const Bm25Index index(files, params);
    const auto scores = index.scores(query);
    std::vector<std::size_t> order(files.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return files[a].path < files[b].path;
    });
    order.resize(std::min(k, order.size()));
    std::vector<RankedFile> out;
    for (auto i : order) out.push_back({files[i].path, scores[i]});
    return out;
}

}  // namespace curator
