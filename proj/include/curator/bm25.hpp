#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace curator {

struct SourceFile {
    std::string path;
    std::string content;

    friend bool operator==(const SourceFile&, const SourceFile&) = default;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

struct RankedFile {
    std::string path;
    double score = 0.0;
};

/// Okapi BM25 over lowercase whitespace tokens with the non-negative IDF
/// ln((N - n + 0.5) / (n + 0.5) + 1). Corpus statistics are fixed at
/// construction; scoring is read-only.
class Bm25Index {
public:
    explicit Bm25Index(const std::vector<SourceFile>& files, Bm25Params params = {});

    /// Sum over query tokens (repeats included) of idf * tf*(k1+1) / (tf + k1*(1-b+b*dl/avgdl)).
    std::vector<double> scores(std::string_view query) const;
    double idf(const std::string& term) const;

    std::size_t size() const noexcept { return doc_len_.size(); }
    double average_length() const noexcept { return avgdl_; }

private:
    Bm25Params params_;
    std::vector<std::unordered_map<std::string, std::size_t>> tf_;
    std::vector<std::size_t> doc_len_;
    std::unordered_map<std::string, std::size_t> df_;
    double avgdl_ = 0.0;
};

/// Top-k files by descending score, ties by path. k must be >= 1.
std::vector<RankedFile> bm25_rank(std::string_view query, const std::vector<SourceFile>& files, std::size_t k,
                                  Bm25Params params = {});

}  // namespace curator
