#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "curator/document.hpp"

namespace curator {

/// Hashed word n-gram featurization shared by the linear models.
struct HashingConfig {
    std::uint32_t bucket_bits = 20;
    std::vector<std::uint32_t> orders{1, 2};
    std::uint64_t seed = 0;

    std::size_t buckets() const { return std::size_t{1} << bucket_bits; }
    friend bool operator==(const HashingConfig&, const HashingConfig&) = default;
};

/// Index-sorted sparse vector without duplicate indices.
struct SparseVector {
    std::vector<std::uint32_t> index;
    std::vector<double> value;
};

/// Counts of hashed lowercase word n-grams, L2-normalized.
SparseVector featurize(std::string_view text, const HashingConfig& cfg);

/// Dense weights over hashed buckets plus a bias.
struct LinearModel {
    HashingConfig hashing;
    std::vector<double> weights;
    double bias = 0.0;

    double dot(const SparseVector& x) const;
    double dot(std::string_view text) const { return dot(featurize(text, hashing)); }
};

enum class ModelKind : std::uint8_t { QualityScorer = 1, Recall = 2 };

/// Binary layout: "CRLM", u32 version, u8 kind, hashing config, bias, sparse
/// weights, then a JSON metadata blob. Little-endian.
void save_linear_model(const std::filesystem::path& path, ModelKind kind, const LinearModel& model,
                       const Json& metadata);

struct LoadedModel {
    ModelKind kind;
    LinearModel model;
    Json metadata;
};

LoadedModel load_linear_model(const std::filesystem::path& path);

}  // namespace curator
