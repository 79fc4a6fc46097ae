#include "curator/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "curator/errors.hpp"
#include "curator/hashing.hpp"
#include "curator/text.hpp"

namespace curator {

SparseVector featurize(std::string_view text, const HashingConfig& cfg) {
    if (cfg.bucket_bits == 0 || cfg.bucket_bits > 30) throw ConfigError("bucket_bits must lie in [1, 30]");
    const auto words = text::lower_words(text);
    const std::uint64_t mask = cfg.buckets() - 1;
    std::vector<std::uint32_t> hits;
    std::string buf;
    for (std::uint32_t order : cfg.orders) {
        if (order == 0) throw ConfigError("n-gram order must be >= 1");
        for (std::size_t i = 0; i + order <= words.size(); ++i) {
            buf.clear();
            for (std::uint32_t k = 0; k < order; ++k) {
                if (k) buf += ' ';
                buf += words[i + k];
            }
            hits.push_back(static_cast<std::uint32_t>(murmur3_64(buf, cfg.seed + order) & mask));
        }
    }
    std::sort(hits.begin(), hits.end());
    SparseVector v;
    for (std::size_t i = 0; i < hits.size();) {
        std::size_t j = i;
        while (j < hits.size() && hits[j] == hits[i]) ++j;
        v.index.push_back(hits[i]);
        v.value.push_back(static_cast<double>(j - i));
        i = j;
    }
    double norm = 0.0;
    for (double x : v.value) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v.value) x /= norm;
    }
    return v;
}

double LinearModel::dot(const SparseVector& x) const {
    double s = bias;
    for (std::size_t i = 0; i < x.index.size(); ++i) s += weights[x.index[i]] * x.value[i];
    return s;
}

namespace {

constexpr char kMagic[4] = {'C', 'R', 'L', 'M'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in, const std::string& what) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw IoError("truncated model file while reading " + what);
    return v;
}

}  // namespace

void save_linear_model(const std::filesystem::path& path, ModelKind kind, const LinearModel& model,
                       const Json& metadata) {
    if (model.weights.size() != model.hashing.buckets()) throw ConfigError("weight vector does not match hashing config");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path.string());
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, static_cast<std::uint8_t>(kind));
    put(out, model.hashing.bucket_bits);
    put(out, static_cast<std::uint32_t>(model.hashing.orders.size()));
    for (auto o : model.hashing.orders) put(out, o);
    put(out, model.hashing.seed);
    put(out, model.bias);
    std::uint64_t nnz = 0;
    for (double w : model.weights) nnz += w != 0.0;
    put(out, nnz);
    for (std::uint32_t i = 0; i < model.weights.size(); ++i) {
        if (model.weights[i] != 0.0) {
            put(out, i);
            put(out, model.weights[i]);
        }
    }
    const std::string meta = metadata.dump();
    put(out, static_cast<std::uint64_t>(meta.size()));
    out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

LoadedModel load_linear_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw IoError(path.string() + ": not a model file");
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kVersion) throw IoError(path.string() + ": unsupported model version " + std::to_string(version));

    LoadedModel m;
    m.kind = static_cast<ModelKind>(get<std::uint8_t>(in, "kind"));
    m.model.hashing.bucket_bits = get<std::uint32_t>(in, "bucket_bits");
    if (m.model.hashing.bucket_bits == 0 || m.model.hashing.bucket_bits > 30) throw IoError("bad bucket_bits");
    const auto norders = get<std::uint32_t>(in, "orders");
    m.model.hashing.orders.clear();
    for (std::uint32_t i = 0; i < norders; ++i) m.model.hashing.orders.push_back(get<std::uint32_t>(in, "order"));
    m.model.hashing.seed = get<std::uint64_t>(in, "seed");
    m.model.bias = get<double>(in, "bias");
    m.model.weights.assign(m.model.hashing.buckets(), 0.0);
    const auto nnz = get<std::uint64_t>(in, "nnz");
    for (std::uint64_t k = 0; k < nnz; ++k) {
        const auto i = get<std::uint32_t>(in, "index");
        const auto w = get<double>(in, "weight");
        if (i >= m.model.weights.size()) throw IoError("weight index out of range");
        m.model.weights[i] = w;
    }
    const auto len = get<std::uint64_t>(in, "metadata length");
    std::string meta(len, '\0');
    in.read(meta.data(), static_cast<std::streamsize>(len));
    if (!in) throw IoError("truncated model metadata");
    m.metadata = Json::parse(meta);
    return m;
}

}  // namespace curator
