#include "curator/recall.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "curator/errors.hpp"
#include "curator/parallel.hpp"
#include "curator/rng.hpp"

namespace curator::recall {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

RecallConfig config_from_json(const Json& j) {
    RecallConfig c;
    if (j.contains("bucket_bits")) c.hashing.bucket_bits = j["bucket_bits"].get<std::uint32_t>();
    if (j.contains("orders")) c.hashing.orders = j["orders"].get<std::vector<std::uint32_t>>();
    c.epochs = j.value("epochs", c.epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.seed = j.value("seed", c.seed);
    c.threshold = j.value("threshold", c.threshold);
    c.promotion_quantile = j.value("promotion_quantile", c.promotion_quantile);
    c.quality_cutoff = j.value("quality_cutoff", c.quality_cutoff);
    if (j.contains("category_thresholds")) c.category_thresholds = j["category_thresholds"].get<std::map<std::string, double>>();
    if (!std::isfinite(c.threshold)) throw ConfigError("recall threshold must be finite");
    return c;
}

Json to_json(const RecallConfig& c) {
    return Json{{"bucket_bits", c.hashing.bucket_bits}, {"orders", c.hashing.orders},
                {"epochs", c.epochs},                   {"learning_rate", c.learning_rate},
                {"seed", c.seed},                       {"threshold", c.threshold},
                {"promotion_quantile", c.promotion_quantile}, {"quality_cutoff", c.quality_cutoff},
                {"category_thresholds", c.category_thresholds}};
}

void TrainingPools::check_disjoint() const {
    std::unordered_set<std::string> seen;
    for (const auto* pool : {&positives, &random_negatives, &hard_negatives}) {
        std::unordered_set<std::string> local;
        for (const auto& id : *pool) {
            if (!local.insert(id).second) continue;
            if (!seen.insert(id).second) throw ConfigError("training pools overlap on " + id);
        }
    }
}

TrainingPools pools_from_json(const Json& j) {
    TrainingPools p;
    p.positives = j.value("positives", std::vector<std::string>{});
    p.random_negatives = j.value("random_negatives", std::vector<std::string>{});
    p.hard_negatives = j.value("hard_negatives", std::vector<std::string>{});
    return p;
}

Json to_json(const TrainingPools& p) {
    return Json{{"positives", p.positives}, {"random_negatives", p.random_negatives}, {"hard_negatives", p.hard_negatives}};
}

RecallModel::RecallModel(LinearModel model, int round, Json provenance)
    : model_(std::move(model)), round_(round), provenance_(std::move(provenance)) {
    if (round_ < 1) throw ConfigError("recall model round must be >= 1");
}

double RecallModel::score(std::string_view text) const { return sigmoid(logit(text)); }

void RecallModel::save(const std::filesystem::path& path) const {
    save_linear_model(path, ModelKind::Recall, model_, Json{{"round", round_}, {"provenance", provenance_}});
}

RecallModel RecallModel::load(const std::filesystem::path& path) {
    auto loaded = load_linear_model(path);
    if (loaded.kind != ModelKind::Recall) throw IoError(path.string() + ": not a recall model");
    return RecallModel(std::move(loaded.model), loaded.metadata.value("round", 1),
                       loaded.metadata.value("provenance", Json::object()));
}

RecallModel train_recall(const TrainingPools& pools, const DocumentStore& docs, const RecallConfig& cfg, int round) {
    if (pools.positives.empty()) throw ConfigError("train_recall: positive pool is empty");
    if (pools.random_negatives.empty()) throw ConfigError("train_recall: random negative pool is empty");
    pools.check_disjoint();

    struct Example {
        const std::string* id;
        double label;
        SparseVector x;
    };
    std::vector<Example> examples;
    auto add = [&](const std::vector<std::string>& ids, double label) {
        for (const auto& id : ids) examples.push_back({&id, label, featurize(docs.at(id).content, cfg.hashing)});
    };
    add(pools.positives, 1.0);
    add(pools.random_negatives, 0.0);
    add(pools.hard_negatives, 0.0);
    std::sort(examples.begin(), examples.end(), [](const auto& a, const auto& b) { return *a.id < *b.id; });

    LinearModel model;
    model.hashing = cfg.hashing;
    model.weights.assign(cfg.hashing.buckets(), 0.0);

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const double total_steps = static_cast<double>(cfg.epochs * examples.size());
    double step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            const auto& ex = examples[i];
            const double lr = cfg.learning_rate * (1.0 - step / total_steps);
            const double g = sigmoid(model.dot(ex.x)) - ex.label;
            for (std::size_t k = 0; k < ex.x.index.size(); ++k) model.weights[ex.x.index[k]] -= lr * g * ex.x.value[k];
            model.bias -= lr * g;
            step += 1;
        }
    }
    Json provenance{{"positives", pools.positives.size()},
                    {"random_negatives", pools.random_negatives.size()},
                    {"hard_negatives", pools.hard_negatives.size()},
                    {"epochs", cfg.epochs},
                    {"seed", cfg.seed}};
    return RecallModel(std::move(model), round, std::move(provenance));
}

RecallResult apply_recall(const RecallModel& model, std::span<const CodeDocument> docs, double threshold,
                          const std::map<std::string, double>& category_thresholds, unsigned workers) {
    if (std::isnan(threshold)) throw ConfigError("recall threshold must not be NaN");
    std::vector<double> scores(docs.size());
    parallel_for(docs.size(), workers, [&](std::size_t i) { scores[i] = model.score(docs[i].content); });
    RecallResult r;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        double t = threshold;
        if (!category_thresholds.empty() && docs[i].tags.contains("category")) {
            const auto& cat = docs[i].tags["category"];
            if (cat.is_string()) {
                if (auto it = category_thresholds.find(cat.get<std::string>()); it != category_thresholds.end()) t = it->second;
            }
        }
        r.scores[docs[i].id] = scores[i];
        if (scores[i] >= t) r.recalled.push_back(docs[i].id);
    }
    std::sort(r.recalled.begin(), r.recalled.end());
    return r;
}

std::vector<std::string> mine_hard_negatives(const RecallModel& model, std::span<const CodeDocument> candidates,
                                             const std::map<std::string, double>& quality_scores,
                                             double recall_threshold, double quality_cutoff) {
    std::vector<std::string> out;
    for (const auto& d : candidates) {
        auto q = quality_scores.find(d.id);
        if (q == quality_scores.end()) continue;
        if (q->second < quality_cutoff && model.score(d.content) >= recall_threshold) out.push_back(d.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(values.size() - 1, lo + 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

IterationResult iterate_rounds(TrainingPools pools, const DocumentStore& docs, std::span<const std::string> unlabeled,
                               int rounds, const std::map<std::string, double>& quality_scores,
                               const RecallConfig& cfg) {
    if (rounds < 2 || rounds > 3) throw ConfigError("iterate_rounds: rounds must be 2 or 3");
    pools.check_disjoint();

    std::set<std::string> in_pools;
    for (const auto* pool : {&pools.positives, &pools.random_negatives, &pools.hard_negatives})
        in_pools.insert(pool->begin(), pool->end());
    std::vector<std::string> remaining;
    for (const auto& id : std::set<std::string>(unlabeled.begin(), unlabeled.end())) {
        if (!in_pools.contains(id)) remaining.push_back(id);
    }

    IterationResult result;
    for (int round = 1; round <= rounds; ++round) {
        result.model = train_recall(pools, docs, cfg, round);
        RoundLog log{round, pools.positives.size(), pools.random_negatives.size(), pools.hard_negatives.size(), 0, 0};
        if (round == rounds || remaining.empty()) {
            result.rounds.push_back(log);
            break;
        }

        std::vector<double> positive_scores;
        for (const auto& id : pools.positives) positive_scores.push_back(result.model.score(docs.at(id).content));
        const double promote_at = quantile(positive_scores, cfg.promotion_quantile);

        std::vector<std::string> promoted;
        std::vector<std::string> mined;
        std::vector<std::string> still_unlabeled;
        for (const auto& id : remaining) {
            const double s = result.model.score(docs.at(id).content);
            auto q = quality_scores.find(id);
            const bool low_quality = q != quality_scores.end() && q->second < cfg.quality_cutoff;
            if (low_quality && s >= cfg.threshold) {
                mined.push_back(id);
            } else if (!low_quality && s >= promote_at) {
                promoted.push_back(id);
            } else {
                still_unlabeled.push_back(id);
            }
        }
        log.promoted = promoted.size();
        log.mined = mined.size();
        result.rounds.push_back(log);
        if (promoted.empty() && mined.empty()) {
            spdlog::info("recall round {}: pools unchanged, stopping early", round);
            break;
        }
        pools.positives.insert(pools.positives.end(), promoted.begin(), promoted.end());
        pools.hard_negatives.insert(pools.hard_negatives.end(), mined.begin(), mined.end());
        remaining = std::move(still_unlabeled);
        spdlog::info("recall round {}: promoted {}, mined {} hard negatives", round, promoted.size(), mined.size());
    }
    result.pools = std::move(pools);
    return result;
}

}  // namespace curator::recall
