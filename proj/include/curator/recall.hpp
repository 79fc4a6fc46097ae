#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "curator/document.hpp"
#include "curator/features.hpp"

namespace curator::recall {

struct RecallConfig {
    HashingConfig hashing{21, {1, 2}, 0};
    std::size_t epochs = 5;
    /// Initial SGD step; decays linearly to zero over all updates.
    double learning_rate = 0.5;
    std::uint64_t seed = 0;
    /// Probability at or above which a document counts as recalled.
    double threshold = 0.5;
    /// Unlabeled documents scoring at or above this quantile of the current
    /// positives' scores are promoted to positives between rounds.
    double promotion_quantile = 0.95;
    /// Quality scores below this mark a recalled document as a hard negative.
    double quality_cutoff = 0.3;
    /// Optional per-category recall thresholds keyed by the "category" tag.
    std::map<std::string, double> category_thresholds;
};

RecallConfig config_from_json(const Json& j);
Json to_json(const RecallConfig& cfg);

struct TrainingPools {
    std::vector<std::string> positives;
    std::vector<std::string> random_negatives;
    std::vector<std::string> hard_negatives;

    /// Throws ConfigError if any id appears in more than one pool.
    void check_disjoint() const;
};

TrainingPools pools_from_json(const Json& j);
Json to_json(const TrainingPools& pools);

/// Binary logistic classifier over hashed word n-grams.
class RecallModel {
public:
    RecallModel() = default;
    RecallModel(LinearModel model, int round, Json provenance);

    /// Decision value w.x + b; positive means "recall".
    double logit(std::string_view text) const { return model_.dot(text); }
    /// Sigmoid of the logit.
    double score(std::string_view text) const;

    int round() const noexcept { return round_; }
    const LinearModel& linear() const noexcept { return model_; }
    const Json& provenance() const noexcept { return provenance_; }

    void save(const std::filesystem::path& path) const;
    static RecallModel load(const std::filesystem::path& path);

private:
    LinearModel model_;
    int round_ = 1;
    Json provenance_ = Json::object();
};

/// SGD on the logistic loss. Positives are labeled 1, both negative pools 0.
/// Deterministic given the pools and cfg.seed. Throws ConfigError when pools
/// overlap, positives or random negatives are empty, or an id is unknown.
RecallModel train_recall(const TrainingPools& pools, const DocumentStore& docs, const RecallConfig& cfg,
                         int round = 1);

struct RecallResult {
    std::vector<std::string> recalled;   // id order
    std::map<std::string, double> scores;
};

/// Recalls documents whose score is >= threshold, or >= the threshold of the
/// document's "category" tag when one is configured.
RecallResult apply_recall(const RecallModel& model, std::span<const CodeDocument> docs, double threshold,
                          const std::map<std::string, double>& category_thresholds = {}, unsigned workers = 1);

/// Candidates the model recalls (score >= recall_threshold) whose quality
/// score is below quality_cutoff. Candidates without a quality score are skipped.
std::vector<std::string> mine_hard_negatives(const RecallModel& model, std::span<const CodeDocument> candidates,
                                             const std::map<std::string, double>& quality_scores,
                                             double recall_threshold, double quality_cutoff);

struct RoundLog {
    int round = 0;
    std::size_t positives = 0;
    std::size_t random_negatives = 0;
    std::size_t hard_negatives = 0;
    std::size_t promoted = 0;
    std::size_t mined = 0;
};

struct IterationResult {
    RecallModel model;
    TrainingPools pools;
    std::vector<RoundLog> rounds;
};

/// Train, apply to the unlabeled documents, promote confident high-quality
/// documents to positives, mine hard negatives, and retrain, for 2 or 3
/// rounds. Stops early after a round that neither promotes nor mines.
IterationResult iterate_rounds(TrainingPools pools, const DocumentStore& docs, std::span<const std::string> unlabeled,
                               int rounds, const std::map<std::string, double>& quality_scores,
                               const RecallConfig& cfg);

/// Linear-interpolated quantile (q in [0, 1]) of a non-empty sample.
double quantile(std::vector<double> values, double q);

}  // namespace curator::recall
