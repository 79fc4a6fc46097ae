#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curator/document.hpp"
#include "curator/errors.hpp"
#include "curator/features.hpp"
#include "curator/oracle_client.hpp"

namespace curator::quality {

/// The code-quality scoring prompt with {LANGUAGE} and {CONTENT} placeholders.
std::string_view prompt_template();

/// Single-pass substitution: placeholder text inside `language` or `content`
/// is never expanded again.
std::string render_prompt(std::string_view language, std::string_view content);

/// Prompt for a document; unknown languages are rendered as "code".
std::string build_quality_prompt(const CodeDocument& doc);

class RatingExtractionError : public Error {
public:
    using Error::Error;
};

class RatingRangeError : public Error {
public:
    using Error::Error;
};

/// Integer from the last "Rating: [[X]]" in the response. Case and whitespace
/// inside the pattern are tolerated. Throws RatingExtractionError when the
/// pattern is absent and RatingRangeError when X lies outside 0..10.
int extract_rating(std::string_view response);

struct QualityLabel {
    std::string doc_id;
    int raw_score = 0;
    double rescaled = 0.0;  // raw_score / 10
    std::string oracle_name;
    std::optional<std::string> explanation;

    static QualityLabel from_response(std::string doc_id, std::string_view response, std::string oracle_name);
    static QualityLabel from_score(std::string doc_id, int raw_score, std::string oracle_name = {});

    friend bool operator==(const QualityLabel&, const QualityLabel&) = default;
};

Json to_json(const QualityLabel& label);
QualityLabel label_from_json(const std::string& doc_id, const Json& j);

struct LabelOutcome {
    std::string doc_id;
    std::optional<QualityLabel> label;
    std::string error;
    int retries = 0;
};

struct LabelOptions {
    oracle::RetryPolicy retry;
    unsigned workers = 4;
    /// Global request rate limit; 0 disables limiting.
    double max_requests_per_second = 0.0;
    oracle::Sleeper sleep = oracle::real_sleeper();
};

/// Queries the oracle for every document through a bounded worker pool.
/// Per-document failures are recorded in the outcome; labeling continues.
/// AuthError aborts the whole run.
std::vector<LabelOutcome> label_documents(std::span<const CodeDocument> docs, oracle::CompletionClient& client,
                                          const LabelOptions& opts = {});

// ---------------------------------------------------------------------------
// Scorer

struct ScorerConfig {
    HashingConfig hashing{20, {1, 2}, 0};
    std::size_t epochs = 100;
    double learning_rate = 0.25;
    double l2 = 0.0;
    std::uint64_t seed = 0;
};

struct LabeledDoc {
    CodeDocument doc;
    QualityLabel label;
};

/// Linear regressor over hashed word n-grams predicting the rescaled score.
class ScorerModel {
public:
    ScorerModel() = default;
    ScorerModel(LinearModel model, Json metadata);

    /// Prediction in [0, 1].
    double predict(std::string_view content) const;
    double predict(const CodeDocument& doc) const { return predict(doc.content); }

    const LinearModel& linear() const noexcept { return model_; }
    const Json& metadata() const noexcept { return meta_; }
    /// Mean squared error on the training set before each epoch, then after the last.
    std::vector<double> loss_curve() const;

    void save(const std::filesystem::path& path) const;
    static ScorerModel load(const std::filesystem::path& path);

private:
    LinearModel model_;
    Json meta_ = Json::object();
};

/// Full-batch gradient descent on mean squared error against the rescaled
/// labels. Examples are processed in id order, so the result does not depend
/// on input order. All-identical labels give a constant model (warned).
ScorerModel train_scorer(std::span<const LabeledDoc> labeled, const ScorerConfig& cfg = {});

struct Prediction {
    int label = 0;         // ground truth, 0..10
    double predicted = 0;  // on the 0..10 scale
};

struct EvalReport {
    std::array<std::vector<double>, 11> classes;  // predictions grouped by true score
    double eps_cmae = 0.0;
    double eps_mae = 0.0;
    std::size_t samples = 0;
    std::size_t populated_classes = 0;
};

/// Class-averaged and overall mean absolute error. Empty classes are skipped
/// and the class average is taken over populated classes only.
EvalReport evaluate_predictions(std::span<const Prediction> predictions);

EvalReport evaluate_scorer(const ScorerModel& model, std::span<const LabeledDoc> test);

Json to_json(const EvalReport& report);

// ---------------------------------------------------------------------------
// Percentile cut

struct ScoredDoc {
    std::string id;
    std::optional<double> score;
};

struct CutResult {
    std::vector<std::string> kept;     // id order
    std::vector<std::string> dropped;  // ascending (score, id)
};

/// Drops exactly floor(n * drop_fraction) lowest-scored documents, ties broken
/// by id. Throws ConfigError for an unscored document or a fraction outside [0, 1).
CutResult percentile_filter(std::span<const ScoredDoc> docs, double drop_fraction);

// ---------------------------------------------------------------------------
// Labeling plan

struct LanguageQuota {
    std::string language;
    std::size_t count = 0;
};

/// Per-language file counts of the reference labeling set.
std::span<const LanguageQuota> reference_label_distribution();

/// Splits `total` across the reference languages in proportion to their
/// counts (largest-remainder rounding).
std::vector<LanguageQuota> labeling_plan(std::size_t total);

/// Draws up to each language's quota from `docs` (seeded, id-sorted result).
std::vector<std::string> sample_for_labeling(std::span<const CodeDocument> docs, std::size_t total,
                                             std::uint64_t seed);

}  // namespace curator::quality
