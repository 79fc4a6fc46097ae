#include "curator/quality.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "curator/hashing.hpp"
#include "curator/parallel.hpp"
#include "curator/rng.hpp"

namespace curator::quality {

namespace {

class RateLimiter {
public:
    explicit RateLimiter(double per_second) : per_second_(per_second) {}

    void acquire() {
        if (per_second_ <= 0.0) return;
        using clock = std::chrono::steady_clock;
        clock::time_point slot;
        {
            std::lock_guard lock(mu_);
            const auto now = clock::now();
            if (next_ < now) next_ = now;
            slot = next_;
            next_ += std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / per_second_));
        }
        std::this_thread::sleep_until(slot);
    }

private:
    double per_second_;
    std::mutex mu_;
    std::chrono::steady_clock::time_point next_{};
};

}  // namespace

std::vector<LabelOutcome> label_documents(std::span<const CodeDocument> docs, oracle::CompletionClient& client,
                                          const LabelOptions& opts) {
    std::vector<LabelOutcome> out(docs.size());
    RateLimiter limiter(opts.max_requests_per_second);
    std::atomic<bool> abort{false};
    parallel_for(docs.size(), opts.workers, [&](std::size_t i) {
        auto& o = out[i];
        o.doc_id = docs[i].id;
        if (abort.load()) {
            o.error = "aborted";
            return;
        }
        limiter.acquire();
        try {
            auto resp = oracle::query_oracle(build_quality_prompt(docs[i]), client, opts.retry, opts.sleep);
            o.retries = resp.retries;
            o.label = QualityLabel::from_response(docs[i].id, resp.text, client.name());
        } catch (const oracle::AuthError&) {
            abort.store(true);
            throw;
        } catch (const std::exception& e) {
            o.error = e.what();
            spdlog::warn("label: {} failed: {}", docs[i].id, e.what());
        }
    });
    return out;
}

// ---------------------------------------------------------------------------

ScorerModel::ScorerModel(LinearModel model, Json metadata) : model_(std::move(model)), meta_(std::move(metadata)) {}

double ScorerModel::predict(std::string_view content) const {
    if (model_.weights.empty()) return std::clamp(model_.bias, 0.0, 1.0);
    return std::clamp(model_.dot(content), 0.0, 1.0);
}

std::vector<double> ScorerModel::loss_curve() const {
    if (!meta_.contains("loss_curve")) return {};
    return meta_["loss_curve"].get<std::vector<double>>();
}

void ScorerModel::save(const std::filesystem::path& path) const {
    save_linear_model(path, ModelKind::QualityScorer, model_, meta_);
}

ScorerModel ScorerModel::load(const std::filesystem::path& path) {
    auto loaded = load_linear_model(path);
    if (loaded.kind != ModelKind::QualityScorer) throw IoError(path.string() + ": not a quality scorer model");
    return ScorerModel(std::move(loaded.model), std::move(loaded.metadata));
}

ScorerModel train_scorer(std::span<const LabeledDoc> labeled, const ScorerConfig& cfg) {
    if (labeled.empty()) throw ConfigError("train_scorer: no labeled documents");
    if (cfg.learning_rate <= 0.0) throw ConfigError("train_scorer: learning rate must be positive");

    std::vector<std::size_t> order(labeled.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        const auto& x = labeled[a];
        const auto& y = labeled[b];
        if (x.doc.id != y.doc.id) return x.doc.id < y.doc.id;
        return x.doc.content < y.doc.content;
    });

    LinearModel model;
    model.hashing = cfg.hashing;
    model.weights.assign(cfg.hashing.buckets(), 0.0);
    Json meta{{"epochs", cfg.epochs}, {"learning_rate", cfg.learning_rate}, {"l2", cfg.l2},
              {"seed", cfg.seed},     {"examples", labeled.size()}};

    std::set<double> distinct;
    for (const auto& l : labeled) distinct.insert(l.label.rescaled);
    if (distinct.size() == 1) {
        spdlog::warn("train_scorer: all {} labels equal {}; fitting a constant model", labeled.size(), *distinct.begin());
        model.bias = *distinct.begin();
        meta["degenerate"] = true;
        meta["loss_curve"] = std::vector<double>{0.0};
        return ScorerModel(std::move(model), std::move(meta));
    }

    const std::size_t n = labeled.size();
    std::vector<SparseVector> xs(n);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = featurize(labeled[order[i]].doc.content, cfg.hashing);
        ys[i] = labeled[order[i]].label.rescaled;
    }
    std::vector<std::uint32_t> touched;
    for (const auto& x : xs) touched.insert(touched.end(), x.index.begin(), x.index.end());
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

    std::vector<double> grad(model.weights.size(), 0.0);
    std::vector<double> curve;
    curve.reserve(cfg.epochs + 1);
    const double scale = 2.0 / static_cast<double>(n);

    auto loss_and_residuals = [&](std::vector<double>& residuals) {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            residuals[i] = model.dot(xs[i]) - ys[i];
            loss += residuals[i] * residuals[i];
        }
        loss /= static_cast<double>(n);
        if (cfg.l2 > 0.0) {
            double reg = 0.0;
            for (auto t : touched) reg += model.weights[t] * model.weights[t];
            loss += cfg.l2 * reg;
        }
        return loss;
    };

    std::vector<double> residuals(n);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        curve.push_back(loss_and_residuals(residuals));
        for (auto t : touched) grad[t] = 2.0 * cfg.l2 * model.weights[t];
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = residuals[i] * scale;
            grad_bias += r;
            for (std::size_t k = 0; k < xs[i].index.size(); ++k) grad[xs[i].index[k]] += r * xs[i].value[k];
        }
        for (auto t : touched) model.weights[t] -= cfg.learning_rate * grad[t];
        model.bias -= cfg.learning_rate * grad_bias;
    }
    curve.push_back(loss_and_residuals(residuals));
    meta["loss_curve"] = curve;
    return ScorerModel(std::move(model), std::move(meta));
}

EvalReport evaluate_predictions(std::span<const Prediction> predictions) {
    if (predictions.empty()) throw ConfigError("evaluate: empty test set");
    EvalReport r;
    double total = 0.0;
    for (const auto& p : predictions) {
        if (p.label < 0 || p.label > 10) throw ConfigError("evaluate: label " + std::to_string(p.label) + " outside 0..10");
        r.classes[static_cast<std::size_t>(p.label)].push_back(p.predicted);
        total += std::abs(p.predicted - p.label);
    }
    r.samples = predictions.size();
    r.eps_mae = total / static_cast<double>(r.samples);
    double class_sum = 0.0;
    for (std::size_t i = 0; i < r.classes.size(); ++i) {
        const auto& c = r.classes[i];
        if (c.empty()) continue;
        double s = 0.0;
        for (double y : c) s += std::abs(y - static_cast<double>(i));
        class_sum += s / static_cast<double>(c.size());
        ++r.populated_classes;
    }
    r.eps_cmae = class_sum / static_cast<double>(r.populated_classes);
    return r;
}

EvalReport evaluate_scorer(const ScorerModel& model, std::span<const LabeledDoc> test) {
    std::vector<Prediction> preds;
    preds.reserve(test.size());
    for (const auto& t : test) preds.push_back({t.label.raw_score, 10.0 * model.predict(t.doc)});
    return evaluate_predictions(preds);
}

Json to_json(const EvalReport& report) {
    Json per_class = Json::array();
    for (std::size_t i = 0; i < report.classes.size(); ++i) {
        const auto& c = report.classes[i];
        double mae = 0.0;
        for (double y : c) mae += std::abs(y - static_cast<double>(i));
        per_class.push_back({{"score", i}, {"count", c.size()}, {"mae", c.empty() ? Json(nullptr) : Json(mae / c.size())}});
    }
    return Json{{"eps_cmae", report.eps_cmae},
                {"eps_mae", report.eps_mae},
                {"samples", report.samples},
                {"populated_classes", report.populated_classes},
                {"classes", per_class}};
}

// ---------------------------------------------------------------------------

CutResult percentile_filter(std::span<const ScoredDoc> docs, double drop_fraction) {
    if (!(drop_fraction >= 0.0 && drop_fraction < 1.0)) throw ConfigError("drop_fraction must lie in [0, 1)");
    std::vector<const ScoredDoc*> sorted;
    sorted.reserve(docs.size());
    for (const auto& d : docs) {
        if (!d.score || !std::isfinite(*d.score)) throw ConfigError("unscored document: " + d.id);
        sorted.push_back(&d);
    }
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) {
        if (*a->score != *b->score) return *a->score < *b->score;
        return a->id < b->id;
    });
    // the epsilon absorbs representation error in n * fraction (e.g. 0.29 * 100)
    const auto drop = std::min(sorted.size(), static_cast<std::size_t>(
                                                  std::floor(static_cast<double>(sorted.size()) * drop_fraction + 1e-9)));
    CutResult r;
    for (std::size_t i = 0; i < sorted.size(); ++i) (i < drop ? r.dropped : r.kept).push_back(sorted[i]->id);
    std::sort(r.kept.begin(), r.kept.end());
    return r;
}

// ---------------------------------------------------------------------------

namespace {

const std::vector<LanguageQuota>& reference_table() {
    static const std::vector<LanguageQuota> table = {
        {"Python", 26924},     {"Shell", 10194},     {"Ruby", 10187},      {"Go", 10185},
        {"TypeScript", 10179}, {"MATLAB", 10165},    {"Java", 10161},      {"C#", 10112},
        {"SQL", 10110},        {"JavaScript", 10110}, {"CSS", 10053},      {"Kotlin", 10051},
        {"PHP", 10049},        {"C", 10020},         {"reStructuredText", 9951}, {"C++", 9938},
        {"HTML", 9422},        {"R", 9379},          {"TeX", 9156},        {"Markdown", 8845},
        {"RMarkdown", 6875},
    };
    return table;
}

}  // namespace

std::span<const LanguageQuota> reference_label_distribution() { return reference_table(); }

std::vector<LanguageQuota> labeling_plan(std::size_t total) {
    const auto& table = reference_table();
    std::size_t sum = 0;
    for (const auto& q : table) sum += q.count;
    std::vector<LanguageQuota> plan;
    std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder, index)
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto exact = static_cast<unsigned __int128>(total) * table[i].count;
        const auto base = static_cast<std::size_t>(exact / sum);
        plan.push_back({table[i].language, base});
        remainders.emplace_back(static_cast<std::size_t>(exact % sum), i);
        assigned += base;
    }
    std::stable_sort(remainders.begin(), remainders.end(), [](auto a, auto b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++plan[remainders[k].second].count;
    return plan;
}

std::vector<std::string> sample_for_labeling(std::span<const CodeDocument> docs, std::size_t total,
                                             std::uint64_t seed) {
    std::map<std::string, std::vector<std::string>> by_language;
    for (const auto& d : docs) by_language[d.language].push_back(d.id);
    std::vector<std::string> out;
    for (const auto& q : labeling_plan(total)) {
        auto it = by_language.find(q.language);
        if (it == by_language.end()) continue;
        auto ids = it->second;
        std::sort(ids.begin(), ids.end());
        Rng rng(derive_seed(seed, q.language));
        rng.shuffle(ids);
        ids.resize(std::min(ids.size(), q.count));
        out.insert(out.end(), ids.begin(), ids.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace curator::quality
