#include <doctest.h>

#include <filesystem>

#include "curator/errors.hpp"
#include "curator/quality.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace curator;
using namespace curator::quality;

TEST_CASE("prompt rendering substitutes once") {
    const auto p = render_prompt("Python", "x = '{LANGUAGE}'");
    CHECK(p.find("Python code to be assessed:") != std::string::npos);
    CHECK(p.find("x = '{LANGUAGE}'") != std::string::npos);
    CHECK(p.find("{CONTENT}") == std::string::npos);
    CHECK(prompt_template().find("Rating: [[X]]") != std::string_view::npos);
    const auto unk = build_quality_prompt(CodeDocument::make("a", "blob.qqq", "zz"));
    CHECK(unk.find("code code to be assessed:") != std::string::npos);
}

TEST_CASE("rating extraction") {
    CHECK(extract_rating("blah Rating: [[7]]") == 7);
    CHECK(extract_rating("Rating: [[2]] then rating :  [[ 9 ]]") == 9);
    CHECK(extract_rating("RATING: [[10]]") == 10);
    CHECK_THROWS_AS(extract_rating("I think 7"), RatingExtractionError);
    CHECK_THROWS_AS(extract_rating("Rating: [[11]]"), RatingRangeError);
    CHECK_THROWS_AS(extract_rating("Rating: [[-1]]"), Error);
    const auto l = QualityLabel::from_response("d", "Rating: [[4]]", "m");
    CHECK(l.raw_score == 4);
    CHECK(l.rescaled == doctest::Approx(0.4));
    CHECK(label_from_json("d", to_json(l)) == l);
}

TEST_CASE("eps errors match brute force and skip empty classes") {
    Rng rng(8);
    std::vector<Prediction> preds;
    std::vector<int> labels;
    std::vector<double> values;
    for (int i = 0; i < 300; ++i) {
        int label = static_cast<int>(rng.below(11));
        if (label == 3) label = 4;  // class 3 stays empty
        const double p = rng.uniform() * 10.0;
        preds.push_back({label, p});
        labels.push_back(label);
        values.push_back(p);
    }
    const auto r = evaluate_predictions(preds);
    const auto [cmae, mae] = oracle_ref::eps_errors(labels, values);
    CHECK(r.eps_cmae == doctest::Approx(cmae).epsilon(1e-12));
    CHECK(r.eps_mae == doctest::Approx(mae).epsilon(1e-12));
    CHECK(r.populated_classes == 10);
    CHECK(r.samples == 300);
}

TEST_CASE("scorer learns a separable signal and round-trips") {
    Rng rng(2);
    const auto good = gen::vocabulary(50, rng, "good");
    const auto bad = gen::vocabulary(50, rng, "bad");
    std::vector<LabeledDoc> train;
    for (int i = 0; i < 200; ++i) {
        const bool g = i % 2 == 0;
        const auto words = gen::random_words(30, g ? good : bad, rng);
        train.push_back({CodeDocument::make("t" + std::to_string(1000 + i), "x.py", gen::join(words)),
                         QualityLabel::from_score("t", g ? 9 : 1)});
    }
    ScorerConfig cfg;
    cfg.hashing.bucket_bits = 14;
    const auto m = train_scorer(train, cfg);
    const auto curve = m.loss_curve();
    REQUIRE(curve.size() >= 2);
    CHECK(curve.back() < curve.front());
    const double pg = m.predict(gen::join(gen::random_words(30, good, rng)));
    const double pb = m.predict(gen::join(gen::random_words(30, bad, rng)));
    CHECK(pg > 0.7);
    CHECK(pb < 0.3);
    CHECK(pg <= 1.0);
    CHECK(pb >= 0.0);

    const auto path = std::filesystem::temp_directory_path() / "curator-unit-scorer.bin";
    m.save(path);
    const auto back = ScorerModel::load(path);
    CHECK(back.predict("good thing") == m.predict("good thing"));

    auto shuffled = train;
    rng.shuffle(shuffled);
    CHECK(train_scorer(shuffled, cfg).linear().weights == m.linear().weights);
}

TEST_CASE("percentile cut drops exactly floor(n f) with id tie-break") {
    std::vector<ScoredDoc> docs;
    for (int i = 0; i < 25; ++i) docs.push_back({"d" + std::to_string(100 + i), (i % 5) * 0.1});
    const auto r = percentile_filter(docs, 0.1);
    CHECK(r.dropped == std::vector<std::string>{"d100", "d105"});
    CHECK(r.kept.size() == 23);
    CHECK(percentile_filter(docs, 0.0).dropped.empty());
    CHECK_THROWS_AS(percentile_filter(docs, 1.0), ConfigError);
    docs.push_back({"u", std::nullopt});
    CHECK_THROWS_AS(percentile_filter(docs, 0.1), ConfigError);
}

TEST_CASE("labeling plan sums to the requested total") {
    std::size_t ref = 0;
    for (const auto& q : reference_label_distribution()) ref += q.count;
    CHECK(ref > 0);
    for (std::size_t total : {1u, 17u, 1000u, 12345u}) {
        std::size_t sum = 0;
        for (const auto& q : labeling_plan(total)) sum += q.count;
        CHECK(sum == total);
    }
}
