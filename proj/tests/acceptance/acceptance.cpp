// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "curator/bm25.hpp"
#include "curator/commits.hpp"
#include "curator/decontam.hpp"
#include "curator/dedup.hpp"
#include "curator/errors.hpp"
#include "curator/fim.hpp"
#include "curator/longctx.hpp"
#include "curator/needle.hpp"
#include "curator/pipeline.hpp"
#include "curator/quality.hpp"
#include "curator/recall.hpp"
#include "curator/shard_io.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace curator;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Records the first failing condition; later ones are still evaluated.
struct Check {
    Outcome out;
    void expect(bool ok, const std::string& what) {
        if (!ok && out.pass) {
            out.pass = false;
            out.detail = what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("curator-accept-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

struct UnionFind {
    std::map<std::string, std::string> parent;
    std::string find(const std::string& x) {
        auto it = parent.find(x);
        if (it == parent.end() || it->second == x) return x;
        return parent[x] = find(it->second);
    }
    void unite(const std::string& a, const std::string& b) { parent[find(a)] = find(b); }
};

// ---------------------------------------------------------------------------

Outcome dedup_oracle() {
    Check c;
    const auto corpus = gen::dup_corpus(2024);  // 600 bases + 200 near + 200 exact
    c.expect(corpus.docs.size() == 1000, "fixture size");

    const auto t0 = std::chrono::steady_clock::now();
    const auto report = dedup::deduplicate(corpus.docs);
    const double elapsed = seconds_since(t0);

    // exact: every doc whose bytes equal an earlier-id doc must be dropped
    std::map<std::string, std::vector<std::string>> by_content;
    for (const auto& d : corpus.docs) by_content[d.content].push_back(d.id);
    std::size_t byte_copies = 0, removed_copies = 0;
    std::vector<const CodeDocument*> survivors;
    for (auto& [content, ids] : by_content) {
        std::sort(ids.begin(), ids.end());
        for (std::size_t i = 1; i < ids.size(); ++i) {
            ++byte_copies;
            removed_copies += report.dropped.count(ids[i]) && report.dropped.at(ids[i]).rfind("exact-duplicate", 0) == 0;
        }
    }
    for (const auto& d : corpus.docs) {
        if (by_content[d.content].front() == d.id) survivors.push_back(&d);
    }
    c.expect(byte_copies > 0 && removed_copies == byte_copies,
             fmt::format("exact copies removed {}/{}", removed_copies, byte_copies));

    // all-pairs exact Jaccard over 5-word shingles of the exact survivors
    std::vector<std::vector<std::size_t>> sets;
    for (const auto* d : survivors) {
        std::vector<std::size_t> h;
        for (const auto& s : oracle_ref::shingle_set(d->content, 5)) h.push_back(std::hash<std::string>{}(s));
        std::sort(h.begin(), h.end());
        h.erase(std::unique(h.begin(), h.end()), h.end());
        sets.push_back(std::move(h));
    }
    UnionFind uf;
    for (const auto& p : report.near_pairs) uf.unite(p.first, p.second);
    std::size_t true_pairs = 0, recalled = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            std::size_t inter = 0;
            auto a = sets[i].begin(), b = sets[j].begin();
            while (a != sets[i].end() && b != sets[j].end()) {
                if (*a < *b) ++a;
                else if (*b < *a) ++b;
                else { ++inter; ++a; ++b; }
            }
            const double jac = static_cast<double>(inter) / static_cast<double>(sets[i].size() + sets[j].size() - inter);
            if (jac < 0.85) continue;
            ++true_pairs;
            recalled += uf.find(survivors[i]->id) == uf.find(survivors[j]->id);
        }
    }
    const double recall = true_pairs ? static_cast<double>(recalled) / static_cast<double>(true_pairs) : 0.0;
    c.expect(true_pairs >= 190, fmt::format("only {} true pairs in fixture", true_pairs));
    c.expect(recall >= 0.95, fmt::format("near recall {:.4f} < 0.95", recall));
    c.expect(elapsed < 30.0, fmt::format("runtime {:.2f}s", elapsed));
    if (c.out.pass)
        c.out.detail = fmt::format("exact {}/{} removed, near recall {}/{} = {:.4f}, {:.2f}s", removed_copies,
                                   byte_copies, recalled, true_pairs, recall, elapsed);
    return c.out;
}

Outcome minhash_estimator() {
    Check c;
    Rng rng(77);
    const auto vocab = gen::vocabulary(2000, rng);
    const dedup::MinHasher hasher({256, 5, 1});
    double total = 0;
    for (int i = 0; i < 50; ++i) {
        auto a = gen::random_words(150 + rng.below(200), vocab, rng);
        auto b = a;
        const std::size_t edits = rng.below(b.size() / 4 + 1);
        for (std::size_t e = 0; e < edits; ++e) b[rng.below(b.size())] = gen::random_word(rng);
        const auto ta = gen::join(a), tb = gen::join(b);
        const double truth = oracle_ref::jaccard(oracle_ref::shingle_set(ta, 5), oracle_ref::shingle_set(tb, 5));
        total += std::fabs(dedup::estimate_jaccard(hasher.sign("a", ta), hasher.sign("b", tb)) - truth);
    }
    const double mean = total / 50.0;
    c.expect(mean < 0.08, fmt::format("mean abs error {:.4f}", mean));
    if (c.out.pass) c.out.detail = fmt::format("mean |est - exact| = {:.4f} over 50 pairs (k=256)", mean);
    return c.out;
}

Outcome quality_metrics() {
    Check c;
    double worst = 0;
    for (int f = 0; f < 20; ++f) {
        Rng rng(300 + f);
        const auto vocab = gen::vocabulary(200, rng);
        std::vector<quality::LabeledDoc> train, test;
        for (int i = 0; i < 120; ++i) {
            const int label = static_cast<int>(rng.below(11));
            const auto doc = CodeDocument::make(fmt::format("q{:04}", i), "a.py", gen::join(gen::random_words(25, vocab, rng)));
            (i < 80 ? train : test).push_back({doc, quality::QualityLabel::from_score(doc.id, label)});
        }
        quality::ScorerConfig cfg;
        cfg.hashing.bucket_bits = 12;
        cfg.epochs = 10;
        const auto model = quality::train_scorer(train, cfg);
        const auto report = quality::evaluate_scorer(model, test);
        std::vector<int> labels;
        std::vector<double> preds;
        for (const auto& t : test) {
            labels.push_back(t.label.raw_score);
            preds.push_back(model.predict(t.doc) * 10.0);
        }
        const auto [cmae, mae] = oracle_ref::eps_errors(labels, preds);
        worst = std::max({worst, std::fabs(report.eps_cmae - cmae), std::fabs(report.eps_mae - mae)});
    }
    c.expect(worst <= 1e-12, fmt::format("max deviation {:.3g}", worst));

    const std::vector<quality::Prediction> worked{{3, 4.0}, {7, 7.0}, {7, 5.0}};
    const auto r = quality::evaluate_predictions(worked);
    c.expect(r.eps_mae == 1.0 && r.eps_cmae == 1.0,
             fmt::format("worked fixture gave mae {} cmae {}", r.eps_mae, r.eps_cmae));
    if (c.out.pass) c.out.detail = fmt::format("20 fixtures max deviation {:.3g}; worked fixture exact", worst);
    return c.out;
}

Outcome rating_extraction() {
    Check c;
    struct Case {
        std::string response;
        int expected;  // -1 extraction error, -2 range error
    };
    const std::vector<Case> cases{
        {"Rating: [[5]]", 5},
        {"Rating: [[0]]", 0},
        {"Rating: [[1]]", 1},
        {"Rating: [[2]]", 2},
        {"Rating: [[3]]", 3},
        {"Rating: [[4]]", 4},
        {"Rating: [[6]]", 6},
        {"Rating: [[7]]", 7},
        {"Rating: [[8]]", 8},
        {"Rating: [[9]]", 9},
        {"Rating: [[10]]", 10},
        {"The file is auto-generated data with no logic.\nRating: [[0]]", 0},
        {"Mostly configuration; zero score policy applies. Rating: [[0]]\n", 0},
        {"Good structure and comments.\n\nRating: [[8]]", 8},
        {"rating: [[6]]", 6},
        {"RATING :  [[ 7 ]]", 7},
        {"Rating:[[9]]", 9},
        {"First guess Rating: [[3]], revised Rating: [[4]]", 4},
        {"Rating: [[05]]", 5},
        {"Rating: [[ 10 ]] end", 10},
        {"", -1},
        {"I would give it a 7.", -1},
        {"Rating: [7]", -1},
        {"Rating: [[seven]]", -1},
        {"Rating: [[]]", -1},
        {"[[7]]", -1},
        {"Rating [[7]]", -1},
        {"Rating: [[11]]", -2},
        {"Rating: [[-1]]", -2},
        {"Rating: [[100]]", -2},
    };
    c.expect(cases.size() == 30, "fixture size");
    std::size_t correct = 0;
    for (const auto& k : cases) {
        int got;
        try {
            got = quality::extract_rating(k.response);
        } catch (const quality::RatingRangeError&) {
            got = -2;
        } catch (const quality::RatingExtractionError&) {
            got = -1;
        }
        correct += got == k.expected;
        c.expect(got == k.expected, fmt::format("case '{}' gave {} expected {}", k.response, got, k.expected));
    }
    if (c.out.pass) c.out.detail = fmt::format("{}/{} cases", correct, cases.size());
    return c.out;
}

Outcome percentile_filter() {
    Check c;
    for (int f = 0; f < 50; ++f) {
        Rng rng(900 + f);
        const std::size_t n = 1 + rng.below(400);
        std::vector<quality::ScoredDoc> docs;
        for (std::size_t i = 0; i < n; ++i)
            docs.push_back({fmt::format("d{:05}", rng.below(100000)) + "-" + std::to_string(i),
                            static_cast<double>(rng.below(20)) / 20.0});
        const auto r = quality::percentile_filter(docs, 0.10);
        auto sorted = docs;
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return std::pair(*a.score, a.id) < std::pair(*b.score, b.id);
        });
        const std::size_t k = n / 10;
        std::vector<std::string> want;
        for (std::size_t i = 0; i < k; ++i) want.push_back(sorted[i].id);
        c.expect(r.dropped == want, fmt::format("fixture {} dropped {} expected {}", f, r.dropped.size(), k));
        c.expect(r.kept.size() + r.dropped.size() == n, "kept + dropped != n");
    }
    if (c.out.pass) c.out.detail = "50 fixtures, exactly floor(n*0.10) lowest dropped";
    return c.out;
}

Outcome fim_checks() {
    Check c;
    Rng rng(5150);
    const std::vector<std::string> alphabet{"a", "b", " ", "\n", "\xc3\xa9", "\xe2\x82\xac", "\xf0\x9f\x98\x80", "{", "}"};
    std::size_t failures = 0;
    for (int t = 0; t < 100000; ++t) {
        std::string s;
        const std::size_t len = rng.below(40);
        for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
        const auto f = fim::split_fim(s, rng);
        failures += f.prefix + f.middle + f.suffix != s;
        failures += fim::deserialize(fim::serialize_spm(f)) != f;
    }
    c.expect(failures == 0, fmt::format("{} reconstruction failures", failures));

    c.expect(fim::serialize_spm({"ab", "cd", "ef"}) == "<[fim-suffix]>ef<[fim-prefix]>ab<[fim-middle]>cd", "golden abcdef");
    c.expect(fim::serialize_spm({}) == "<[fim-suffix]><[fim-prefix]><[fim-middle]>", "golden empty");
    c.expect(fim::split_at("abcdef", {2, 4}) == fim::FimSample{"ab", "cd", "ef"}, "cuts (2,4)");

    // middle length j - i on a 100-char document against the analytic CDF
    const std::size_t L = 100;
    std::vector<std::size_t> sample;
    Rng cut_rng(99);
    for (int t = 0; t < 10000; ++t) {
        const auto cuts = fim::draw_cuts(L, cut_rng);
        sample.push_back(cuts.j - cuts.i);
    }
    std::vector<double> cdf(L + 1);
    const double pairs = static_cast<double>((L + 1) * (L + 2) / 2);
    double acc = 0;
    for (std::size_t d = 0; d <= L; ++d) cdf[d] = (acc += static_cast<double>(L + 1 - d) / pairs);
    const double p = oracle_ref::ks_p_value(oracle_ref::ks_statistic(sample, cdf), sample.size());
    c.expect(p > 0.01, fmt::format("middle-length KS p = {:.4f}", p));

    Rng doc_rng(31337);
    const auto vocab = gen::vocabulary(300, doc_rng);
    std::vector<CodeDocument> docs;
    for (int i = 0; i < 10000; ++i)
        docs.push_back(CodeDocument::make(fmt::format("f{:05}", i), "a.py", gen::join(gen::random_words(8, vocab, doc_rng))));
    std::string rates;
    for (auto [ratio, tol] : {std::pair{0.5, 0.02}, std::pair{0.1, 0.01}}) {
        fim::FimOptions o;
        o.ratio = ratio;
        o.seed = 2025;
        const auto out = fim::emit_corpus(docs, o);
        const auto n = std::count_if(out.begin(), out.end(), [](const auto& e) { return e.fim; });
        const double frac = static_cast<double>(n) / static_cast<double>(docs.size());
        c.expect(std::fabs(frac - ratio) <= tol, fmt::format("ratio {} gave {:.4f}", ratio, frac));
        rates += fmt::format(" ratio {} -> {:.4f};", ratio, frac);
    }
    if (c.out.pass) c.out.detail = fmt::format("100000 round trips ok, KS p={:.3f};{}", p, rates);
    return c.out;
}

Outcome decontamination() {
    Check c;
    const auto f = gen::decontam_fixture(4242, 200);
    std::vector<decontam::BenchmarkItem> items;
    for (std::size_t i = 0; i < f.items.size(); ++i) items.push_back({"bench", fmt::format("i{:03}", i), f.items[i]});
    std::vector<CodeDocument> docs;
    for (std::size_t i = 0; i < f.docs.size(); ++i) docs.push_back(CodeDocument::make(fmt::format("d{:04}", i), "a.txt", f.docs[i]));
    const auto index = decontam::build_index(items);
    const auto r = decontam::scrub(docs, index);
    std::set<std::size_t> removed;
    for (const auto& rm : r.removed) removed.insert(static_cast<std::size_t>(std::stoul(rm.doc_id.substr(1))));
    const auto want = oracle_ref::contaminated(f.docs, f.items, 10);
    c.expect(removed == want, fmt::format("removed {} docs, oracle {}", removed.size(), want.size()));

    // a document whose longest shared run with any long item is exactly nine words
    std::size_t nine_kept = 0, nine_total = 0;
    std::vector<std::vector<std::string>> item_words;
    for (const auto& it : f.items) item_words.push_back(oracle_ref::decontam_words(it));
    for (auto d : f.planted9) {
        const auto w = oracle_ref::decontam_words(f.docs[d]);
        std::size_t longest = 0;
        bool touches_short = false;
        for (const auto& iw : item_words) {
            const auto run = oracle_ref::longest_common_run(w, iw);
            if (iw.size() < 10 && run == iw.size()) touches_short = true;
            longest = std::max(longest, run);
        }
        if (longest != 9 || touches_short) continue;
        ++nine_total;
        nine_kept += !removed.count(d);
    }
    c.expect(nine_total > 0, "no maximal 9-word overlap in fixture");
    c.expect(nine_kept == nine_total, fmt::format("9-word overlaps kept {}/{}", nine_kept, nine_total));
    if (c.out.pass)
        c.out.detail = fmt::format("{} removed == oracle; {}/{} nine-word overlaps kept", removed.size(), nine_kept, nine_total);
    return c.out;
}

Outcome bm25_checks() {
    Check c;
    // hand evaluation: N=3, lengths 3,3,2, avgdl=8/3, k1=1.2, b=0.75
    const std::vector<SourceFile> files{{"d1", "a b c"}, {"d2", "a a d"}, {"d3", "b e"}};
    const Bm25Index idx(files);
    const double idf_a = std::log((3 - 2 + 0.5) / (2 + 0.5) + 1);  // ln 1.6
    const double idf_e = std::log((3 - 1 + 0.5) / (1 + 0.5) + 1);  // ln (8/3)
    const double norm3 = 1.2 * (0.25 + 0.75 * 3.0 / (8.0 / 3.0));  // 1.3125
    const double norm2 = 1.2 * (0.25 + 0.75 * 2.0 / (8.0 / 3.0));  // 0.975
    const std::vector<double> want_a{idf_a * 2.2 / (1 + norm3), idf_a * 2 * 2.2 / (2 + norm3), 0.0};
    const std::vector<double> want_ae{want_a[0], want_a[1], idf_e * 2.2 / (1 + norm2)};
    double worst = 0;
    for (auto [q, want] : {std::pair{"a", want_a}, std::pair{"A e", want_ae}}) {
        const auto got = idx.scores(q);
        for (std::size_t i = 0; i < 3; ++i) worst = std::max(worst, std::fabs(got[i] - want[i]));
    }
    c.expect(worst <= 1e-9, fmt::format("hand computation deviation {:.3g}", worst));

    commits::CommitRecord rec;
    rec.id = "c";
    rec.repo.repo_id = "r";
    rec.message = "fix tokenizer crash in parser on unicode input";
    for (int i = 0; i < 9; ++i) rec.files.push_back({fmt::format("f{}.py", i), ""});
    rec.files[0].content = "tokenizer parser unicode";
    rec.files[3].content = "crash in tokenizer";
    rec.files[5].content = "parser";
    rec.files[6].content = "unicode input handling";
    rec.files[8].content = "fix fix fix";
    rec.files[1].content = "unrelated words here";
    rec.modified_paths = {"f0.py"};
    const auto sample = commits::build_commit_sample(rec);
    c.expect(sample.retrieved.size() == 5, fmt::format("retrieved {} files", sample.retrieved.size()));
    std::vector<std::string> texts;
    for (const auto& f : rec.files) texts.push_back(f.content);
    const auto scores = oracle_ref::bm25(rec.message, texts);
    std::vector<std::size_t> order(rec.files.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : rec.files[a].path < rec.files[b].path;
    });
    for (std::size_t i = 0; i < 5 && i < sample.retrieved.size(); ++i)
        c.expect(sample.retrieved[i].path == rec.files[order[i]].path, "top-5 order differs from oracle ranking");
    if (c.out.pass) c.out.detail = fmt::format("max deviation {:.3g}; top-5 selection matches oracle", worst);
    return c.out;
}

Outcome commit_eligibility() {
    Check c;
    std::size_t rows = 0;
    for (int mask = 0; mask < 81; ++mask) {
        // each field at threshold-1, threshold, threshold+1
        int m = mask;
        const int s = m % 3 - 1, f = (m /= 3) % 3 - 1, k = (m /= 3) % 3 - 1, d = (m /= 3) % 3 - 1;
        RepoSnapshot r;
        r.stars = static_cast<std::uint64_t>(100 + s);
        r.forks = static_cast<std::uint64_t>(10 + f);
        r.commit_count = static_cast<std::uint64_t>(100 + k);
        r.active_days = static_cast<std::uint64_t>(100 + d);
        const bool want = s >= 0 && f >= 0 && k >= 0 && d >= 0;
        c.expect(commits::repo_eligible(r) == want,
                 fmt::format("stars {} forks {} commits {} days {}", r.stars, r.forks, r.commit_count, r.active_days));
        ++rows;
    }
    if (c.out.pass) c.out.detail = fmt::format("{} boundary rows match", rows);
    return c.out;
}

Outcome topological_packing() {
    Check c;
    std::size_t graphs = 0, cyclic = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const std::size_t n = 2 + seed % 49;
        const auto g = gen::random_graph(n, 0.12, seed, seed % 4 == 0 ? 1 + seed % 3 : 0);
        pack::DepGraph dg;
        dg.language = "Python";
        dg.nodes = g.nodes;
        dg.edges = g.edges;
        std::sort(dg.edges.begin(), dg.edges.end());
        dg.edges.erase(std::unique(dg.edges.begin(), dg.edges.end()), dg.edges.end());
        const auto order = pack::topo_order(dg);
        c.expect(order.size() == n && std::set(order.begin(), order.end()).size() == n, "order is not a permutation");
        c.expect(oracle_ref::topo_valid(order, dg.nodes, dg.edges), fmt::format("graph {} violates edge direction", seed));

        // determinism under edge permutation; cycles contiguous
        auto shuffled = dg;
        Rng rng(seed);
        rng.shuffle(shuffled.edges);
        std::sort(shuffled.edges.begin(), shuffled.edges.end());
        c.expect(pack::topo_order(shuffled) == order, "order depends on edge order");
        const auto reach = oracle_ref::reachability(dg.nodes, dg.edges);
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
        bool has_cycle = false;
        for (const auto& u : dg.nodes) {
            std::vector<std::size_t> members{pos[u]};
            for (const auto& v : reach.at(u))
                if (v != u && reach.at(v).contains(u)) members.push_back(pos[v]);
            if (members.size() > 1) has_cycle = true;
            const auto [lo, hi] = std::minmax_element(members.begin(), members.end());
            c.expect(*hi - *lo + 1 == members.size(), fmt::format("graph {} cycle not contiguous", seed));
        }
        cyclic += has_cycle;

        // partition: every file in exactly one packed sequence, each within cap unless flagged
        std::vector<SourceFile> files;
        for (const auto& node : dg.nodes) files.push_back({node, std::string(4 * (5 + rng.below(60)), 'x')});
        const std::size_t cap = 200;
        const auto seqs = pack::topo_pack(dg, "repo", files, cap);
        std::multiset<std::string> seen;
        for (const auto& s : seqs) {
            seen.insert(s.files.begin(), s.files.end());
            c.expect(s.oversize || s.token_estimate <= cap, "sequence exceeds cap");
            std::vector<std::string> sub_nodes(s.files.begin(), s.files.end());
            std::sort(sub_nodes.begin(), sub_nodes.end());
            std::vector<oracle_ref::Edge> sub_edges;
            for (const auto& e : dg.edges)
                if (std::binary_search(sub_nodes.begin(), sub_nodes.end(), e.first) &&
                    std::binary_search(sub_nodes.begin(), sub_nodes.end(), e.second))
                    sub_edges.push_back(e);
            c.expect(oracle_ref::topo_valid(s.files, sub_nodes, sub_edges), "packed sequence violates edge direction");
        }
        c.expect(seen.size() == n && std::set(seen.begin(), seen.end()).size() == n,
                 fmt::format("graph {} partition broken", seed));
        ++graphs;
    }
    if (c.out.pass) c.out.detail = fmt::format("{} graphs ({} with cycles) ordered, deterministic, partitioned", graphs, cyclic);
    return c.out;
}

Outcome recall_classifier() {
    Check c;
    std::size_t improved = 0;
    double min_acc = 1.0;
    for (int run = 1; run <= 20; ++run) {
        gen::RecallWorld w(1000 + run);
        std::vector<CodeDocument> docs;
        recall::TrainingPools pools;
        std::vector<std::string> unlabeled;
        std::map<std::string, double> quality_scores;
        int next = 0;
        auto add = [&](const std::string& text, double q) {
            const std::string id = fmt::format("w{:06}", next++);
            docs.push_back(CodeDocument::make(id, id + ".md", text));
            quality_scores[id] = q;
            return id;
        };
        for (int i = 0; i < 200; ++i) pools.positives.push_back(add(w.positive(), 0.9));
        for (int i = 0; i < 300; ++i) pools.random_negatives.push_back(add(w.negative(), 0.5));
        for (int i = 0; i < 300; ++i) unlabeled.push_back(add(w.positive(), 0.9));
        for (int i = 0; i < 300; ++i) unlabeled.push_back(add(w.near_miss(), 0.1));
        for (int i = 0; i < 300; ++i) unlabeled.push_back(add(w.negative(), 0.5));
        const DocumentStore store(docs);
        const recall::RecallConfig cfg;

        const auto first = recall::train_recall(pools, store, cfg, 1);
        std::size_t correct = 0;
        for (const auto& id : pools.positives) correct += first.score(store.at(id).content) >= 0.5;
        for (const auto& id : pools.random_negatives) correct += first.score(store.at(id).content) < 0.5;
        const double acc = static_cast<double>(correct) / 500.0;
        min_acc = std::min(min_acc, acc);

        const auto looped = recall::iterate_rounds(pools, store, unlabeled, 2, quality_scores, cfg);

        std::vector<std::string> held_pos, held_near, held_neg;
        for (int i = 0; i < 200; ++i) {
            held_pos.push_back(w.positive());
            held_near.push_back(w.near_miss());
            held_neg.push_back(w.negative());
        }
        auto precision = [&](const recall::RecallModel& m) {
            std::size_t tp = 0, fp = 0;
            for (const auto& t : held_pos) tp += m.score(t) >= 0.5;
            for (const auto& t : held_near) fp += m.score(t) >= 0.5;
            for (const auto& t : held_neg) fp += m.score(t) >= 0.5;
            return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        };
        improved += precision(looped.model) > precision(first);
    }
    c.expect(min_acc >= 0.99, fmt::format("training accuracy {:.4f}", min_acc));
    c.expect(improved >= 19, fmt::format("precision improved in {}/20 runs", improved));
    if (c.out.pass)
        c.out.detail = fmt::format("min training accuracy {:.4f}; precision improved in {}/20 runs", min_acc, improved);
    return c.out;
}

Outcome needle_harness() {
    Check c;
    needle::MatrixOptions opts;
    opts.lengths = {1024, 2048, 4096, 8192, 16384, 32768, 65536, 131072};
    for (int i = 0; i < 8; ++i) opts.depths.push_back(i / 7.0);
    opts.trials = 1;
    opts.seed = 8;
    needle::OracleBackend oracle;
    const auto m = needle::run_matrix(oracle, opts);
    std::size_t perfect = 0;
    for (const auto& row : m.cells)
        for (double v : row) perfect += v == 1.0;
    c.expect(perfect == 64, fmt::format("oracle perfect in {}/64 cells", perfect));

    opts.trials = 4;
    needle::CoinBackend coin(8);
    const auto cm = needle::run_matrix(coin, opts);
    double sum = 0;
    for (const auto& row : cm.cells)
        for (double v : row) sum += v;
    const double n = 64.0 * 4.0;
    const double rate = sum / 64.0;
    const double sigma = std::sqrt(0.25 / n);
    c.expect(std::fabs(rate - 0.5) <= 3 * sigma, fmt::format("coin rate {:.4f} outside 0.5 +- {:.4f}", rate, 3 * sigma));
    if (c.out.pass)
        c.out.detail = fmt::format("oracle 64/64 cells = 1.0 up to 131072 chars; coin {:.4f} within 0.5 +- {:.4f}", rate, 3 * sigma);
    return c.out;
}

// 500 files over 10 repositories: Python modules with imports, duplicates,
// broken files and prose, plus models and a benchmark directory.
void write_pipeline_fixture(const fs::path& root) {
    Rng rng(500);
    const auto vocab = gen::vocabulary(800, rng);
    int written = 0;
    for (int r = 0; r < 10; ++r) {
        const fs::path repo = root / "src" / fmt::format("repo{:02}", r);
        fs::create_directories(repo / "pkg");
        for (int i = 0; i < 50; ++i, ++written) {
            const auto body = gen::as_lines(gen::random_words(40 + rng.below(80), vocab, rng), 8);
            if (i % 10 == 9) {
                std::ofstream(repo / fmt::format("notes{:02}.md", i)) << body;
                continue;
            }
            std::string src;
            if (i > 0) src += fmt::format("import pkg.m{:02}\n", rng.below(static_cast<std::uint64_t>(i)));
            if (i % 17 == 5) src += "def broken(:\n";
            src += fmt::format("def f{}():\n    return \"\"\"{}\"\"\"\n", i, body);
            if (i % 13 == 7 && i > 0) src = fmt::format("import pkg.m{:02}\ndef f0():\n    return 0\n", i - 1);
            std::ofstream(repo / "pkg" / fmt::format("m{:02}.py", i)) << src;
        }
    }
    fs::create_directories(root / "bench" / "mbpp");
    std::ofstream(root / "bench" / "mbpp" / "task.txt") << "write a function that " + gen::join(gen::random_words(12, vocab, rng));

    // scorer over random labels; recall separates code from prose
    std::vector<quality::LabeledDoc> labeled;
    std::vector<CodeDocument> rdocs;
    recall::TrainingPools pools;
    for (int i = 0; i < 200; ++i) {
        const auto words = gen::join(gen::random_words(40, vocab, rng));
        const auto code = CodeDocument::make(fmt::format("c{:03}", i), "x.py", "def f():\n    return \"\"\"" + words + "\"\"\"\n");
        const auto prose = CodeDocument::make(fmt::format("p{:03}", i), "x.md", "## Notes\n" + words + "\nsee the wiki\n");
        labeled.push_back({code, quality::QualityLabel::from_score(code.id, static_cast<int>(rng.below(11)))});
        rdocs.push_back(code);
        rdocs.push_back(prose);
        pools.positives.push_back(code.id);
        pools.random_negatives.push_back(prose.id);
    }
    quality::ScorerConfig scfg;
    scfg.hashing.bucket_bits = 14;
    quality::train_scorer(labeled, scfg).save(root / "scorer.bin");
    recall::RecallConfig rcfg;
    rcfg.hashing.bucket_bits = 16;
    recall::train_recall(pools, DocumentStore(rdocs), rcfg).save(root / "recall.bin");
}

std::map<std::string, std::string> shard_bytes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name == "_SUCCESS" || name == "report.json") continue;
        std::ifstream in(e.path(), std::ios::binary);
        out[name] = std::string(std::istreambuf_iterator<char>(in), {});
    }
    return out;
}

Outcome pipeline_determinism() {
    Check c;
    const auto root = scratch("pipeline");
    write_pipeline_fixture(root);
    auto config = [&](const std::string& out) {
        return pipeline::parse_config(fmt::format(
            "[pipeline]\nseed = 17\nworkers = 2\ninput = {}\noutput = {}\nshard_size = 64\n"
            "stages = ingest, dedup, filter, score, recall, decontam, pack, fim\n\n"
            "[score]\nmodel = {}\n\n[recall]\nmodel = {}\n\n[decontam]\nbenchmarks = {}\n\n"
            "[pack]\ncap_tokens = 2048\n\n[fim]\nratio = 0.5\n",
            (root / "src").string(), (root / out).string(), (root / "scorer.bin").string(),
            (root / "recall.bin").string(), (root / "bench").string()));
    };
    const auto a = config("run-a"), b = config("run-b");
    const auto ra = pipeline::run_pipeline(a);
    const auto rb = pipeline::run_pipeline(b);
    c.expect(ra.complete && rb.complete, "run failed: " + ra.error + rb.error);
    c.expect(!ra.rows.empty() && ra.rows.front().output_docs == 500, "ingest did not see 500 files");
    c.expect(!ra.rows.empty() && ra.rows.back().output_docs > 0, "pipeline produced no output");
    std::size_t compared = 0;
    for (std::size_t i = 0; i < a.stages.size() && c.out.pass; ++i) {
        const auto va = pipeline::latest_complete(pipeline::stage_dir(a, i));
        const auto vb = pipeline::latest_complete(pipeline::stage_dir(b, i));
        c.expect(va && vb, "missing stage output " + a.stages[i].name);
        if (!va || !vb) break;
        c.expect(shard_bytes(*va) == shard_bytes(*vb), "outputs differ at stage " + a.stages[i].name);
        ++compared;
    }

    const std::size_t from = 5;  // decontam
    pipeline::RunOptions opts;
    opts.from = from;
    const auto suffix = pipeline::run_pipeline(a, opts);
    c.expect(suffix.complete && suffix.rows.size() == a.stages.size() - from, "suffix re-run failed");
    for (std::size_t i = from; i < a.stages.size(); ++i) {
        const auto dir = pipeline::stage_dir(a, i);
        c.expect(pipeline::latest_complete(dir) == dir / "v2", "suffix re-run did not write v2 for " + a.stages[i].name);
        c.expect(fs::exists(dir / "v1") && shard_bytes(dir / "v1") == shard_bytes(dir / "v2"),
                 "suffix output differs at " + a.stages[i].name);
    }
    c.expect(pipeline::latest_complete(pipeline::stage_dir(a, from - 1)) == pipeline::stage_dir(a, from - 1) / "v1",
             "prefix stage was rewritten");
    if (c.out.pass)
        c.out.detail = fmt::format("{} stages byte-identical across runs ({} -> {} docs); suffix from {} identical",
                                   compared, ra.rows.front().output_docs, ra.rows.back().output_docs, a.stages[from].name);
    return c.out;
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"dedup-oracle-equivalence", dedup_oracle},
        {"minhash-estimator", minhash_estimator},
        {"quality-metrics", quality_metrics},
        {"rating-extraction", rating_extraction},
        {"percentile-filter", percentile_filter},
        {"fim", fim_checks},
        {"decontamination", decontamination},
        {"bm25", bm25_checks},
        {"commit-eligibility", commit_eligibility},
        {"topological-packing", topological_packing},
        {"recall-classifier", recall_classifier},
        {"needle-harness", needle_harness},
        {"pipeline-determinism", pipeline_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& [name, run] = criteria[i];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        fmt::print("{} [{:2}] {}: {} ({:.1f}s)\n", o.pass ? "PASS" : "FAIL", i + 1, name, o.detail, seconds_since(t0));
        std::fflush(stdout);
    }
    fmt::print("{}/{} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
