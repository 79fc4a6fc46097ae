#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "curator/commits.hpp"
#include "curator/decontam.hpp"
#include "curator/dedup.hpp"
#include "curator/errors.hpp"
#include "curator/hashing.hpp"
#include "curator/needle.hpp"
#include "curator/oracle_client.hpp"
#include "curator/pipeline.hpp"
#include "curator/quality.hpp"
#include "curator/recall.hpp"
#include "curator/shard_io.hpp"

namespace fs = std::filesystem;
using namespace curator;

namespace {

constexpr int kExitStageFailure = 1;
constexpr int kExitConfigError = 2;

struct Globals {
    std::uint64_t seed = 0;
    unsigned workers = 1;
    std::string config;
    std::string log_level = "info";
    std::size_t shard_size = kDefaultShardSize;
};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
    if (!out) throw IoError("write failed: " + p.string());
}

Json read_json(const fs::path& p) {
    try {
        return Json::parse(read_text(p));
    } catch (const Json::exception& e) {
        throw ConfigError(p.string() + ": " + e.what());
    }
}

std::vector<Json> read_jsonl(const fs::path& p) {
    std::vector<Json> out;
    std::istringstream in(read_text(p));
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(Json::parse(line));
        } catch (const Json::exception& e) {
            throw ConfigError(fmt::format("{}:{}: {}", p.string(), n, e.what()));
        }
    }
    return out;
}

// Runs one pipeline stage over a shard directory and writes the result.
void run_stage_command(const Globals& g, pipeline::StageSpec spec, const std::string& in, const std::string& out,
                       const std::string& report) {
    auto before = read_corpus(in);
    auto result = pipeline::apply_stage(spec, before, g.seed, g.workers);
    write_shards(result.docs, out, g.shard_size);
    auto stats = pipeline::report_stats(before, result.docs, spec.name);
    stats.drop_reasons = result.drop_reasons;
    stats.output_dir = out;
    if (!report.empty()) {
        Json j = result.details;
        j["stats"] = pipeline::to_json(stats);
        write_text(report, j.dump(2) + "\n");
    }
    pipeline::StatsReport r;
    r.rows.push_back(stats);
    std::cout << pipeline::render_table(r);
}

std::map<std::string, quality::QualityLabel> read_labels(const fs::path& p) {
    std::map<std::string, quality::QualityLabel> labels;
    for (const auto& j : read_jsonl(p)) {
        const auto id = j.at("id").get<std::string>();
        labels.emplace(id, quality::label_from_json(id, j));
    }
    return labels;
}

std::vector<quality::LabeledDoc> join_labels(const DocumentStore& store,
                                             const std::map<std::string, quality::QualityLabel>& labels) {
    std::vector<quality::LabeledDoc> out;
    for (const auto& [id, label] : labels) {
        const auto* doc = store.find(id);
        if (!doc) {
            spdlog::warn("label for unknown document {} ignored", id);
            continue;
        }
        out.push_back({*doc, label});
    }
    return out;
}

std::unique_ptr<oracle::CompletionClient> make_client(const std::string& backend, const std::string& endpoint,
                                                      const std::string& model, const std::string& mock_file,
                                                      std::uint64_t seed) {
    if (backend == "http") {
        if (endpoint.empty() || model.empty()) throw ConfigError("http backend needs --endpoint and --model");
        oracle::HttpClientConfig cfg;
        cfg.endpoint = endpoint;
        cfg.model = model;
        return std::make_unique<oracle::HttpCompletionClient>(cfg);
    }
    if (backend == "mock") {
        if (mock_file.empty()) throw ConfigError("mock backend needs --mock-file");
        return std::make_unique<oracle::FileMockClient>(mock_file);
    }
    if (backend == "oracle") return std::make_unique<needle::OracleBackend>();
    if (backend == "coin") return std::make_unique<needle::CoinBackend>(seed);
    if (backend == "constant") return std::make_unique<needle::ConstantBackend>();
    throw ConfigError("unknown backend: " + backend);
}

recall::RecallConfig recall_config(const std::string& path, const Globals& g) {
    recall::RecallConfig cfg = path.empty() ? recall::RecallConfig{} : recall::config_from_json(read_json(path));
    if (path.empty()) cfg.seed = g.seed;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curator: code corpus curation toolkit"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--seed", g.seed, "global random seed");
    app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--config", g.config, "pipeline configuration (INI)");
    app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off");
    app.add_option("--shard-size", g.shard_size, "records per output shard")->check(CLI::PositiveNumber);

    std::function<int()> action;

    // ingest
    {
        auto* cmd = app.add_subcommand("ingest", "turn a source tree into document shards");
        auto root = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        cmd->add_option("--root", *root, "source tree (top-level directories are repositories)")->required();
        cmd->add_option("--out", *out, "output shard directory")->required();
        cmd->add_option("--shard-size", g.shard_size, "records per shard")->check(CLI::PositiveNumber);
        cmd->callback([&, root, out] {
            action = [&, root, out] {
                IngestStats stats;
                auto docs = ingest_tree(*root, &stats);
                write_shards(docs, *out, g.shard_size);
                fmt::print("ingested {} of {} files ({} rejected as non-UTF-8)\n", stats.ingested, stats.files_seen,
                           stats.rejected_encoding);
                return 0;
            };
        });
    }

    // dedup
    {
        auto* cmd = app.add_subcommand("dedup", "exact and near deduplication");
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto report = std::make_shared<std::string>();
        auto threshold = std::make_shared<double>(0.85);
        auto k = std::make_shared<std::size_t>(256);
        auto bands = std::make_shared<std::size_t>(16);
        auto rows = std::make_shared<std::size_t>(16);
        auto shingle = std::make_shared<std::size_t>(5);
        auto repo_level = std::make_shared<bool>(false);
        cmd->add_option("--in", *in)->required();
        cmd->add_option("--out", *out)->required();
        cmd->add_option("--report", *report, "JSON report of groups and drop reasons");
        cmd->add_option("--threshold", *threshold)->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--k", *k, "MinHash permutations");
        cmd->add_option("--bands", *bands);
        cmd->add_option("--rows", *rows);
        cmd->add_option("--shingle", *shingle, "words per shingle");
        cmd->add_flag("--repo-level", *repo_level, "cluster whole repositories and drop every file of a duplicate repo");
        cmd->callback([&, in, out, report, threshold, k, bands, rows, shingle, repo_level] {
            action = [&, in, out, report, threshold, k, bands, rows, shingle, repo_level] {
                pipeline::StageSpec spec{"dedup",
                                         {{"threshold", fmt::format("{}", *threshold)},
                                          {"k", std::to_string(*k)},
                                          {"bands", std::to_string(*bands)},
                                          {"rows", std::to_string(*rows)},
                                          {"shingle", std::to_string(*shingle)}}};
                if (!*repo_level) {
                    run_stage_command(g, spec, *in, *out, *report);
                    return 0;
                }
                auto docs = read_corpus(*in);
                const auto repos = group_repositories(docs);
                dedup::DedupConfig cfg;
                cfg.lsh = {*threshold, *bands, *rows};
                cfg.minhash.k = *k;
                cfg.minhash.shingle_width = *shingle;
                cfg.workers = g.workers;
                const DocumentStore store(docs);
                const auto rep = dedup::repo_level_dedup(repos, store, cfg);
                std::vector<CodeDocument> kept;
                for (const auto& d : docs) {
                    if (!d.repo_id || rep.kept.contains(*d.repo_id)) kept.push_back(d);
                }
                write_shards(kept, *out, g.shard_size);
                if (!report->empty()) write_text(*report, dedup::to_json(rep).dump(2) + "\n");
                fmt::print("repositories: {} kept, {} dropped; documents: {} -> {}\n", rep.kept.size(),
                           rep.dropped.size(), docs.size(), kept.size());
                return 0;
            };
        });
    }

    // filter
    {
        auto* cmd = app.add_subcommand("filter", "syntax and web heuristics filters");
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto report = std::make_shared<std::string>();
        auto rules = std::make_shared<std::string>("syntax");
        cmd->add_option("--in", *in)->required();
        cmd->add_option("--out", *out)->required();
        cmd->add_option("--rules", *rules, "comma-separated: syntax, webmin");
        cmd->add_option("--report", *report);
        cmd->callback([&, in, out, report, rules] {
            action = [&, in, out, report, rules] {
                run_stage_command(g, {"filter", {{"rules", *rules}}}, *in, *out, *report);
                return 0;
            };
        });
    }

    // score
    {
        auto* score = app.add_subcommand("score", "oracle labeling and the quality scorer");
        score->require_subcommand(1);

        auto* label = score->add_subcommand("label", "query the oracle for quality ratings");
        auto l_in = std::make_shared<std::string>();
        auto l_out = std::make_shared<std::string>();
        auto l_backend = std::make_shared<std::string>("http");
        auto l_endpoint = std::make_shared<std::string>();
        auto l_model = std::make_shared<std::string>();
        auto l_mock = std::make_shared<std::string>();
        auto l_sample = std::make_shared<std::size_t>(0);
        auto l_rps = std::make_shared<double>(0.0);
        auto l_retries = std::make_shared<int>(3);
        label->add_option("--in", *l_in)->required();
        label->add_option("--out", *l_out, "labels JSONL")->required();
        label->add_option("--backend", *l_backend, "http|mock");
        label->add_option("--endpoint", *l_endpoint, "chat-completions URL");
        label->add_option("--model", *l_model, "oracle model name");
        label->add_option("--mock-file", *l_mock);
        label->add_option("--sample", *l_sample, "draw this many documents by the reference language plan");
        label->add_option("--rps", *l_rps, "global request rate limit");
        label->add_option("--max-retries", *l_retries);
        label->callback([&, l_in, l_out, l_backend, l_endpoint, l_model, l_mock, l_sample, l_rps, l_retries] {
            action = [&, l_in, l_out, l_backend, l_endpoint, l_model, l_mock, l_sample, l_rps, l_retries] {
                auto docs = read_corpus(*l_in);
                if (*l_sample > 0) {
                    const auto ids = quality::sample_for_labeling(docs, *l_sample, g.seed);
                    const std::set<std::string> chosen(ids.begin(), ids.end());
                    std::erase_if(docs, [&](const CodeDocument& d) { return !chosen.contains(d.id); });
                }
                auto client = make_client(*l_backend, *l_endpoint, *l_model, *l_mock, g.seed);
                quality::LabelOptions opts;
                opts.workers = g.workers;
                opts.max_requests_per_second = *l_rps;
                opts.retry.max_retries = *l_retries;
                const auto outcomes = quality::label_documents(docs, *client, opts);
                std::string text;
                std::size_t failed = 0;
                for (const auto& o : outcomes) {
                    if (!o.label) {
                        ++failed;
                        continue;
                    }
                    Json j = quality::to_json(*o.label);
                    j["id"] = o.doc_id;
                    text += j.dump() + "\n";
                }
                write_text(*l_out, text);
                fmt::print("labeled {} documents, {} failed\n", outcomes.size() - failed, failed);
                return 0;
            };
        });

        auto* train = score->add_subcommand("train", "fit the hashed n-gram scorer");
        auto t_in = std::make_shared<std::string>();
        auto t_labels = std::make_shared<std::string>();
        auto t_model = std::make_shared<std::string>();
        auto t_epochs = std::make_shared<std::size_t>(100);
        auto t_lr = std::make_shared<double>(0.25);
        auto t_l2 = std::make_shared<double>(0.0);
        auto t_bits = std::make_shared<unsigned>(20);
        train->add_option("--in", *t_in, "corpus holding the labeled documents")->required();
        train->add_option("--labels", *t_labels, "labels JSONL")->required();
        train->add_option("--model-out", *t_model)->required();
        train->add_option("--epochs", *t_epochs);
        train->add_option("--lr", *t_lr);
        train->add_option("--l2", *t_l2);
        train->add_option("--bits", *t_bits, "log2 of hash buckets")->check(CLI::Range(1u, 30u));
        train->callback([&, t_in, t_labels, t_model, t_epochs, t_lr, t_l2, t_bits] {
            action = [&, t_in, t_labels, t_model, t_epochs, t_lr, t_l2, t_bits] {
                const DocumentStore store(read_corpus(*t_in));
                const auto labeled = join_labels(store, read_labels(*t_labels));
                quality::ScorerConfig cfg;
                cfg.epochs = *t_epochs;
                cfg.learning_rate = *t_lr;
                cfg.l2 = *t_l2;
                cfg.hashing.bucket_bits = *t_bits;
                cfg.seed = g.seed;
                const auto model = quality::train_scorer(labeled, cfg);
                model.save(*t_model);
                const auto curve = model.loss_curve();
                fmt::print("trained on {} documents; loss {:.6f} -> {:.6f}\n", labeled.size(),
                           curve.empty() ? 0.0 : curve.front(), curve.empty() ? 0.0 : curve.back());
                return 0;
            };
        });

        auto* apply = score->add_subcommand("apply", "score documents and drop the lowest fraction");
        auto a_in = std::make_shared<std::string>();
        auto a_out = std::make_shared<std::string>();
        auto a_model = std::make_shared<std::string>();
        auto a_drop = std::make_shared<double>(0.1);
        auto a_report = std::make_shared<std::string>();
        apply->add_option("--in", *a_in)->required();
        apply->add_option("--out", *a_out)->required();
        apply->add_option("--model", *a_model)->required();
        apply->add_option("--drop-fraction", *a_drop);
        apply->add_option("--report", *a_report);
        apply->callback([&, a_in, a_out, a_model, a_drop, a_report] {
            action = [&, a_in, a_out, a_model, a_drop, a_report] {
                run_stage_command(g, {"score", {{"model", *a_model}, {"drop_fraction", fmt::format("{}", *a_drop)}}},
                                  *a_in, *a_out, *a_report);
                return 0;
            };
        });

        auto* eval = score->add_subcommand("eval", "cMAE and MAE against labels");
        auto e_in = std::make_shared<std::string>();
        auto e_labels = std::make_shared<std::string>();
        auto e_model = std::make_shared<std::string>();
        eval->add_option("--in", *e_in)->required();
        eval->add_option("--labels", *e_labels)->required();
        eval->add_option("--model", *e_model)->required();
        eval->callback([&, e_in, e_labels, e_model] {
            action = [&, e_in, e_labels, e_model] {
                const DocumentStore store(read_corpus(*e_in));
                const auto labeled = join_labels(store, read_labels(*e_labels));
                const auto report = quality::evaluate_scorer(quality::ScorerModel::load(*e_model), labeled);
                std::cout << quality::to_json(report).dump(2) << "\n";
                return 0;
            };
        });

        auto* cut = score->add_subcommand("cut", "percentile cut on existing score tags");
        auto c_in = std::make_shared<std::string>();
        auto c_out = std::make_shared<std::string>();
        auto c_drop = std::make_shared<double>(0.1);
        auto c_tag = std::make_shared<std::string>("score");
        cut->add_option("--in", *c_in)->required();
        cut->add_option("--out", *c_out)->required();
        cut->add_option("--drop-fraction", *c_drop);
        cut->add_option("--tag", *c_tag, "tag holding the score");
        cut->callback([&, c_in, c_out, c_drop, c_tag] {
            action = [&, c_in, c_out, c_drop, c_tag] {
                auto docs = read_corpus(*c_in);
                std::vector<quality::ScoredDoc> scored;
                for (const auto& d : docs) {
                    std::optional<double> s;
                    if (d.tags.contains(*c_tag) && d.tags[*c_tag].is_number()) s = d.tags[*c_tag].get<double>();
                    scored.push_back({d.id, s});
                }
                const auto result = quality::percentile_filter(scored, *c_drop);
                const std::set<std::string> dropped(result.dropped.begin(), result.dropped.end());
                std::erase_if(docs, [&](const CodeDocument& d) { return dropped.contains(d.id); });
                write_shards(docs, *c_out, g.shard_size);
                fmt::print("kept {}, dropped {}\n", result.kept.size(), result.dropped.size());
                return 0;
            };
        });
    }

    // recall
    {
        auto* rc = app.add_subcommand("recall", "hashed n-gram recall classifier");
        rc->require_subcommand(1);

        auto* train = rc->add_subcommand("train", "train one round from pools");
        auto t_in = std::make_shared<std::string>();
        auto t_pools = std::make_shared<std::string>();
        auto t_cfg = std::make_shared<std::string>();
        auto t_model = std::make_shared<std::string>();
        auto t_round = std::make_shared<int>(1);
        train->add_option("--in", *t_in)->required();
        train->add_option("--pools", *t_pools, "JSON {positives, random_negatives, hard_negatives}")->required();
        train->add_option("--config", *t_cfg, "recall configuration JSON");
        train->add_option("--model-out", *t_model)->required();
        train->add_option("--round", *t_round)->check(CLI::PositiveNumber);
        train->callback([&, t_in, t_pools, t_cfg, t_model, t_round] {
            action = [&, t_in, t_pools, t_cfg, t_model, t_round] {
                const DocumentStore store(read_corpus(*t_in));
                const auto pools = recall::pools_from_json(read_json(*t_pools));
                const auto model = recall::train_recall(pools, store, recall_config(*t_cfg, g), *t_round);
                model.save(*t_model);
                fmt::print("trained round {} on {} positives, {} negatives\n", *t_round, pools.positives.size(),
                           pools.random_negatives.size() + pools.hard_negatives.size());
                return 0;
            };
        });

        auto* apply = rc->add_subcommand("apply", "keep documents scoring at or above the threshold");
        auto a_in = std::make_shared<std::string>();
        auto a_out = std::make_shared<std::string>();
        auto a_model = std::make_shared<std::string>();
        auto a_cfg = std::make_shared<std::string>();
        auto a_threshold = std::make_shared<double>(0.5);
        auto a_report = std::make_shared<std::string>();
        apply->add_option("--in", *a_in)->required();
        apply->add_option("--out", *a_out)->required();
        apply->add_option("--model", *a_model)->required();
        apply->add_option("--config", *a_cfg, "recall configuration JSON (threshold, category_thresholds)");
        apply->add_option("--threshold", *a_threshold);
        apply->add_option("--report", *a_report, "per-document scores");
        apply->callback([&, a_in, a_out, a_model, a_cfg, a_threshold, a_report] {
            action = [&, a_in, a_out, a_model, a_cfg, a_threshold, a_report] {
                auto docs = read_corpus(*a_in);
                const auto model = recall::RecallModel::load(*a_model);
                auto cfg = recall_config(*a_cfg, g);
                if (a_cfg->empty()) cfg.threshold = *a_threshold;
                const auto result = recall::apply_recall(model, docs, cfg.threshold, cfg.category_thresholds, g.workers);
                const std::set<std::string> keep(result.recalled.begin(), result.recalled.end());
                std::vector<CodeDocument> kept;
                for (auto& d : docs) {
                    if (!keep.contains(d.id)) continue;
                    d.tags["recall"] = result.scores.at(d.id);
                    kept.push_back(std::move(d));
                }
                write_shards(kept, *a_out, g.shard_size);
                if (!a_report->empty()) write_text(*a_report, Json{{"scores", result.scores}}.dump(2) + "\n");
                fmt::print("recalled {} of {}\n", kept.size(), result.scores.size());
                return 0;
            };
        });

        auto* iterate = rc->add_subcommand("iterate", "2-3 rounds with promotion and hard-negative mining");
        auto i_in = std::make_shared<std::string>();
        auto i_pools = std::make_shared<std::string>();
        auto i_cfg = std::make_shared<std::string>();
        auto i_quality = std::make_shared<std::string>();
        auto i_model = std::make_shared<std::string>();
        auto i_pools_out = std::make_shared<std::string>();
        auto i_rounds = std::make_shared<int>(2);
        iterate->add_option("--in", *i_in, "corpus; documents outside the pools are the unlabeled set")->required();
        iterate->add_option("--pools", *i_pools)->required();
        iterate->add_option("--config", *i_cfg);
        iterate->add_option("--quality", *i_quality, "JSON object id -> quality score in [0, 1]")->required();
        iterate->add_option("--rounds", *i_rounds)->check(CLI::Range(2, 3));
        iterate->add_option("--model-out", *i_model)->required();
        iterate->add_option("--pools-out", *i_pools_out);
        iterate->callback([&, i_in, i_pools, i_cfg, i_quality, i_model, i_pools_out, i_rounds] {
            action = [&, i_in, i_pools, i_cfg, i_quality, i_model, i_pools_out, i_rounds] {
                const DocumentStore store(read_corpus(*i_in));
                const auto pools = recall::pools_from_json(read_json(*i_pools));
                std::set<std::string> pooled(pools.positives.begin(), pools.positives.end());
                pooled.insert(pools.random_negatives.begin(), pools.random_negatives.end());
                pooled.insert(pools.hard_negatives.begin(), pools.hard_negatives.end());
                std::vector<std::string> unlabeled;
                for (const auto& d : store.documents()) {
                    if (!pooled.contains(d.id)) unlabeled.push_back(d.id);
                }
                const auto quality = read_json(*i_quality).get<std::map<std::string, double>>();
                const auto result =
                    recall::iterate_rounds(pools, store, unlabeled, *i_rounds, quality, recall_config(*i_cfg, g));
                result.model.save(*i_model);
                if (!i_pools_out->empty()) write_text(*i_pools_out, recall::to_json(result.pools).dump(2) + "\n");
                for (const auto& r : result.rounds) {
                    fmt::print("round {}: {} positives, {} random, {} hard; promoted {}, mined {}\n", r.round,
                               r.positives, r.random_negatives, r.hard_negatives, r.promoted, r.mined);
                }
                return 0;
            };
        });
    }

    // commits
    {
        auto* cm = app.add_subcommand("commits", "commit sample construction");
        cm->require_subcommand(1);
        auto* format = cm->add_subcommand("format", "eligible, deduplicated commits as training samples");
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto topk = std::make_shared<std::size_t>(commits::kRetrievedFiles);
        format->add_option("--in", *in, "directory of commit-record JSONL files")->required();
        format->add_option("--out", *out)->required();
        format->add_option("--topk", *topk, "files retrieved by BM25")->check(CLI::PositiveNumber);
        format->callback([&, in, out, topk] {
            action = [&, in, out, topk] {
                std::vector<fs::path> files;
                for (const auto& e : fs::directory_iterator(*in)) {
                    if (e.path().extension() == ".jsonl") files.push_back(e.path());
                }
                std::sort(files.begin(), files.end());
                std::vector<commits::CommitRecord> records;
                std::size_t ineligible = 0, invalid = 0;
                for (const auto& f : files) {
                    for (const auto& j : read_jsonl(f)) {
                        auto r = commits::commit_from_json(j);
                        if (!commits::repo_eligible(r.repo)) {
                            ++ineligible;
                            continue;
                        }
                        try {
                            commits::validate(r);
                        } catch (const ConfigError& e) {
                            spdlog::warn("commit {} skipped: {}", r.id, e.what());
                            ++invalid;
                            continue;
                        }
                        records.push_back(std::move(r));
                    }
                }
                const std::size_t before = records.size();
                records = commits::dedup_commits(std::move(records));
                fs::create_directories(*out);
                std::string text;
                for (const auto& r : records) {
                    text += Json{{"id", r.id}, {"repo", r.repo.repo_id}, {"merged", r.merged},
                                 {"text", commits::format_commit_sample(r, *topk)}}
                                .dump() +
                            "\n";
                }
                write_text(fs::path(*out) / "samples.jsonl", text);
                fmt::print("{} samples ({} ineligible repos, {} invalid, {} duplicates)\n", records.size(), ineligible,
                           invalid, before - records.size());
                return 0;
            };
        });
    }

    // pack
    {
        auto* cmd = app.add_subcommand("pack", "repository-level long-context packing");
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto cap = std::make_shared<std::size_t>(32768);
        auto mode = std::make_shared<std::string>("topo");
        auto report = std::make_shared<std::string>();
        cmd->add_option("--in", *in)->required();
        cmd->add_option("--out", *out)->required();
        cmd->add_option("--cap-tokens", *cap)->check(CLI::PositiveNumber);
        cmd->add_option("--mode", *mode)->check(CLI::IsMember({"topo", "random"}));
        cmd->add_option("--report", *report);
        cmd->callback([&, in, out, cap, mode, report] {
            action = [&, in, out, cap, mode, report] {
                run_stage_command(g, {"pack", {{"cap_tokens", std::to_string(*cap)}, {"mode", *mode}}}, *in, *out,
                                  *report);
                return 0;
            };
        });
    }

    // fim
    {
        auto* cmd = app.add_subcommand("fim", "fill-in-the-middle transformation");
        auto in = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto ratio = std::make_shared<double>(0.5);
        auto mode = std::make_shared<std::string>("spm");
        auto report = std::make_shared<std::string>();
        cmd->add_option("--in", *in)->required();
        cmd->add_option("--out", *out)->required();
        cmd->add_option("--ratio", *ratio)->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--mode", *mode)->check(CLI::IsMember({"spm", "psm"}));
        cmd->add_option("--seed", g.seed);
        cmd->add_option("--report", *report);
        cmd->callback([&, in, out, ratio, mode, report] {
            action = [&, in, out, ratio, mode, report] {
                run_stage_command(g, {"fim", {{"ratio", fmt::format("{}", *ratio)}, {"mode", *mode}}}, *in, *out,
                                  *report);
                return 0;
            };
        });
    }

    // decontam
    {
        auto* dc = app.add_subcommand("decontam", "benchmark n-gram decontamination");
        dc->require_subcommand(1);
        auto* build = dc->add_subcommand("build", "index benchmark items");
        auto b_dir = std::make_shared<std::string>();
        auto b_out = std::make_shared<std::string>();
        auto b_n = std::make_shared<std::size_t>(decontam::kDefaultN);
        auto b_exact = std::make_shared<bool>(false);
        build->add_option("--benchmarks", *b_dir)->required();
        build->add_option("--out", *b_out)->required();
        build->add_option("--n", *b_n, "gram length in words")->check(CLI::PositiveNumber);
        build->add_flag("--exact", *b_exact, "store gram strings instead of hashes");
        build->callback([&, b_dir, b_out, b_n, b_exact] {
            action = [&, b_dir, b_out, b_n, b_exact] {
                const auto items = decontam::load_benchmarks(*b_dir);
                decontam::IndexOptions opts;
                opts.n = *b_n;
                opts.exact = *b_exact;
                opts.workers = g.workers;
                const auto index = decontam::build_index(items, opts);
                index.save(*b_out);
                fmt::print("{} items, {} grams ({} short items)\n", items.size(), index.size(), index.short_items().size());
                return 0;
            };
        });
        auto* scrub = dc->add_subcommand("scrub", "remove documents sharing an indexed gram");
        auto s_in = std::make_shared<std::string>();
        auto s_index = std::make_shared<std::string>();
        auto s_out = std::make_shared<std::string>();
        auto s_report = std::make_shared<std::string>();
        scrub->add_option("--in", *s_in)->required();
        scrub->add_option("--index", *s_index)->required();
        scrub->add_option("--out", *s_out)->required();
        scrub->add_option("--report", *s_report);
        scrub->callback([&, s_in, s_index, s_out, s_report] {
            action = [&, s_in, s_index, s_out, s_report] {
                run_stage_command(g, {"decontam", {{"index", *s_index}}}, *s_in, *s_out, *s_report);
                return 0;
            };
        });
    }

    // needle
    {
        auto* nd = app.add_subcommand("needle", "needle-in-the-code pressure test");
        nd->require_subcommand(1);
        auto* run = nd->add_subcommand("run", "accuracy matrix over lengths and depths");
        auto lengths = std::make_shared<std::vector<std::size_t>>();
        auto depths = std::make_shared<std::vector<double>>();
        auto trials = std::make_shared<std::size_t>(1);
        auto backend = std::make_shared<std::string>("oracle");
        auto endpoint = std::make_shared<std::string>();
        auto model = std::make_shared<std::string>();
        auto mock = std::make_shared<std::string>();
        auto report = std::make_shared<std::string>();
        auto image = std::make_shared<std::string>();
        run->add_option("--lengths", *lengths, "context lengths in characters")->required()->delimiter(',');
        run->add_option("--depths", *depths, "needle depths in [0, 1]")->required()->delimiter(',');
        run->add_option("--trials", *trials)->check(CLI::PositiveNumber);
        run->add_option("--backend", *backend, "oracle|coin|constant|http|mock");
        run->add_option("--endpoint", *endpoint);
        run->add_option("--model", *model);
        run->add_option("--mock-file", *mock);
        run->add_option("--report", *report, "heatmap CSV")->required();
        run->add_option("--image", *image, "heatmap PPM");
        run->callback([&, lengths, depths, trials, backend, endpoint, model, mock, report, image] {
            action = [&, lengths, depths, trials, backend, endpoint, model, mock, report, image] {
                auto client = make_client(*backend, *endpoint, *model, *mock, g.seed);
                needle::MatrixOptions opts;
                opts.lengths = *lengths;
                opts.depths = *depths;
                opts.trials = *trials;
                opts.seed = g.seed;
                opts.workers = g.workers;
                if (*backend == "http") opts.retry = oracle::RetryPolicy{};
                const auto m = needle::run_matrix(*client, opts);
                needle::write_csv(m, *report);
                if (!image->empty()) needle::write_ppm(m, *image);
                std::cout << read_text(*report);
                if (m.backend_failures) fmt::print("{} backend failures counted as 0\n", m.backend_failures);
                return 0;
            };
        });
    }

    // run
    {
        auto* cmd = app.add_subcommand("run", "run the configured pipeline");
        auto from = std::make_shared<std::string>();
        auto resume = std::make_shared<bool>(false);
        cmd->add_option("--from", *from, "stage name or zero-based index to start at");
        cmd->add_flag("--resume", *resume, "start at the first stage without completed output");
        cmd->callback([&, from, resume] {
            action = [&, from, resume] {
                if (g.config.empty()) throw ConfigError("run needs --config");
                auto cfg = pipeline::load_config(g.config);
                if (app.get_option("--seed")->count()) cfg.seed = g.seed;
                if (app.get_option("--workers")->count()) cfg.workers = g.workers;
                pipeline::RunOptions opts;
                opts.resume = *resume;
                if (!from->empty()) {
                    std::optional<std::size_t> index;
                    for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
                        if (cfg.stages[i].name == *from) index = i;
                    }
                    if (!index) {
                        try {
                            index = std::stoul(*from);
                        } catch (const std::exception&) {
                            throw ConfigError("--from names no configured stage: " + *from);
                        }
                    }
                    opts.from = index;
                }
                const auto report = pipeline::run_pipeline(cfg, opts);
                std::cout << pipeline::render_table(report);
                write_text(cfg.output / "report.json", pipeline::to_json(report).dump(2) + "\n");
                return report.complete ? 0 : kExitStageFailure;
            };
        });
    }

    // report
    {
        auto* cmd = app.add_subcommand("report", "corpus statistics");
        auto run_dir = std::make_shared<std::string>();
        auto before = std::make_shared<std::string>();
        auto after = std::make_shared<std::string>();
        auto stage = std::make_shared<std::string>("stage");
        auto json = std::make_shared<bool>(false);
        cmd->add_option("--run", *run_dir, "pipeline output directory");
        cmd->add_option("--before", *before, "shard directory before a stage");
        cmd->add_option("--after", *after, "shard directory after a stage");
        cmd->add_option("--stage", *stage, "row label for --before/--after");
        cmd->add_flag("--json", *json);
        cmd->callback([&, run_dir, before, after, stage, json] {
            action = [&, run_dir, before, after, stage, json] {
                pipeline::StatsReport r;
                if (!run_dir->empty()) {
                    r = pipeline::collect_report(*run_dir);
                } else if (!before->empty() && !after->empty()) {
                    const auto a = read_corpus(*before);
                    const auto b = read_corpus(*after);
                    r.rows.push_back(pipeline::report_stats(a, b, *stage));
                } else {
                    throw ConfigError("report needs --run, or --before and --after");
                }
                std::cout << (*json ? pipeline::to_json(r).dump(2) + "\n" : pipeline::render_table(r));
                return 0;
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    spdlog::set_default_logger(spdlog::stderr_color_mt("curator"));
    spdlog::set_level(spdlog::level::from_str(g.log_level));

    try {
        return action ? action() : 0;
    } catch (const ConfigError& e) {
        spdlog::error("{}", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitStageFailure;
    }
}
