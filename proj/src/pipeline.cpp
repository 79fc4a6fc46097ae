#include "curator/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "curator/basic_filter.hpp"
#include "curator/decontam.hpp"
#include "curator/dedup.hpp"
#include "curator/errors.hpp"
#include "curator/fim.hpp"
#include "curator/language.hpp"
#include "curator/longctx.hpp"
#include "curator/parallel.hpp"
#include "curator/quality.hpp"
#include "curator/recall.hpp"
#include "curator/shard_io.hpp"

namespace curator::pipeline {

namespace {

const std::vector<std::string> kStages = {"ingest", "dedup", "filter", "score", "recall", "decontam", "pack", "fim"};

const std::map<std::string, std::set<std::string>>& allowed_params() {
    static const std::map<std::string, std::set<std::string>> table = {
        {"ingest", {}},
        {"dedup", {"threshold", "k", "bands", "rows", "shingle", "hash_seed", "exact", "near"}},
        {"filter", {"rules"}},
        {"score", {"model", "drop_fraction"}},
        {"recall", {"model", "threshold"}},
        {"decontam", {"index", "benchmarks", "n"}},
        {"pack", {"cap_tokens", "mode"}},
        {"fim", {"ratio", "mode"}},
    };
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string param(const StageSpec& s, const std::string& key, const std::string& fallback) {
    auto it = s.params.find(key);
    return it == s.params.end() ? fallback : it->second;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto* end = v.data() + v.size();
    auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end || v.empty()) throw ConfigError(key + ": not a non-negative integer: '" + v + "'");
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::logic_error&) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::uint64_t total_bytes(std::span<const CodeDocument> docs) {
    std::uint64_t n = 0;
    for (const auto& d : docs) n += d.content.size();
    return n;
}

// "near-duplicate-of:x" -> "near-duplicate"
std::string reason_kind(const std::string& reason) {
    auto pos = reason.find("-of:");
    return pos == std::string::npos ? reason : reason.substr(0, pos);
}

dedup::DedupConfig dedup_config(const StageSpec& s, unsigned workers) {
    dedup::DedupConfig c;
    c.lsh.threshold = to_double("dedup.threshold", param(s, "threshold", "0.85"));
    c.minhash.k = to_u64("dedup.k", param(s, "k", "256"));
    c.lsh.bands = to_u64("dedup.bands", param(s, "bands", "16"));
    c.lsh.rows = to_u64("dedup.rows", param(s, "rows", "16"));
    c.minhash.shingle_width = to_u64("dedup.shingle", param(s, "shingle", "5"));
    c.minhash.seed = to_u64("dedup.hash_seed", param(s, "hash_seed", "1"));
    c.exact = to_bool("dedup.exact", param(s, "exact", "true"));
    c.near = to_bool("dedup.near", param(s, "near", "true"));
    c.workers = workers;
    if (c.lsh.bands * c.lsh.rows != c.minhash.k) throw ConfigError("dedup: bands * rows must equal k");
    if (c.lsh.threshold < 0.0 || c.lsh.threshold > 1.0) throw ConfigError("dedup.threshold must lie in [0, 1]");
    if (c.minhash.shingle_width == 0) throw ConfigError("dedup.shingle must be >= 1");
    return c;
}

void check_stage_params(const StageSpec& s) {
    const auto& allowed = allowed_params().at(s.name);
    for (const auto& [key, value] : s.params) {
        if (!allowed.contains(key)) throw ConfigError("unknown parameter " + s.name + "." + key);
    }
    if (s.name == "dedup") {
        dedup_config(s, 1);
    } else if (s.name == "filter") {
        filter::parse_rules(param(s, "rules", "syntax"));
    } else if (s.name == "score") {
        if (!s.params.contains("model")) throw ConfigError("score.model is required");
        const double f = to_double("score.drop_fraction", param(s, "drop_fraction", "0.1"));
        if (f < 0.0 || f >= 1.0) throw ConfigError("score.drop_fraction must lie in [0, 1)");
    } else if (s.name == "recall") {
        if (!s.params.contains("model")) throw ConfigError("recall.model is required");
        to_double("recall.threshold", param(s, "threshold", "0.5"));
    } else if (s.name == "decontam") {
        if (s.params.contains("index") == s.params.contains("benchmarks"))
            throw ConfigError("decontam needs exactly one of index or benchmarks");
        if (to_u64("decontam.n", param(s, "n", "10")) == 0) throw ConfigError("decontam.n must be >= 1");
    } else if (s.name == "pack") {
        if (to_u64("pack.cap_tokens", param(s, "cap_tokens", "32768")) == 0) throw ConfigError("pack.cap_tokens must be >= 1");
        const auto mode = param(s, "mode", "topo");
        if (mode != "topo" && mode != "random") throw ConfigError("pack.mode must be topo or random");
    } else if (s.name == "fim") {
        const double r = to_double("fim.ratio", param(s, "ratio", "0.5"));
        if (r < 0.0 || r > 1.0) throw ConfigError("fim.ratio must lie in [0, 1]");
        fim::parse_mode(param(s, "mode", "spm"));
    }
}

StageOutput run_dedup(const StageSpec& s, std::vector<CodeDocument> docs, unsigned workers) {
    const auto report = dedup::deduplicate(docs, dedup_config(s, workers));
    StageOutput out;
    for (auto& d : docs) {
        if (report.kept.contains(d.id)) out.docs.push_back(std::move(d));
    }
    for (const auto& [id, reason] : report.dropped) ++out.drop_reasons[reason_kind(reason)];
    out.details = dedup::to_json(report);
    return out;
}

StageOutput run_filter(const StageSpec& s, std::vector<CodeDocument> docs, unsigned workers) {
    const auto rules = filter::parse_rules(param(s, "rules", "syntax"));
    const auto verdicts = filter::run_filters(docs, rules, filter::ParserRegistry{}, workers);
    StageOutput out;
    Json dropped = Json::array();
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& v = verdicts[i];
        if (v.kept) {
            if (!v.flags.empty()) docs[i].tags["filter"] = {{"flags", v.flags}};
            out.docs.push_back(std::move(docs[i]));
        } else {
            ++out.drop_reasons[v.rule];
            dropped.push_back({{"id", v.doc_id}, {"rule", v.rule}});
        }
    }
    out.details = {{"dropped", dropped}};
    return out;
}

StageOutput run_score(const StageSpec& s, std::vector<CodeDocument> docs, unsigned workers) {
    const auto model = quality::ScorerModel::load(param(s, "model", ""));
    const double fraction = to_double("score.drop_fraction", param(s, "drop_fraction", "0.1"));
    std::vector<quality::ScoredDoc> scored(docs.size());
    parallel_for(docs.size(), workers, [&](std::size_t i) { scored[i] = {docs[i].id, model.predict(docs[i])}; });
    const auto cut = quality::percentile_filter(scored, fraction);
    const std::set<std::string> dropped(cut.dropped.begin(), cut.dropped.end());
    StageOutput out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (dropped.contains(docs[i].id)) continue;
        docs[i].tags["score"] = *scored[i].score;
        out.docs.push_back(std::move(docs[i]));
    }
    if (!dropped.empty()) out.drop_reasons["low-quality"] = dropped.size();
    out.details = {{"dropped", cut.dropped}, {"drop_fraction", fraction}};
    return out;
}

StageOutput run_recall(const StageSpec& s, std::vector<CodeDocument> docs, unsigned workers) {
    const auto model = recall::RecallModel::load(param(s, "model", ""));
    const double threshold = to_double("recall.threshold", param(s, "threshold", "0.5"));
    const auto result = recall::apply_recall(model, docs, threshold, {}, workers);
    const std::set<std::string> recalled(result.recalled.begin(), result.recalled.end());
    StageOutput out;
    for (auto& d : docs) {
        if (!recalled.contains(d.id)) continue;
        d.tags["recall"] = result.scores.at(d.id);
        out.docs.push_back(std::move(d));
    }
    if (docs.size() > out.docs.size()) out.drop_reasons["not-recalled"] = docs.size() - out.docs.size();
    out.details = {{"threshold", threshold}, {"round", model.round()}};
    return out;
}

StageOutput run_decontam(const StageSpec& s, std::vector<CodeDocument> docs, unsigned workers) {
    decontam::NgramIndex index;
    if (s.params.contains("index")) {
        index = decontam::NgramIndex::load(param(s, "index", ""));
    } else {
        decontam::IndexOptions opts;
        opts.n = to_u64("decontam.n", param(s, "n", "10"));
        opts.workers = workers;
        index = decontam::build_index(decontam::load_benchmarks(param(s, "benchmarks", "")), opts);
    }
    const auto result = decontam::scrub(docs, index, workers);
    std::set<std::string> removed;
    for (const auto& r : result.removed) removed.insert(r.doc_id);
    StageOutput out;
    for (auto& d : docs) {
        if (!removed.contains(d.id)) out.docs.push_back(std::move(d));
    }
    for (const auto& r : result.removed) ++out.drop_reasons["contaminated:" + r.source.benchmark];
    out.details = decontam::to_json(result);
    return out;
}

StageOutput run_pack(const StageSpec& s, std::vector<CodeDocument> docs, std::uint64_t seed) {
    const std::size_t cap = to_u64("pack.cap_tokens", param(s, "cap_tokens", "32768"));
    const bool topo = param(s, "mode", "topo") == "topo";
    const auto rules = pack::ImportRules::defaults();

    std::map<std::string, std::vector<const CodeDocument*>> repos;
    for (const auto& d : docs) repos[d.repo_id.value_or(d.id)].push_back(&d);

    StageOutput out;
    Json summary = Json::array();
    for (const auto& [repo_id, members] : repos) {
        std::vector<SourceFile> files;
        std::map<std::string, std::size_t> language_counts;
        for (const auto* d : members) {
            files.push_back({d->path.empty() ? d->id : d->path, d->content});
            if (rules.find(d->language)) ++language_counts[d->language];
        }
        std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
        for (std::size_t i = 1; i < files.size(); ++i) {
            if (files[i].path == files[i - 1].path) throw ConfigError("repository " + repo_id + " has duplicate path " + files[i].path);
        }
        std::string language;
        std::size_t best = 0;
        for (const auto& [lang, count] : language_counts) {
            if (count > best) {
                best = count;
                language = lang;
            }
        }
        std::vector<pack::PackedSequence> seqs;
        const bool use_topo = topo && !language.empty();
        if (use_topo) {
            seqs = pack::topo_pack(pack::extract_deps(files, language, rules), repo_id, files, cap);
        } else {
            seqs = pack::random_pack(repo_id, files, {}, seed, cap);
        }
        for (std::size_t k = 0; k < seqs.size(); ++k) {
            auto& seq = seqs[k];
            CodeDocument d;
            d.id = fmt::format("{}#{:04}", repo_id, k);
            d.repo_id = repo_id;
            d.path = repo_id;
            d.language = language.empty() ? "unknown" : language;
            d.content = std::move(seq.text);
            d.byte_len = d.content.size();
            d.tags["pack"] = {{"files", seq.files},
                              {"mode", use_topo ? "topo" : "random"},
                              {"token_estimate", seq.token_estimate},
                              {"oversize", seq.oversize}};
            out.docs.push_back(std::move(d));
        }
        summary.push_back({{"repo", repo_id}, {"files", files.size()}, {"sequences", seqs.size()}});
    }
    out.details = {{"repos", summary}};
    return out;
}

StageOutput run_fim(const StageSpec& s, std::vector<CodeDocument> docs, std::uint64_t seed, unsigned workers) {
    fim::FimOptions opts;
    opts.ratio = to_double("fim.ratio", param(s, "ratio", "0.5"));
    opts.mode = fim::parse_mode(param(s, "mode", "spm"));
    opts.seed = seed;
    opts.workers = workers;
    auto emitted = fim::emit_corpus(docs, opts);
    std::size_t transformed = 0, collisions = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto& e = emitted[i];
        transformed += e.fim;
        collisions += e.sentinel_collision;
        docs[i].content = std::move(e.text);
        docs[i].byte_len = docs[i].content.size();
        docs[i].tags["fim"] = {{"applied", e.fim}, {"mode", fim::mode_name(opts.mode)}};
        if (e.sentinel_collision) docs[i].tags["fim"]["flag"] = "sentinel-collision";
    }
    StageOutput out;
    out.docs = std::move(docs);
    out.details = {{"ratio", opts.ratio}, {"fim", transformed}, {"sentinel_collisions", collisions}};
    return out;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
    if (!out) throw IoError("write failed: " + p.string());
}

std::size_t version_number(const fs::path& p) {
    const std::string name = p.filename().string();
    if (name.size() < 2 || name[0] != 'v') return 0;
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
    return (ec == std::errc{} && ptr == name.data() + name.size()) ? v : 0;
}

}  // namespace

std::span<const std::string> known_stages() { return kStages; }

void validate(const PipelineConfig& cfg) {
    if (cfg.stages.empty()) throw ConfigError("pipeline has no stages");
    if (cfg.output.empty()) throw ConfigError("pipeline output is not set");
    if (cfg.input.empty()) throw ConfigError("pipeline input is not set");
    if (cfg.shard_size == 0) throw ConfigError("shard_size must be >= 1");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
        const auto& s = cfg.stages[i];
        if (!allowed_params().contains(s.name)) throw ConfigError("unknown stage: " + s.name);
        if (!seen.insert(s.name).second) throw ConfigError("stage listed twice: " + s.name);
        if (s.name == "ingest" && i != 0) throw ConfigError("ingest must be the first stage");
        check_stage_params(s);
    }
}

PipelineConfig parse_config(const std::string& ini_text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(ini_text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const auto root = tree.get_child_optional("pipeline");
    if (!root) throw ConfigError("config: missing [pipeline] section");

    PipelineConfig cfg;
    std::string stages;
    for (const auto& [key, node] : *root) {
        const std::string value = trim(node.data());
        if (key == "seed") {
            cfg.seed = to_u64("pipeline.seed", value);
        } else if (key == "workers") {
            cfg.workers = static_cast<unsigned>(to_u64("pipeline.workers", value));
        } else if (key == "input") {
            cfg.input = value;
        } else if (key == "output") {
            cfg.output = value;
        } else if (key == "shard_size") {
            cfg.shard_size = to_u64("pipeline.shard_size", value);
        } else if (key == "stages") {
            stages = value;
        } else {
            throw ConfigError("unknown parameter pipeline." + key);
        }
    }
    if (cfg.workers == 0) throw ConfigError("pipeline.workers must be >= 1");
    std::stringstream list(stages);
    std::string name;
    while (std::getline(list, name, ',')) {
        name = trim(name);
        if (name.empty()) continue;
        StageSpec spec{name, {}};
        if (auto section = tree.get_child_optional(name)) {
            for (const auto& [key, node] : *section) spec.params[key] = trim(node.data());
        }
        cfg.stages.push_back(std::move(spec));
    }
    for (const auto& [section, node] : tree) {
        if (section == "pipeline") continue;
        const bool used = std::any_of(cfg.stages.begin(), cfg.stages.end(), [&](const auto& s) { return s.name == section; });
        if (!used) spdlog::warn("config: section [{}] names no configured stage; ignored", section);
    }
    validate(cfg);
    return cfg;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto cfg = parse_config(buf.str());
    const fs::path base = path.parent_path();
    if (cfg.input.is_relative()) cfg.input = base / cfg.input;
    if (cfg.output.is_relative()) cfg.output = base / cfg.output;
    return cfg;
}

double StageStats::reduction() const {
    if (input_docs == 0 || output_docs >= input_docs) return 0.0;
    return static_cast<double>(input_docs - output_docs) / static_cast<double>(input_docs);
}

std::string format_reduction(double fraction) { return fmt::format("{:.1f}%", 100.0 * fraction); }

StageStats report_stats(std::span<const CodeDocument> before, std::span<const CodeDocument> after,
                        const std::string& stage) {
    StageStats s;
    s.stage = stage;
    s.input_docs = before.size();
    s.output_docs = after.size();
    s.input_bytes = total_bytes(before);
    s.output_bytes = total_bytes(after);
    return s;
}

Json to_json(const StageStats& s) {
    return {{"stage", s.stage},
            {"input_docs", s.input_docs},
            {"output_docs", s.output_docs},
            {"input_bytes", s.input_bytes},
            {"output_bytes", s.output_bytes},
            {"reduction", format_reduction(s.reduction())},
            {"drop_reasons", s.drop_reasons},
            {"wall_seconds", s.wall_seconds},
            {"output_dir", s.output_dir}};
}

StageStats stats_from_json(const Json& j) {
    StageStats s;
    s.stage = j.at("stage").get<std::string>();
    s.input_docs = j.at("input_docs").get<std::size_t>();
    s.output_docs = j.at("output_docs").get<std::size_t>();
    s.input_bytes = j.at("input_bytes").get<std::uint64_t>();
    s.output_bytes = j.at("output_bytes").get<std::uint64_t>();
    s.drop_reasons = j.value("drop_reasons", std::map<std::string, std::size_t>{});
    s.wall_seconds = j.value("wall_seconds", 0.0);
    s.output_dir = j.value("output_dir", std::string{});
    return s;
}

Json to_json(const StatsReport& r) {
    Json rows = Json::array();
    for (const auto& s : r.rows) rows.push_back(to_json(s));
    Json j = {{"stages", rows}, {"complete", r.complete}};
    if (!r.complete) {
        j["failed_stage"] = r.failed_stage;
        j["error"] = r.error;
    }
    return j;
}

std::string render_table(const StatsReport& r) {
    std::string out = fmt::format("{:<10} {:>10} {:>10} {:>14} {:>14} {:>9} {:>9}\n", "stage", "in", "out", "in_bytes",
                                  "out_bytes", "reduction", "seconds");
    for (const auto& s : r.rows) {
        out += fmt::format("{:<10} {:>10} {:>10} {:>14} {:>14} {:>9} {:>9.2f}\n", s.stage, s.input_docs, s.output_docs,
                           s.input_bytes, s.output_bytes, format_reduction(s.reduction()), s.wall_seconds);
        for (const auto& [reason, count] : s.drop_reasons) out += fmt::format("  {:<30} {:>10}\n", reason, count);
    }
    if (!r.complete) out += fmt::format("FAILED at {}: {}\n", r.failed_stage, r.error);
    return out;
}

StageOutput apply_stage(const StageSpec& stage, std::vector<CodeDocument> docs, std::uint64_t seed, unsigned workers) {
    if (stage.name == "dedup") return run_dedup(stage, std::move(docs), workers);
    if (stage.name == "filter") return run_filter(stage, std::move(docs), workers);
    if (stage.name == "score") return run_score(stage, std::move(docs), workers);
    if (stage.name == "recall") return run_recall(stage, std::move(docs), workers);
    if (stage.name == "decontam") return run_decontam(stage, std::move(docs), workers);
    if (stage.name == "pack") return run_pack(stage, std::move(docs), seed);
    if (stage.name == "fim") return run_fim(stage, std::move(docs), seed, workers);
    if (stage.name == "ingest") throw ConfigError("ingest reads a source tree, not documents");
    throw ConfigError("unknown stage: " + stage.name);
}

fs::path stage_dir(const PipelineConfig& cfg, std::size_t index) {
    return cfg.output / fmt::format("{:02}-{}", index, cfg.stages.at(index).name);
}

std::optional<fs::path> latest_complete(const fs::path& stage_root) {
    if (!fs::is_directory(stage_root)) return std::nullopt;
    std::optional<fs::path> best;
    std::size_t best_v = 0;
    for (const auto& e : fs::directory_iterator(stage_root)) {
        const std::size_t v = version_number(e.path());
        if (v > best_v && fs::exists(e.path() / "_SUCCESS")) {
            best_v = v;
            best = e.path();
        }
    }
    return best;
}

StatsReport run_pipeline(const PipelineConfig& cfg, const RunOptions& opts) {
    validate(cfg);
    std::size_t start = 0;
    if (opts.from) {
        start = *opts.from;
        if (start >= cfg.stages.size()) throw ConfigError(fmt::format("--from {} is past the last stage", start));
    } else if (opts.resume) {
        while (start < cfg.stages.size() && latest_complete(stage_dir(cfg, start))) ++start;
        if (start == cfg.stages.size()) {
            spdlog::info("pipeline: every stage already complete");
            return collect_report(cfg.output);
        }
    }

    fs::path input = cfg.input;
    if (start > 0) {
        auto prev = latest_complete(stage_dir(cfg, start - 1));
        if (!prev) throw ConfigError("stage " + cfg.stages[start - 1].name + " has no completed output to resume from");
        input = *prev;
    }

    StatsReport report;
    for (std::size_t i = start; i < cfg.stages.size(); ++i) {
        const auto& stage = cfg.stages[i];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            std::vector<CodeDocument> before;
            StageOutput out;
            if (stage.name == "ingest") {
                IngestStats ingest;
                out.docs = ingest_tree(input, &ingest);
                if (ingest.rejected_encoding) out.drop_reasons["non-utf8"] = ingest.rejected_encoding;
                out.details = {{"files_seen", ingest.files_seen}, {"ingested", ingest.ingested}};
            } else {
                before = read_corpus(input);
                out = apply_stage(stage, before, cfg.seed, cfg.workers);
            }

            const fs::path root = stage_dir(cfg, i);
            fs::create_directories(root);
            std::size_t next = 1;
            for (const auto& e : fs::directory_iterator(root)) next = std::max(next, version_number(e.path()) + 1);
            const fs::path dir = root / fmt::format("v{}", next);
            fs::create_directories(dir);
            write_shards(out.docs, dir, cfg.shard_size);
            write_text(dir / "report.json", out.details.dump(2) + "\n");

            StageStats stats = report_stats(before, out.docs, stage.name);
            if (stage.name == "ingest") {
                stats.input_docs = out.details.at("files_seen").get<std::size_t>();
                stats.input_bytes = stats.output_bytes;
            }
            stats.drop_reasons = out.drop_reasons;
            stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            stats.output_dir = dir.string();
            write_text(dir / "_SUCCESS", to_json(stats).dump(2) + "\n");
            spdlog::info("pipeline: {} {} -> {} docs ({})", stage.name, stats.input_docs, stats.output_docs,
                         format_reduction(stats.reduction()));
            report.rows.push_back(std::move(stats));
            input = dir;
        } catch (const std::exception& e) {
            spdlog::error("pipeline: stage {} failed: {}", stage.name, e.what());
            report.complete = false;
            report.failed_stage = stage.name;
            report.error = e.what();
            break;
        }
    }
    return report;
}

StatsReport collect_report(const fs::path& output) {
    StatsReport report;
    if (!fs::is_directory(output)) throw ConfigError("no pipeline output at " + output.string());
    std::vector<fs::path> stages;
    for (const auto& e : fs::directory_iterator(output)) {
        if (e.is_directory()) stages.push_back(e.path());
    }
    std::sort(stages.begin(), stages.end());
    for (const auto& s : stages) {
        auto dir = latest_complete(s);
        if (!dir) continue;
        std::ifstream in(*dir / "_SUCCESS");
        report.rows.push_back(stats_from_json(Json::parse(in)));
    }
    return report;
}

}  // namespace curator::pipeline
