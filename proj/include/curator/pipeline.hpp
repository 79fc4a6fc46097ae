#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curator/document.hpp"

namespace curator::pipeline {

namespace fs = std::filesystem;

struct StageSpec {
    std::string name;
    std::map<std::string, std::string> params;
};

/// Parsed from an INI file:
///
///   [pipeline]
///   seed = 42
///   workers = 4
///   input = raw/
///   output = runs/
///   stages = ingest, dedup, filter
///   shard_size = 10000
///
///   [dedup]
///   threshold = 0.85
///
/// `input` is a source tree when the first stage is ingest, otherwise a shard
/// directory. Each stage reads its parameters from the section of the same name.
struct PipelineConfig {
    std::uint64_t seed = 0;
    unsigned workers = 1;
    fs::path input;
    fs::path output;
    std::size_t shard_size = 10000;
    std::vector<StageSpec> stages;
};

/// Stage names the runner knows.
std::span<const std::string> known_stages();

/// Throws ConfigError on unknown or repeated stages, unknown parameters or
/// values that do not parse.
void validate(const PipelineConfig& cfg);

PipelineConfig parse_config(const std::string& ini_text);
PipelineConfig load_config(const fs::path& path);

struct StageStats {
    std::string stage;
    std::size_t input_docs = 0;
    std::size_t output_docs = 0;
    std::uint64_t input_bytes = 0;
    std::uint64_t output_bytes = 0;
    std::map<std::string, std::size_t> drop_reasons;
    double wall_seconds = 0.0;
    std::string output_dir;

    /// Fraction of input documents removed; 0 for empty input or growth.
    double reduction() const;
};

/// "98.0%" style.
std::string format_reduction(double fraction);

/// Counts and bytes for a stage that turned `before` into `after`.
StageStats report_stats(std::span<const CodeDocument> before, std::span<const CodeDocument> after,
                        const std::string& stage);

Json to_json(const StageStats& s);
StageStats stats_from_json(const Json& j);

struct StatsReport {
    std::vector<StageStats> rows;
    bool complete = true;
    std::string failed_stage;
    std::string error;
};

Json to_json(const StatsReport& r);
/// Fixed-width text table.
std::string render_table(const StatsReport& r);

/// Result of one stage: the documents it produced plus a detail report.
struct StageOutput {
    std::vector<CodeDocument> docs;
    std::map<std::string, std::size_t> drop_reasons;
    Json details = Json::object();
};

/// Runs a single stage in memory.
StageOutput apply_stage(const StageSpec& stage, std::vector<CodeDocument> docs, std::uint64_t seed, unsigned workers);

/// Directory of stage `index` (zero-based): <output>/<NN>-<name>.
fs::path stage_dir(const PipelineConfig& cfg, std::size_t index);
/// Highest version directory containing a _SUCCESS marker.
std::optional<fs::path> latest_complete(const fs::path& stage_root);

struct RunOptions {
    /// Start at this stage, reading the latest completed output of the one before.
    std::optional<std::size_t> from;
    /// Start at the first stage without a completed output.
    bool resume = false;
};

/// Runs stages in order. Each stage writes shards to a fresh version directory
/// <output>/<NN>-<stage>/v<k> and finishes it with a _SUCCESS file holding its
/// stats. A stage failure stops the run and returns a partial report.
StatsReport run_pipeline(const PipelineConfig& cfg, const RunOptions& opts = {});

/// Stats of the latest completed version of every stage under `output`.
StatsReport collect_report(const fs::path& output);

}  // namespace curator::pipeline
