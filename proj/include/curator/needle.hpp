#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "curator/oracle_client.hpp"

namespace curator::needle {

/// Generated Python haystack with one needle function whose return value is
/// the expected answer.
struct NeedleCase {
    std::string haystack;
    std::string needle;         // the needle function's source
    std::string needle_name;
    double depth = 0.0;
    std::size_t position = 0;   // index of the needle among the functions
    std::size_t functions = 0;  // fillers plus the needle
    std::size_t needle_offset = 0;
    std::string query;
    std::string expected;

    std::string prompt() const;
};

/// Builds a haystack of at least `length` characters (overshooting by less
/// than one filler function) from seeded filler functions and places the
/// needle at function index round(depth * fillers). Throws ConfigError when
/// `length` is shorter than the needle or depth lies outside [0, 1].
NeedleCase generate_case(std::size_t length, double depth, std::uint64_t seed);

/// Lowercases and collapses whitespace runs to one space.
std::string normalize_answer(std::string_view text);

/// 1 iff the normalized expected string occurs in the normalized answer.
int grade(const NeedleCase& c, std::string_view answer);

/// Answers by locating the queried function in the prompt and reading its
/// return literal.
class OracleBackend final : public oracle::CompletionClient {
public:
    std::string complete(const std::string& prompt) override;
    std::string name() const override { return "oracle"; }
};

class ConstantBackend final : public oracle::CompletionClient {
public:
    explicit ConstantBackend(std::string answer = "no idea") : answer_(std::move(answer)) {}
    std::string complete(const std::string&) override { return answer_; }
    std::string name() const override { return "constant"; }

private:
    std::string answer_;
};

/// Answers correctly for half of all prompts, chosen by a seeded hash of the
/// prompt, and "no idea" otherwise.
class CoinBackend final : public oracle::CompletionClient {
public:
    explicit CoinBackend(std::uint64_t seed) : seed_(seed) {}
    std::string complete(const std::string& prompt) override;
    std::string name() const override { return "coin"; }

private:
    std::uint64_t seed_;
    OracleBackend oracle_;
};

struct MatrixOptions {
    std::vector<std::size_t> lengths;
    std::vector<double> depths;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    oracle::RetryPolicy retry{0, std::chrono::milliseconds(0), 1.0, std::chrono::milliseconds(0)};
};

struct NeedleMatrix {
    std::string backend;
    std::vector<std::size_t> lengths;
    std::vector<double> depths;
    std::size_t trials = 0;
    std::vector<std::vector<double>> cells;  // [length][depth]
    std::size_t backend_failures = 0;
};

/// Runs trials for every (length, depth) cell; trial t of a cell uses case
/// seed mix64(seed + t). Backend failures count as 0 and are logged.
NeedleMatrix run_matrix(oracle::CompletionClient& backend, const MatrixOptions& opts);

/// "length,<depth>,<depth>..." header, then one row per length.
void write_csv(const NeedleMatrix& m, const std::filesystem::path& path);
/// Binary PPM heatmap, red (0) to green (1), one square per cell.
void write_ppm(const NeedleMatrix& m, const std::filesystem::path& path, std::size_t cell_pixels = 32);

}  // namespace curator::needle
