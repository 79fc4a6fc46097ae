#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "curator/errors.hpp"
#include "curator/needle.hpp"
#include "oracles.hpp"

using namespace curator;
using namespace curator::needle;
namespace fs = std::filesystem;

namespace {

struct Failing final : oracle::CompletionClient {
    std::string complete(const std::string&) override { throw oracle::TransientError("down"); }
    std::string name() const override { return "failing"; }
};

}  // namespace

TEST_CASE("haystack length, needle placement and uniqueness") {
    for (std::size_t length : {500u, 4000u, 20000u}) {
        for (double depth : {0.0, 0.3, 0.5, 1.0}) {
            const auto c = generate_case(length, depth, 42);
            CHECK(c.haystack.size() >= length);
            CHECK(oracle_ref::count_occurrences(c.haystack, c.needle) == 1);
            CHECK(oracle_ref::count_occurrences(c.haystack, c.expected) == 1);
            CHECK(c.haystack.compare(c.needle_offset, c.needle.size(), c.needle) == 0);
            const auto fillers = c.functions - 1;
            CHECK(c.position == static_cast<std::size_t>(std::llround(depth * static_cast<double>(fillers))));
            CHECK(c.query.find(c.needle_name) != std::string::npos);
        }
    }
    const auto a = generate_case(3000, 0.5, 7), b = generate_case(3000, 0.5, 7);
    CHECK(a.haystack == b.haystack);
    CHECK(generate_case(3000, 0.5, 8).haystack != a.haystack);
    CHECK_THROWS_AS(generate_case(3000, 1.5, 7), ConfigError);
    CHECK_THROWS_AS(generate_case(5, 0.5, 7), ConfigError);
}

TEST_CASE("needle at depth 0 is first and at depth 1 is last") {
    const auto first = generate_case(5000, 0.0, 1);
    CHECK(first.needle_offset == 0);
    const auto last = generate_case(5000, 1.0, 1);
    CHECK(last.position == last.functions - 1);
}

TEST_CASE("grading normalizes case and whitespace") {
    const auto c = generate_case(1000, 0.5, 3);
    CHECK(normalize_answer("  A \n\t B  ") == "a b");
    CHECK(grade(c, "The answer is " + c.expected) == 1);
    CHECK(grade(c, "The answer is " + normalize_answer(c.expected)) == 1);
    CHECK(grade(c, "no idea") == 0);
}

TEST_CASE("backends") {
    const auto c = generate_case(2000, 0.4, 9);
    OracleBackend o;
    CHECK(grade(c, o.complete(c.prompt())) == 1);
    ConstantBackend k;
    CHECK(grade(c, k.complete(c.prompt())) == 0);
    CoinBackend coin(1);
    CHECK(coin.complete(c.prompt()) == coin.complete(c.prompt()));
}

TEST_CASE("matrix shape, extremes and failures") {
    MatrixOptions opts;
    opts.lengths = {500, 1500};
    opts.depths = {0.0, 0.5, 1.0};
    opts.trials = 4;
    OracleBackend o;
    const auto m = run_matrix(o, opts);
    REQUIRE(m.cells.size() == 2);
    for (const auto& row : m.cells) {
        REQUIRE(row.size() == 3);
        for (double v : row) CHECK(v == 1.0);
    }
    ConstantBackend k;
    for (const auto& row : run_matrix(k, opts).cells)
        for (double v : row) CHECK(v == 0.0);
    Failing f;
    const auto fm = run_matrix(f, opts);
    CHECK(fm.backend_failures == 24);
    CHECK(fm.cells[0][0] == 0.0);

    const auto csv = fs::temp_directory_path() / "curator-unit-needle.csv";
    write_csv(m, csv);
    std::ifstream in(csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "length,0,0.5,1");
    CHECK(row == "500,1.0000,1.0000,1.0000");

    const auto ppm = fs::temp_directory_path() / "curator-unit-needle.ppm";
    write_ppm(m, ppm, 4);
    std::ifstream img(ppm, std::ios::binary);
    std::string magic;
    std::size_t w = 0, h = 0;
    img >> magic >> w >> h;
    CHECK(magic == "P6");
    CHECK(w == 12);
    CHECK(h == 8);
}
