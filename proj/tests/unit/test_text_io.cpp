#include <doctest.h>

#include <filesystem>
#include <limits>

#include "adlink/error.hpp"
#include "adlink/io.hpp"
#include "adlink/parallel.hpp"
#include "adlink/random.hpp"
#include "adlink/text.hpp"

using namespace adlink;

TEST_CASE("utf8 decode and encode round-trip") {
    const std::string s = "h\xC3\xA9llo \xF0\x9F\x8C\xBA";
    const auto cps = text::decode_utf8(s);
    CHECK(cps.size() == 7);
    CHECK(cps[1] == U'é');
    CHECK(cps[6] == U'\U0001F33A');
    CHECK(text::encode_utf8(cps) == s);
    CHECK(text::codepoint_count(s) == 7);
}

TEST_CASE("invalid utf8 bytes become replacement characters") {
    const auto cps = text::decode_utf8("a\xFF" "b\xC3");
    REQUIRE(cps.size() == 4);
    CHECK(cps[1] == U'�');
    CHECK(cps[3] == U'�');
    CHECK(text::codepoint_count("a\xFF" "b\xC3") == 4);
}

TEST_CASE("ascii helpers") {
    CHECK(text::ascii_lower("HeLLo \xC3\x89") == "hello \xC3\x89");
    CHECK(text::collapse_spaces("  a \t b\n\nc  ") == "a b c");
}

TEST_CASE("csv split handles quotes") {
    const auto f = io::csv_split("a,\"b,c\",\"d \"\"e\"\"\",");
    REQUIRE(f.size() == 4);
    CHECK(f[1] == "b,c");
    CHECK(f[2] == "d \"e\"");
    CHECK(f[3].empty());
    CHECK(io::csv_escape("x,y") == "\"x,y\"");
    CHECK(io::csv_escape("plain") == "plain");
}

TEST_CASE("parse_csv skips blanks and comments") {
    const auto rows = io::parse_csv("# comment\na,b\n\n1,2\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][1] == "2");
}

TEST_CASE("format_double round-trips") {
    Rng rng(3);
    for (int k = 0; k < 1000; ++k) {
        const double v = (uniform_real(rng) - 0.5) * std::pow(10.0, uniform_int(rng, -8, 8));
        CHECK(io::parse_double(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.25) == "0.25");
    CHECK(io::format_double(3.0) == "3");
    CHECK_THROWS_AS(io::parse_double("abc"), DataError);
    CHECK_THROWS_AS(io::parse_int("1.5"), DataError);
}

TEST_CASE("write_atomic replaces file content") {
    const auto dir = std::filesystem::temp_directory_path() / "adlink_io_test";
    std::filesystem::create_directories(dir);
    const auto p = dir / "x.txt";
    io::write_atomic(p, "one");
    io::write_atomic(p, "two");
    CHECK(io::read_file(p) == "two");
    CHECK(io::file_digest(p).size() == 16);
    CHECK_FALSE(std::filesystem::exists(dir / "x.txt.tmp"));
    CHECK_THROWS_AS(io::read_file(dir / "missing"), DataError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("derive_seed is stable and distinct") {
    CHECK(derive_seed(7, 0) == derive_seed(7, 0));
    CHECK(derive_seed(7, 0) != derive_seed(7, 1));
    CHECK(derive_seed(7, 1) != derive_seed(8, 1));
}

TEST_CASE("parallel_for output does not depend on thread count") {
    for (unsigned threads : {1u, 2u, 3u, 8u}) {
        std::vector<std::size_t> out(101);
        parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = i * i; });
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
    }
    CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                        if (i == 7) throw DataError("boom");
                    }),
                    DataError);
}
