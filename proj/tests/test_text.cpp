#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "doctest.h"

#include "dsrim/random.hpp"
#include "dsrim/text.hpp"

using namespace dsrim;

TEST_CASE("tokenize lowercases and splits on non-alphanumeric runs")
{
    CHECK(tokenize("Hello, World! x2") == std::vector<std::string>{"hello", "world", "x2"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("--- ...").empty());
    // UTF-8 bytes are separators: "caf\xc3\xa9 bar" -> caf, bar
    CHECK(tokenize("caf\xc3\xa9 bar") == std::vector<std::string>{"caf", "bar"});
    CHECK(tokenize("a_b-c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("split keeps empty fields, split_whitespace drops them")
{
    const auto fields = split("a\t\tb", '\t');
    REQUIRE(fields.size() == 3);
    CHECK(fields[1].empty());
    CHECK(split_whitespace("  a \t b  ").size() == 2);
    CHECK(trim("  x y \t") == "x y");
}

TEST_CASE("number parsing")
{
    CHECK(parse_double("1.5e-3").value() == doctest::Approx(0.0015));
    CHECK(parse_double("+2").value() == 2.0);
    CHECK_FALSE(parse_double("1.5x"));
    CHECK_FALSE(parse_double(""));
    CHECK(parse_int("-42").value() == -42);
    CHECK_FALSE(parse_int("4.2"));
}

TEST_CASE("format_double round-trips bit-exactly")
{
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-30.0, 30.0));
        const double y = parse_double(format_double(x)).value();
        CHECK(std::memcmp(&x, &y, sizeof x) == 0);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("read_line strips carriage returns and counts lines")
{
    std::istringstream in("a\r\n# c\n\nb");
    std::string line;
    std::size_t n = 0;
    REQUIRE(read_line(in, line, n));
    CHECK(line == "a");
    REQUIRE(read_line(in, line, n));
    CHECK(is_comment_or_blank(line));
    REQUIRE(read_line(in, line, n));
    CHECK(is_comment_or_blank(line));
    REQUIRE(read_line(in, line, n));
    CHECK(line == "b");
    CHECK(n == 4);
    CHECK_FALSE(read_line(in, line, n));
}

TEST_CASE("fnv1a reference values")
{
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("Rng is reproducible and mix_seed separates streams")
{
    Rng a(5);
    Rng b(5);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next() == b.next());
    }
    CHECK(mix_seed(1, 100) != mix_seed(1, 101));
    CHECK(mix_seed(1, 100) != mix_seed(2, 100));

    Rng r(9);
    std::vector<int> items{1, 2, 3, 4, 5, 6};
    auto sample = r.sample(items, 4);
    std::sort(sample.begin(), sample.end());
    CHECK(std::adjacent_find(sample.begin(), sample.end()) == sample.end());
    CHECK(r.sample(items, 10).size() == 6);
}
