#include <doctest.h>

#include "causalrag/text_util.hpp"

using namespace causalrag;

TEST_CASE("canonical trims, folds case and collapses whitespace") {
    CHECK(text::canonical("  Buyer   Attention \t") == "buyer attention");
    CHECK(text::canonical("SOLAR FLARE") == "solar flare");
    CHECK(text::canonical("") == "");
    CHECK(text::canonical("  \n ") == "");
}

TEST_CASE("normalized_match contains in either direction") {
    CHECK(text::normalized_match("the Late Frost damages apple blossoms badly",
                                 "late frost damages apple blossoms"));
    CHECK(text::normalized_match("late frost", "A LATE  FROST"));
    CHECK_FALSE(text::normalized_match("late frost", "early thaw"));
    CHECK_FALSE(text::normalized_match("", "anything"));
}

TEST_CASE("tokenize keeps lowercase alphanumeric runs") {
    CHECK(text::tokenize("Solar-flare 42!") == std::vector<std::string>{"solar", "flare", "42"});
    CHECK(text::tokenize("  ") == std::vector<std::string>{});
}

TEST_CASE("approx_token_count splits on whitespace") {
    CHECK(text::approx_token_count("") == 0);
    CHECK(text::approx_token_count("one") == 1);
    CHECK(text::approx_token_count("one two\tthree\nfour") == 4);
}

TEST_CASE("split_on handles multi-char delimiters") {
    CHECK(text::split_on("a -> b -> c", "->") == std::vector<std::string>{"a ", " b ", " c"});
    CHECK(text::split_on("abc", "->") == std::vector<std::string>{"abc"});
}
