#include "disambig/text.h"

#include "doctest.h"

using namespace disambig;

TEST_CASE("normalize_whitespace trims and collapses runs") {
  CHECK(normalize_whitespace("  open \t a\n\nsavings   account ") == "open a savings account");
  CHECK(normalize_whitespace("") == "");
  CHECK(normalize_whitespace(" \t\n") == "");
  CHECK(normalize_whitespace("Keep Case") == "Keep Case");
}

TEST_CASE("tokenize lowercases and splits on non-alphanumeric runs") {
  using V = std::vector<std::string>;
  CHECK(tokenize("I want to open a Savings-Account!") ==
        V{"i", "want", "to", "open", "a", "savings", "account"});
  CHECK(tokenize("what's up?? 42x") == V{"what", "s", "up", "42x"});
  CHECK(tokenize("...") == V{});
  CHECK(tokenize("") == V{});
}

TEST_CASE("tokenize keeps UTF-8 words whole") {
  const std::string text = "ouvrir un compte d\xC3\xA9p\xC3\xB4t";
  auto tokens = tokenize(text);
  REQUIRE(tokens.size() == 4);
  CHECK(tokens[3] == "d\xC3\xA9p\xC3\xB4t");
}

TEST_CASE("ngrams") {
  std::vector<std::string> t{"reset", "my", "password"};
  CHECK(ngrams(t, 1) == t);
  CHECK(ngrams(t, 2) == std::vector<std::string>{"reset my", "my password"});
  CHECK(ngrams(t, 3) == std::vector<std::string>{"reset my password"});
  CHECK(ngrams(t, 4).empty());
  CHECK(ngrams(t, 0).empty());
}

TEST_CASE("join and vowel check") {
  CHECK(join({"a", "b", "c"}, ", ") == "a, b, c");
  CHECK(join({}, ",") == "");
  CHECK(starts_with_vowel_sound("account"));
  CHECK_FALSE(starts_with_vowel_sound("savings"));
  CHECK_FALSE(starts_with_vowel_sound(""));
}
