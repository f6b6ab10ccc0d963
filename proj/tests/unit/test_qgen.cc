#include "disambig/qgen.h"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "disambig/errors.h"
#include "doctest.h"
#include "test_util.h"

using namespace disambig;

namespace {

bool contains(const std::vector<std::pair<std::string, std::string>>& pairs,
              const std::string& q, const std::string& a) {
  return std::find(pairs.begin(), pairs.end(), std::make_pair(q, a)) != pairs.end();
}

class ThrowingGenerator final : public QuestionGenerator {
 public:
  std::vector<std::pair<std::string, std::string>> generate(std::string_view u) const override {
    if (u.find("boom") != std::string_view::npos) throw std::runtime_error("provider failed");
    if (u.find("empty") != std::string_view::npos) return {};
    return {{"What?", std::string(u)}};
  }
};

}  // namespace

TEST_CASE("want-to utterances yield object and do questions") {
  RuleBasedGenerator g;
  auto pairs = g.generate("I want to open a savings account");
  CHECK(contains(pairs, "What do you want to open?", "a savings account"));
  CHECK(contains(pairs, "What do you want to do?", "open a savings account"));
}

TEST_CASE("imperatives behave like want-to") {
  RuleBasedGenerator g;
  auto pairs = g.generate("archive my emails");
  CHECK(contains(pairs, "What do you want to archive?", "my emails"));
  CHECK(contains(pairs, "What do you want to do?", "archive my emails"));
}

TEST_CASE("trailing prepositional phrase yields a PP question") {
  RuleBasedGenerator g;
  auto pairs = g.generate("I want to start excel inside a VM");
  CHECK(contains(pairs, "What do you want to start excel inside?", "a VM"));
}

TEST_CASE("every generated pair satisfies the QAPair invariants") {
  RuleBasedGenerator g;
  for (const char* u : {"I want to open a savings account", "my manager asked me to book a flight",
                        "please cancel the order", "the printer is broken", "how do I reset it"}) {
    auto pairs = g.generate(u);
    CHECK(pairs.size() <= RuleBasedGenerator::kDefaultCap);
    for (const auto& [q, a] : pairs) {
      CHECK_NOTHROW(validate(QAPair{q, a, u, "x"}));
    }
  }
  RuleBasedGenerator capped(1);
  CHECK(capped.generate("I want to start excel inside a VM").size() == 1);
}

TEST_CASE("QAPair validation") {
  CHECK_THROWS_AS(validate(QAPair{"What", "a", "s", "i"}), InvariantError);
  CHECK_THROWS_AS(validate(QAPair{"What?", "", "s", "i"}), InvariantError);
  CHECK_THROWS_AS(validate(QAPair{"What?", "  ", "s", "i"}), InvariantError);
  CHECK_NOTHROW(validate(QAPair{"What?", "a", "s", "i"}));
}

TEST_CASE("utterance sets follow corpus order") {
  Corpus c({{"u1", "a"}, {"u2", "b"}, {"u3", "a"}, {"u4", "c"}});
  auto [j, k] = build_utterance_sets(c, "a", "b");
  CHECK(j == std::vector<std::string>{"u1", "u3"});
  CHECK(k == std::vector<std::string>{"u2"});
  CHECK_THROWS_AS(build_utterance_sets(c, "a", "zzz"), NotFoundError);
  CHECK_THROWS_AS(build_utterance_sets(c, "a", "a"), PreconditionError);
}

TEST_CASE("generate_pairs skips failing utterances with one warning each") {
  ThrowingGenerator g;
  auto r = generate_pairs({"fine one", "boom", "empty", "fine two"}, "intent", g);
  CHECK(r.set.intent == "intent");
  REQUIRE(r.set.size() == 2);
  CHECK(r.set.pairs[0].source_text == "fine one");
  CHECK(r.set.pairs[1].intent == "intent");
  CHECK(r.warnings.size() == 2);
}

TEST_CASE("pair files round-trip") {
  TempDir dir;
  std::vector<QAPairSet> sets = {
      {"a", {{"What do you want to open?", "an account", "open an account", "a"}}},
      {"b", {{"What do you want to do?", "close it", "close it", "b"},
             {"What do you want to close?", "it", "close it", "b"}}}};
  auto p = dir.path() / "pairs.jsonl";
  save_pairs(sets, p);
  CHECK(load_pairs(p) == sets);
  CHECK(qa_set_from_json(to_json(sets[1])) == sets[1]);
}

TEST_CASE("malformed pair files report the line") {
  TempDir dir;
  auto p = dir.write("bad.jsonl",
                     "{\"question\":\"Q?\",\"answer\":\"a\",\"source_text\":\"s\",\"intent\":\"i\"}\n"
                     "{\"question\":\"Q?\"}\n");
  try {
    load_pairs(p);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("intents without utterances give empty sets") {
  Corpus c({{"u1", "a"}, {"u2", "b"}}, {"a", "b", "c"});
  auto [j, k] = build_utterance_sets(c, "c", "a");
  CHECK(j.empty());
  CHECK(k == std::vector<std::string>{"u1"});
}

TEST_CASE("utterance sets equal a linear scan") {
  std::mt19937_64 rng(21);
  std::vector<LabeledUtterance> u;
  for (int i = 0; i < 200; ++i) {
    u.push_back({"text " + std::to_string(i), "i" + std::to_string(rng() % 5)});
  }
  Corpus c(u);
  for (const auto& j : c.intents()) {
    for (const auto& k : c.intents()) {
      if (j == k) continue;
      std::vector<std::string> ej, ek;
      for (const auto& x : u) {
        if (x.intent == j) ej.push_back(x.text);
        if (x.intent == k) ek.push_back(x.text);
      }
      auto [sj, sk] = build_utterance_sets(c, j, k);
      CHECK(sj == ej);
      CHECK(sk == ek);
    }
  }
}

TEST_CASE("rule provider edge cases") {
  RuleBasedGenerator g;
  CHECK(g.generate("hello").empty());
  auto empty = generate_pairs({}, "a", g);
  CHECK(empty.set.empty());
  CHECK(empty.warnings.empty());
  auto miss = generate_pairs({"hello"}, "a", g);
  CHECK(miss.set.empty());
  CHECK(miss.warnings.size() == 1);
  auto hit = generate_pairs({"I want to open a savings account"}, "open_savings", g);
  for (const auto& p : hit.set.pairs) {
    CHECK(p.intent == "open_savings");
    CHECK(p.source_text == "I want to open a savings account");
  }
}

TEST_CASE("pair files group by intent and reject empty answers") {
  TempDir dir;
  auto line = [](const char* q, const char* a, const char* i) {
    return nlohmann::json{{"question", q}, {"answer", a}, {"source_text", "s"}, {"intent", i}}
               .dump() +
           "\n";
  };
  auto p = dir.write("four.jsonl", line("A?", "1", "x") + line("B?", "2", "y") +
                                       line("C?", "3", "x") + line("D?", "4", "y"));
  auto sets = load_pairs(p);
  REQUIRE(sets.size() == 2);
  CHECK(sets[0].intent == "x");
  CHECK(sets[0].size() == 2);
  CHECK(sets[1].size() == 2);
  auto bad = dir.write("bad.jsonl", line("A?", "1", "x") + line("B?", "", "y"));
  CHECK_THROWS_AS(load_pairs(bad), ParseError);
}
