#include "disambig/selector.h"

#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "disambig/errors.h"
#include "doctest.h"

using namespace disambig;

namespace {

// One axis per word, so cosines are easy to compute by hand.
std::shared_ptr<WordVectorTable> axis_table() {
  auto t = std::make_shared<WordVectorTable>(6);
  const char* words[] = {"what", "open", "close", "savings", "checking", "card"};
  for (std::size_t i = 0; i < 6; ++i) {
    std::vector<double> v(6, 0.0);
    v[i] = 1.0;
    t->add(words[i], v);
  }
  return t;
}

QAPair qa(std::string q, std::string a) { return {std::move(q), std::move(a), "src", "x"}; }

std::shared_ptr<WordVectorTable> random_table(std::mt19937_64& rng, std::size_t words) {
  auto t = std::make_shared<WordVectorTable>(8);
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t w = 0; w < words; ++w) {
    std::vector<double> v(8);
    for (auto& x : v) x = n(rng);
    t->add("w" + std::to_string(w), v);
  }
  return t;
}

std::string random_text(std::mt19937_64& rng, std::size_t words) {
  std::string s;
  std::size_t len = 1 + rng() % 3;
  for (std::size_t i = 0; i < len; ++i) s += (i ? " w" : "w") + std::to_string(rng() % words);
  return s;
}

}  // namespace

TEST_CASE("identical questions with orthogonal answers score 2") {
  MeanPoolingEncoder enc(axis_table());
  auto t = score_terms("what", qa("what?", "savings"), qa("what?", "checking"), enc, {});
  CHECK(t.question_similarity == doctest::Approx(1.0));
  CHECK(t.answer_similarity == doctest::Approx(0.0));
  CHECK(t.total == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::fabs(t.total - 2.0) < 1e-9);
}

TEST_CASE("identical questions and answers score 1") {
  MeanPoolingEncoder enc(axis_table());
  CHECK(score_pair("what", qa("what?", "savings"), qa("what?", "savings"), enc) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("score is symmetric under role swap and monotone in answer similarity") {
  std::mt19937_64 rng(11);
  auto table = random_table(rng, 20);
  MeanPoolingEncoder enc(table);
  for (int i = 0; i < 500; ++i) {
    QAPair a = qa(random_text(rng, 20) + "?", random_text(rng, 20));
    QAPair b = qa(random_text(rng, 20) + "?", random_text(rng, 20));
    std::string q = random_text(rng, 20);
    CHECK(std::fabs(score_pair(q, a, b, enc) - score_pair(q, b, a, enc)) < 1e-12);
    ScoreTerms t = score_terms(q, a, b, enc, {});
    ScoreTerms higher = t;
    higher.answer_similarity = std::min(1.0, t.answer_similarity + 0.1);
    CHECK(combine_terms(higher, {}) <= combine_terms(t, {}));
  }
}

TEST_CASE("nonnegative vectors keep the score in [-1, 2]") {
  std::mt19937_64 rng(12);
  auto t = std::make_shared<WordVectorTable>(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int w = 0; w < 20; ++w) {
    std::vector<double> v(6);
    for (auto& x : v) x = u(rng);
    t->add("w" + std::to_string(w), v);
  }
  MeanPoolingEncoder enc(t);
  for (int i = 0; i < 2000; ++i) {
    double s = score_pair(random_text(rng, 20), qa(random_text(rng, 20) + "?", random_text(rng, 20)),
                          qa(random_text(rng, 20) + "?", random_text(rng, 20)), enc);
    CHECK(s >= -1.0 - 1e-12);
    CHECK(s <= 2.0 + 1e-12);
  }
}

TEST_CASE("score terms against hand values") {
  MeanPoolingEncoder enc(axis_table());
  // q = open; q_j = what open -> cos = 1/sqrt2; q_k = what close -> 0.
  // sim(q_j, q_k) = 1/2; answers "savings card" vs "checking card" -> 1/2.
  auto t = score_terms("open", qa("what open?", "savings card"), qa("what close?", "checking card"),
                       enc, {});
  CHECK(t.question_similarity == doctest::Approx(0.5));
  CHECK(t.answer_similarity == doctest::Approx(0.5));
  CHECK(t.query_similarity_j == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(t.query_similarity_k == doctest::Approx(0.0));
  CHECK(t.total == doctest::Approx(0.5 - 0.5 + 0.5 / std::sqrt(2.0)));
  ScoreWeights w{2.0, 0.0, 1.0};
  CHECK(combine_terms(t, w) == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)));
}

TEST_CASE("weights are validated") {
  CHECK_NOTHROW(ScoreWeights{}.validate());
  CHECK_NOTHROW(ScoreWeights{-1.0, 1.0, 0.5}.validate());
  CHECK_THROWS_AS((ScoreWeights{1.0, INFINITY, 0.5}.validate()), InvariantError);
  CHECK_THROWS_AS((ScoreWeights{NAN, 1.0, 0.5}.validate()), InvariantError);
}

TEST_CASE("select_best matches an exhaustive oracle") {
  std::mt19937_64 rng(3);
  auto table = random_table(rng, 30);
  MeanPoolingEncoder enc(table);
  for (int trial = 0; trial < 200; ++trial) {
    QAPairSet sj{"j", {}}, sk{"k", {}};
    std::size_t nj = 1 + rng() % 5, nk = 1 + rng() % 5;
    for (std::size_t i = 0; i < nj; ++i) sj.pairs.push_back(qa(random_text(rng, 30) + "?", random_text(rng, 30)));
    for (std::size_t i = 0; i < nk; ++i) sk.pairs.push_back(qa(random_text(rng, 30) + "?", random_text(rng, 30)));
    std::string q = random_text(rng, 30);
    double best = -INFINITY;
    std::size_t bj = 0, bk = 0;
    for (std::size_t a = 0; a < nj; ++a) {
      for (std::size_t b = 0; b < nk; ++b) {
        double s = enc.similarity(sj.pairs[a].question, sk.pairs[b].question) -
                   enc.similarity(sj.pairs[a].answer, sk.pairs[b].answer) +
                   0.5 * (enc.similarity(q, sj.pairs[a].question) +
                          enc.similarity(q, sk.pairs[b].question));
        if (s > best) best = s, bj = a, bk = b;
      }
    }
    auto sel = select_best(q, sj, sk, enc, {}, 0.5);
    REQUIRE(sel.has_value());
    CHECK(sel->index_j == bj);
    CHECK(sel->index_k == bk);
    CHECK(std::fabs(sel->score - best) < 1e-9);
    CHECK(sel->gate_passed == (sel->score >= 0.5));
    CHECK(sel->pair_j == sj.pairs[bj]);
  }
}

TEST_CASE("empty sets give no selection") {
  MeanPoolingEncoder enc(axis_table());
  QAPairSet full{"j", {qa("what?", "open")}};
  CHECK_FALSE(select_best("open", QAPairSet{"j", {}}, full, enc, {}, 0.0).has_value());
  CHECK(rank_candidates("open", full, QAPairSet{"k", {}}, enc, {}).ranked.empty());
}

TEST_CASE("ranking keeps the top entries, best first, with lexicographic ties") {
  MeanPoolingEncoder enc(axis_table());
  QAPairSet sj{"j", {qa("what?", "savings"), qa("what?", "savings")}};
  QAPairSet sk{"k", {qa("what?", "checking"), qa("what?", "savings")}};
  SelectionOptions o;
  o.keep_top = 3;
  o.keep_matrix = true;
  auto r = rank_candidates("what", sj, sk, enc, o);
  REQUIRE(r.ranked.size() == 3);
  CHECK(r.ranked[0].index_j == 0);
  CHECK(r.ranked[0].index_k == 0);
  CHECK(r.ranked[1].index_j == 1);
  CHECK(r.ranked[1].index_k == 0);
  CHECK(r.ranked[0].score >= r.ranked[2].score);
  CHECK(r.matrix.size() == 4);
  CHECK_FALSE(r.truncated);
}

TEST_CASE("cross-product cap truncates to query-similar members") {
  MeanPoolingEncoder enc(axis_table());
  QAPairSet sj{"j", {}}, sk{"k", {}};
  for (int i = 0; i < 10; ++i) {
    sj.pairs.push_back(qa(i == 7 ? "open?" : "close?", "savings"));
    sk.pairs.push_back(qa(i == 3 ? "open?" : "close?", "checking"));
  }
  SelectionOptions o;
  o.cross_product_cap = 4;
  o.keep_matrix = true;
  auto r = rank_candidates("open", sj, sk, enc, o);
  CHECK(r.truncated);
  CHECK(r.matrix.size() <= 4);
  REQUIRE_FALSE(r.ranked.empty());
  CHECK(r.ranked[0].index_j == 7);
  CHECK(r.ranked[0].index_k == 3);
}

TEST_CASE("shared answers are dropped from both sides") {
  QAPairSet sj{"j", {qa("What do you want to do?", "Get Help"), qa("What?", "savings")}};
  QAPairSet sk{"k", {qa("What?", "get  help"), qa("What?", "checking")}};
  auto [dj, dk] = drop_shared_answers(sj, sk);
  REQUIRE(dj.size() == 1);
  REQUIRE(dk.size() == 1);
  CHECK(dj.pairs[0].answer == "savings");
  CHECK(dk.pairs[0].answer == "checking");
  CHECK(dj.intent == "j");
}

TEST_CASE("score matrix csv") {
  MeanPoolingEncoder enc(axis_table());
  QAPairSet sj{"j", {qa("what, exactly?", "savings")}};
  QAPairSet sk{"k", {qa("what?", "checking")}};
  SelectionOptions o;
  o.keep_matrix = true;
  auto r = rank_candidates("what", sj, sk, enc, o);
  std::ostringstream out;
  write_score_matrix_csv(out, r.matrix, sj, sk);
  std::string csv = out.str();
  CHECK(csv.rfind("q_j,a_j,q_k,a_k,sim_qq,sim_aa,sim_q_qj,sim_q_qk,total\n", 0) == 0);
  CHECK(csv.find("\"what, exactly?\"") != std::string::npos);
}

TEST_CASE("singleton sets select their only pair") {
  MeanPoolingEncoder enc(axis_table());
  QAPairSet sj{"j", {qa("what open?", "savings")}};
  QAPairSet sk{"k", {qa("what close?", "checking card")}};
  auto sel = select_best("open card", sj, sk, enc, {}, 10.0);
  REQUIRE(sel.has_value());
  CHECK(sel->index_j == 0);
  CHECK(sel->index_k == 0);
  CHECK(sel->score == score_pair("open card", sj.pairs[0], sk.pairs[0], enc));
  CHECK_FALSE(sel->gate_passed);
}

TEST_CASE("8 x 11 random sets match the oracle exactly") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto table = random_table(rng, 15);
    MeanPoolingEncoder enc(table);
    QAPairSet sj{"j", {}}, sk{"k", {}};
    for (int i = 0; i < 8; ++i) sj.pairs.push_back(qa(random_text(rng, 15) + "?", random_text(rng, 15)));
    for (int i = 0; i < 11; ++i) sk.pairs.push_back(qa(random_text(rng, 15) + "?", random_text(rng, 15)));
    const std::string q = random_text(rng, 15);
    double best = -INFINITY;
    std::size_t bj = 0, bk = 0;
    for (std::size_t a = 0; a < 8; ++a) {
      for (std::size_t b = 0; b < 11; ++b) {
        const double s = score_pair(q, sj.pairs[a], sk.pairs[b], enc);
        if (s > best) best = s, bj = a, bk = b;
      }
    }
    auto sel = select_best(q, sj, sk, enc, {}, 1.0);
    REQUIRE(sel.has_value());
    CHECK(sel->index_j == bj);
    CHECK(sel->index_k == bk);
    CHECK(sel->score == best);
  }
}

TEST_CASE("gate_passed is monotone in the gate") {
  MeanPoolingEncoder enc(axis_table());
  QAPairSet sj{"j", {qa("what open?", "savings")}};
  QAPairSet sk{"k", {qa("what open?", "checking")}};
  bool previous = true;
  for (double gate = -3.0; gate <= 3.0; gate += 0.25) {
    bool passed = select_best("open", sj, sk, enc, {}, gate)->gate_passed;
    CHECK(!(passed && !previous));
    previous = passed;
  }
}
