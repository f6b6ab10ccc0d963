#include "disambig/classifier.h"

#include <cmath>
#include <random>

#include "disambig/errors.h"
#include "doctest.h"

using namespace disambig;

namespace {

Corpus three_documents() {
  return Corpus({{"reset password", "reset"}, {"unlock account", "unlock"},
                 {"reset account now", "unlock"}});
}

double value_of(const FeatureVector& f, const Vocabulary& v, const std::string& term) {
  auto idx = v.find(term);
  REQUIRE(idx.has_value());
  for (const auto& e : f) {
    if (e.index == *idx) return e.value;
  }
  return 0.0;
}

// Two intents with disjoint vocabularies.
Corpus separable() {
  return Corpus({{"reset my password", "reset"},
                 {"forgot password reset", "reset"},
                 {"password expired", "reset"},
                 {"unlock account", "unlock"},
                 {"account locked out", "unlock"},
                 {"locked account help", "unlock"}});
}

// `intents` intents, each with three private keywords and shared filler.
Corpus keyword_corpus(std::size_t intents, std::size_t per_intent, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> filler = {"please", "i", "need", "help", "with", "my", "the", "now"};
  std::vector<LabeledUtterance> u;
  for (std::size_t i = 0; i < intents; ++i) {
    for (std::size_t n = 0; n < per_intent; ++n) {
      std::string text = filler[rng() % filler.size()] + " kw" + std::to_string(i) +
                         static_cast<char>('a' + rng() % 3) + " " + filler[rng() % filler.size()];
      u.push_back({text, "intent" + std::to_string(i)});
    }
  }
  return Corpus(u);
}

double mean_margin(const IntentModel& m, const Corpus& c) {
  double s = 0.0;
  for (const auto& u : c.utterances()) {
    auto d = predict(m, u.text);
    auto [j, k] = top_two(d.probabilities);
    s += d[j] - d[k];
  }
  return s / static_cast<double>(c.size());
}

}  // namespace

TEST_CASE("vocabulary document frequencies and idf") {
  Vocabulary v = Vocabulary::build(three_documents());
  CHECK(v.num_documents() == 3);
  // First-appearance order: unigrams and bigrams of each utterance in turn.
  REQUIRE(v.find("reset").has_value());
  CHECK(*v.find("reset") == 0u);
  CHECK(v.document_frequencies()[*v.find("reset")] == 2);
  CHECK(v.document_frequencies()[*v.find("account")] == 2);
  CHECK(v.document_frequencies()[*v.find("unlock account")] == 1);
  CHECK(v.idf(*v.find("reset")) == doctest::Approx(std::log(4.0 / 3.0) + 1.0).epsilon(1e-15));
  CHECK(v.idf(*v.find("now")) == doctest::Approx(std::log(2.0) + 1.0).epsilon(1e-15));
  CHECK(v.size() == 9);
}

TEST_CASE("TF-IDF values match a hand-computed table") {
  Vocabulary v = Vocabulary::build(three_documents());
  // "reset password reset": tf(reset)=2, tf(password)=1, tf("reset password")=1;
  // "password reset" is not in the vocabulary.
  const double idf2 = std::log(4.0 / 3.0) + 1.0;  // df = 2
  const double idf1 = std::log(4.0 / 2.0) + 1.0;  // df = 1
  const double r = 2 * idf2, p = idf1, rp = idf1;
  const double norm = std::sqrt(r * r + p * p + rp * rp);
  FeatureVector f = featurize("reset password reset", v);
  CHECK(f.size() == 3);
  CHECK(value_of(f, v, "reset") == doctest::Approx(r / norm).epsilon(1e-12));
  CHECK(value_of(f, v, "password") == doctest::Approx(p / norm).epsilon(1e-12));
  CHECK(value_of(f, v, "reset password") == doctest::Approx(rp / norm).epsilon(1e-12));
  for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i - 1].index < f[i].index);
}

TEST_CASE("featurize edge cases") {
  Vocabulary v = Vocabulary::build(Corpus(std::vector<LabeledUtterance>{{"reset password", "a"}, {"unlock account", "b"}}));
  CHECK(featurize("completely unknown words", v).empty());
  CHECK(featurize("reset password", v).size() == 3);
  CHECK_THROWS_AS(featurize("", v), PreconditionError);
}

TEST_CASE("vocabulary json round-trip") {
  Vocabulary v = Vocabulary::build(three_documents());
  CHECK(Vocabulary::from_json(v.to_json()) == v);
}

TEST_CASE("separable corpus is learned exactly and deterministically") {
  Corpus c = separable();
  IntentModel m = train(c);
  CHECK(m.temperature() == 1.0);
  for (const auto& u : c.utterances()) {
    auto d = predict(m, u.text);
    CHECK(m.intents()[top_two(d.probabilities).first] == u.intent);
  }
  IntentModel again = train(c);
  CHECK(again == m);
  TrainingOptions other;
  other.seed = 99;
  CHECK_FALSE(train(c, other) == m);
}

TEST_CASE("20 intents x 30 utterances reach training accuracy >= 0.95") {
  Corpus c = keyword_corpus(20, 30, 1);
  IntentModel m = train(c);
  std::size_t correct = 0;
  for (const auto& u : c.utterances()) {
    auto d = predict(m, u.text);
    correct += m.intents()[top_two(d.probabilities).first] == u.intent;
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(c.size()) >= 0.95);
}

TEST_CASE("predict returns a distribution") {
  IntentModel m = train(keyword_corpus(5, 10, 2));
  for (const char* q : {"kw1a", "please help", "zzz", "kw3b kw4c now"}) {
    auto d = predict(m, q);
    double s = 0.0;
    for (double p : d.probabilities) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      s += p;
    }
    CHECK(std::fabs(s - 1.0) < 1e-9);
  }
}

TEST_CASE("untrained model with zero scores is uniform") {
  Corpus c = separable();
  IntentModel m({"a", "b", "c"}, Vocabulary::build(c));
  auto d = predict(m, "nothing known");
  for (double p : d.probabilities) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("softmax is stable and honours temperature") {
  std::vector<double> z{1000.0, 1000.0, -1000.0};
  auto d = softmax(z, 1.0);
  CHECK(d[0] == doctest::Approx(0.5));
  CHECK(d[2] == 0.0);
  std::vector<double> y{0.0, std::log(3.0)};
  CHECK(softmax(y, 1.0)[1] == doctest::Approx(0.75).epsilon(1e-12));
  // Doubling the temperature halves the logit gap: 1 : sqrt(3).
  CHECK(softmax(y, 2.0)[1] == doctest::Approx(std::sqrt(3.0) / (1 + std::sqrt(3.0))).epsilon(1e-12));
}

TEST_CASE("top_two breaks ties by lower index") {
  std::vector<double> p{0.2, 0.4, 0.4};
  CHECK(top_two(p) == std::pair<std::size_t, std::size_t>{1, 2});
  std::vector<double> q{0.25, 0.25, 0.25, 0.25};
  CHECK(top_two(q) == std::pair<std::size_t, std::size_t>{0, 1});
  std::vector<double> r{0.1, 0.6, 0.3};
  CHECK(top_two(r) == std::pair<std::size_t, std::size_t>{1, 2});
}

TEST_CASE("calibration on a confident model sharpens or stays neutral") {
  Corpus c = separable();
  IntentModel m = calibrate(train(c), c);
  CHECK(m.temperature() <= 1.0);
  const double found = negative_log_likelihood(m, c, m.temperature());
  // Independent grid search over the same interval.
  double grid_best = INFINITY;
  for (double t = kMinTemperature; t <= kMaxTemperature; t += 0.01) {
    grid_best = std::min(grid_best, negative_log_likelihood(m, c, t));
  }
  CHECK(found <= grid_best + 1e-6);
}

TEST_CASE("calibrating an under-confident model widens the margin and keeps the argmax") {
  Corpus c = keyword_corpus(6, 20, 4);
  auto [train_part, held] = split(c, 0.3, 8);
  IntentModel m = train(train_part);
  m.scale_parameters(0.2);
  IntentModel cal = calibrate(m, held);
  CHECK(cal.temperature() < 1.0);
  CHECK(mean_margin(cal, held) > mean_margin(m, held));
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    std::string q = "kw" + std::to_string(rng() % 6) + static_cast<char>('a' + rng() % 3) +
                    (rng() % 2 ? " please kw" + std::to_string(rng() % 6) + "b" : "");
    CHECK(top_two(predict(m, q).probabilities).first ==
          top_two(predict(cal, q).probabilities).first);
  }
}

TEST_CASE("detect_ambiguity applies t1 then t2") {
  Thresholds t;
  auto v = detect_ambiguity({{0.50, 0.45, 0.05}}, t);
  CHECK(v.kind == AmbiguityKind::kPairAmbiguous);
  CHECK(v.top == 0);
  CHECK(v.second == 1);
  CHECK(v.margin == doctest::Approx(0.05));

  v = detect_ambiguity({{0.90, 0.06, 0.04}}, t);
  CHECK(v.kind == AmbiguityKind::kUnambiguous);
  CHECK(v.top == 0);

  std::vector<double> low{0.15, 0.14};
  for (int i = 0; i < 71; ++i) low.push_back(0.01);
  v = detect_ambiguity({low}, t);
  CHECK(v.kind == AmbiguityKind::kSelfAmbiguous);
  CHECK(v.top == 0);
  CHECK(v.ambiguous());

  CHECK_THROWS_AS(detect_ambiguity({{1.0}}, t), PreconditionError);
  CHECK_THROWS_AS((Thresholds{1.5, 0.3}.validate()), InvariantError);
  CHECK_THROWS_AS((Thresholds{0.2, -0.1}.validate()), InvariantError);
}

TEST_CASE("PairAmbiguous is an up-set in t2") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> p(4);
    double s = 0.0;
    for (auto& x : p) s += (x = u(rng));
    for (auto& x : p) x /= s;
    bool seen = false;
    for (double t2 = 0.0; t2 <= 1.0; t2 += 0.05) {
      auto v = detect_ambiguity({p}, Thresholds{0.2, t2});
      if (v.kind == AmbiguityKind::kSelfAmbiguous) break;
      bool pair = v.kind == AmbiguityKind::kPairAmbiguous;
      CHECK(!(seen && !pair));
      seen = seen || pair;
      CHECK(v.top == top_two(p).first);
    }
  }
}

TEST_CASE("model json round-trip is exact") {
  IntentModel m = calibrate(train(separable()), separable());
  IntentModel back = IntentModel::from_json(m.to_json());
  CHECK(back == m);
  CHECK(predict(back, "reset password").probabilities ==
        predict(m, "reset password").probabilities);
}

TEST_CASE("temperature must be positive") {
  IntentModel m = train(separable());
  CHECK_THROWS(m.set_temperature(0.0));
  CHECK_THROWS(m.set_temperature(-1.0));
}
