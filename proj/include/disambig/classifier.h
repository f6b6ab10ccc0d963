#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "disambig/corpus.h"
#include "json.hpp"

namespace disambig {

struct SparseFeature {
  std::uint32_t index;
  double value;

  bool operator==(const SparseFeature&) const = default;
};

// Sorted by index, no duplicates, all values finite and >= 0.
using FeatureVector = std::vector<SparseFeature>;

// Word unigram + bigram vocabulary with document frequencies. Feature indices
// follow first appearance in the training corpus.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Every utterance is one document.
  static Vocabulary build(const Corpus& corpus);

  std::optional<std::uint32_t> find(std::string_view ngram) const;
  std::size_t size() const { return terms_.size(); }
  std::size_t num_documents() const { return num_documents_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::uint32_t>& document_frequencies() const { return df_; }
  // ln((1 + N) / (1 + df)) + 1
  double idf(std::uint32_t index) const { return idf_[index]; }

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

  bool operator==(const Vocabulary& other) const {
    return terms_ == other.terms_ && df_ == other.df_ && num_documents_ == other.num_documents_;
  }

 private:
  void add_term(std::string term, std::uint32_t df);
  void finalize();

  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::vector<double> idf_;
  std::map<std::string, std::uint32_t, std::less<>> index_;
  std::size_t num_documents_ = 0;
};

// Unigrams and bigrams of the lowercased text, raw counts times idf, then L2
// normalized. Unknown n-grams are dropped. Throws PreconditionError on empty
// text.
FeatureVector featurize(std::string_view text, const Vocabulary& vocabulary);

struct TrainingOptions {
  int epochs = 40;
  std::size_t batch_size = 8;
  double learning_rate = 2.0;
  double l2 = 1e-5;
  std::uint64_t seed = 17;
};

// Multinomial logistic regression over TF-IDF features with a calibration
// temperature applied to the logits.
class IntentModel {
 public:
  IntentModel(std::vector<std::string> intents, Vocabulary vocabulary);

  const std::vector<std::string>& intents() const { return intents_; }
  std::size_t num_intents() const { return intents_.size(); }
  std::size_t num_features() const { return vocabulary_.size(); }
  const Vocabulary& vocabulary() const { return vocabulary_; }

  // Row-major num_intents x num_features.
  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> weight_row(std::size_t intent);
  std::span<const double> weight_row(std::size_t intent) const;
  std::span<double> bias() { return bias_; }
  std::span<const double> bias() const { return bias_; }

  double temperature() const { return temperature_; }
  void set_temperature(double t);

  // Raw logits W x + b, before temperature.
  std::vector<double> logits(const FeatureVector& features) const;

  // Multiplies weights and biases by `factor`; used to construct
  // under-confident models.
  void scale_parameters(double factor);

  nlohmann::json to_json() const;
  static IntentModel from_json(const nlohmann::json& j);

  bool operator==(const IntentModel& other) const = default;

 private:
  std::vector<std::string> intents_;
  Vocabulary vocabulary_;
  std::vector<double> weights_;
  std::vector<double> bias_;
  double temperature_ = 1.0;
};

// Mini-batch gradient descent on softmax cross-entropy with L2 on the
// weights. Deterministic for a fixed seed. Temperature starts at 1.
IntentModel train(const Corpus& corpus, const TrainingOptions& options = {});

struct IntentDistribution {
  std::vector<double> probabilities;

  std::size_t size() const { return probabilities.size(); }
  double operator[](std::size_t i) const { return probabilities[i]; }
};

// Numerically stable softmax of z / temperature.
IntentDistribution softmax(std::span<const double> logits, double temperature);

IntentDistribution predict(const IntentModel& model, std::string_view text);
IntentDistribution predict(const IntentModel& model, const FeatureVector& features);

// Argmax and second argmax, ties to the lower index. Requires size >= 2.
std::pair<std::size_t, std::size_t> top_two(std::span<const double> probabilities);

// Mean negative log-likelihood of `held_out` at the given temperature.
double negative_log_likelihood(const IntentModel& model, const Corpus& held_out,
                               double temperature);

inline constexpr double kMinTemperature = 0.05;
inline constexpr double kMaxTemperature = 20.0;

// Temperature scaling: golden-section search over [0.05, 20] minimizing
// held-out NLL. Weights are untouched, so the argmax never changes.
IntentModel calibrate(IntentModel model, const Corpus& held_out);

struct Thresholds {
  double t1 = 0.2;  // self-ambiguity floor on the top probability
  double t2 = 0.3;  // two-intent margin

  void validate() const;
};

enum class AmbiguityKind { kUnambiguous, kSelfAmbiguous, kPairAmbiguous };

std::string_view to_string(AmbiguityKind kind);

struct AmbiguityVerdict {
  AmbiguityKind kind;
  std::size_t top;     // j = argmax
  std::size_t second;  // k = second argmax
  double top_probability;
  double margin;  // p_j - p_k

  bool ambiguous() const { return kind != AmbiguityKind::kUnambiguous; }
};

// t1 first: p_j < t1 -> SelfAmbiguous(j); else p_j - p_k < t2 ->
// PairAmbiguous(j, k); else Unambiguous(j).
AmbiguityVerdict detect_ambiguity(const IntentDistribution& dist, const Thresholds& thresholds);

}  // namespace disambig
