#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "disambig/classifier.h"
#include "disambig/corpus.h"
#include "disambig/encoder.h"
#include "disambig/qgen.h"
#include "disambig/resolver.h"
#include "disambig/selector.h"
#include "disambig/surface.h"
#include "json.hpp"

namespace disambig {

// Every tunable of the pipeline. JSON keys mirror the field names.
struct EngineConfig {
  Thresholds thresholds;
  ScoreWeights weights;
  double gate = 1.3;  // tuned on the bundled synthetic corpus
  std::size_t top_n = 10;
  std::vector<std::string> none_lexicon = NoneLexicon().phrases();
  std::vector<std::string> templates = kDefaultTemplates;
  std::size_t pairs_per_utterance_cap = RuleBasedGenerator::kDefaultCap;
  std::size_t cross_product_cap = 10000;
  std::string paraphrase_hook = "identity";
  std::optional<double> resolver_minimum_similarity;
  TrainingOptions training;
  double holdout_fraction = 0.2;
  double session_ttl_seconds = 1800.0;
  std::string cors_origin;

  void validate() const;
  nlohmann::json to_json() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static EngineConfig from_json(const nlohmann::json& j);
  static EngineConfig load(const std::filesystem::path& path);
};

struct TranscriptEvent {
  std::string speaker;  // "user" or "system"
  std::string text;

  bool operator==(const TranscriptEvent&) const = default;
};

struct AwaitingQuery {};

struct AwaitingClarification {
  std::size_t intent_j;
  std::size_t intent_k;
  ClarifyingQuestion question;  // the options the resolver will use
  std::string query;
  std::vector<double> original_probabilities;
};

struct Closed {
  std::optional<std::string> intent;  // none when the user rejected both
  double confidence = 0.0;
};

using SessionState = std::variant<AwaitingQuery, AwaitingClarification, Closed>;

struct Session {
  std::string id;
  SessionState state = AwaitingQuery{};
  std::vector<TranscriptEvent> transcript;

  bool closed() const { return std::holds_alternative<Closed>(state); }
  std::string_view state_name() const;
  nlohmann::json to_json() const;
};

struct EngineReply {
  enum class Kind { kFinal, kClarify, kRejected };

  Kind kind = Kind::kFinal;
  std::string intent;   // kFinal
  double confidence = 0.0;
  std::string question;  // kClarify
  std::string option_j;
  std::string option_k;
  std::string reason;  // kRejected

  // Wire shape: {"kind":"final","intent","confidence"} |
  // {"kind":"clarify","question","options":[{"text"},{"text"}]} |
  // {"kind":"rejected","reason"}
  nlohmann::json to_json() const;
  std::string display_text() const;
};

struct Clarification {
  ClarifyingQuestion question;
  // The QA selection the question came from (QG path only).
  std::optional<DiscriminativeSelection> selection;
  SelectionResult candidates;
  // The QA sets the candidate indices refer to: the intents' sets minus the
  // answers they share.
  QAPairSet set_j;
  QAPairSet set_k;
};

// Trained classifier, per-intent QA-pair sets and phrase tables, lexicons
// and config. Immutable after build/load; share freely across threads.
class Engine {
 public:
  static Engine build(const Corpus& corpus, const EngineConfig& config, WordVectorTable vectors,
                      HypernymLexicon hypernyms,
                      const std::vector<QAPairSet>* external_pairs = nullptr,
                      std::vector<std::string>* warnings = nullptr);

  std::string serialize() const;
  static Engine deserialize(std::string_view data);
  void save(const std::filesystem::path& path) const;
  static Engine load(const std::filesystem::path& path);

  const EngineConfig& config() const { return config_; }
  const IntentModel& model() const { return model_; }
  const SentenceEncoder& encoder() const { return *encoder_; }
  const HypernymLexicon& hypernyms() const { return hypernyms_; }
  const std::vector<std::string>& intents() const { return model_.intents(); }
  const QAPairSet& qa_set(std::size_t intent) const { return qa_sets_.at(intent); }
  const std::vector<DiscriminativePhrase>& phrases(std::size_t intent) const {
    return phrases_.at(intent);
  }
  std::size_t intent_index(std::string_view intent) const;

  IntentDistribution predict(std::string_view text) const;
  AmbiguityVerdict assess(const IntentDistribution& dist) const;

  // One clarifying question for a query ambiguous between j and k: the best
  // gate-passing QA selection (shared answers excluded) that combines into
  // resolvable options, else a template question. `gate` overrides the configured gate.
  Clarification clarify(std::string_view query, std::size_t j, std::size_t k,
                        std::optional<double> gate = std::nullopt,
                        bool keep_matrix = false) const;

  Resolution resolve(std::string_view reply, const ClarifyingQuestion& question) const;

  // True if replying with each option verbatim resolves to that option.
  bool options_resolvable(std::string_view option_j, std::string_view option_k) const;

  Session start_session(std::string id) const;

  // Advances the session by one user message. Throws StateError on a closed
  // session and PreconditionError on empty text.
  std::pair<Session, EngineReply> handle_message(Session session, std::string_view text) const;

 private:
  Engine(EngineConfig config, IntentModel model, std::shared_ptr<const WordVectorTable> vectors,
         HypernymLexicon hypernyms, std::vector<QAPairSet> qa_sets,
         std::vector<std::vector<DiscriminativePhrase>> phrases);

  EngineConfig config_;
  IntentModel model_;
  std::shared_ptr<const WordVectorTable> vectors_;
  std::shared_ptr<const MeanPoolingEncoder> encoder_;
  HypernymLexicon hypernyms_;
  std::vector<QAPairSet> qa_sets_;                           // by intent index
  std::vector<std::vector<DiscriminativePhrase>> phrases_;  // by intent index
  NoneLexicon none_lexicon_;
  ParaphraseHook paraphrase_;
};

inline constexpr int kArtifactVersion = 1;

}  // namespace disambig
