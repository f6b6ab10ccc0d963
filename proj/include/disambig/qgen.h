#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "disambig/corpus.h"
#include "json.hpp"

namespace disambig {

struct QAPair {
  std::string question;  // ends with '?'
  std::string answer;    // non-empty
  std::string source_text;
  std::string intent;

  bool operator==(const QAPair&) const = default;
};

// Throws InvariantError if the pair breaks the QAPair invariants.
void validate(const QAPair& pair);

struct QAPairSet {
  std::string intent;
  std::vector<QAPair> pairs;

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }
  bool operator==(const QAPairSet&) const = default;
};

// A question-answer provider: given one declarative utterance, produce
// (question, answer) pairs. May throw; generate_pairs records the failure.
class QuestionGenerator {
 public:
  virtual ~QuestionGenerator() = default;
  virtual std::vector<std::pair<std::string, std::string>> generate(
      std::string_view utterance) const = 0;
};

// Shallow-pattern provider:
//  (a) "I want/need/would like to VP" and imperatives: ("What do you want to
//      VERB?", object phrase) and ("What do you want to do?", VP verbatim);
//  (b) first/third-person SVO declaratives: ("What do you VERB?" or "What
//      does SUBJ VERB?", object phrase);
//  (c) a trailing PP: ("What do you want to VERB [OBJ] PREP?", PP object).
// At most `cap` pairs per utterance.
class RuleBasedGenerator final : public QuestionGenerator {
 public:
  static constexpr std::size_t kDefaultCap = 4;

  explicit RuleBasedGenerator(std::size_t cap = kDefaultCap) : cap_(cap) {}

  std::vector<std::pair<std::string, std::string>> generate(
      std::string_view utterance) const override;

 private:
  std::size_t cap_;
};

// Utterances labeled j and k, in corpus order. Throws NotFoundError for an
// unknown intent and PreconditionError if j == k.
std::pair<std::vector<std::string>, std::vector<std::string>> build_utterance_sets(
    const Corpus& corpus, std::string_view j, std::string_view k);

std::vector<std::string> utterances_of(const Corpus& corpus, std::string_view intent);

struct GenerationResult {
  QAPairSet set;
  std::vector<std::string> warnings;
};

// Runs the provider over every utterance. Utterances yielding no pairs, or
// whose provider call throws, are skipped with one warning each.
GenerationResult generate_pairs(const std::vector<std::string>& utterances,
                                std::string_view intent, const QuestionGenerator& generator);

// One JSON object per line with "question", "answer", "source_text",
// "intent". Sets come back in first-appearance order of their intents.
std::vector<QAPairSet> load_pairs(const std::filesystem::path& path);
void save_pairs(const std::vector<QAPairSet>& sets, const std::filesystem::path& path);

nlohmann::json to_json(const QAPairSet& set);
QAPairSet qa_set_from_json(const nlohmann::json& j);

}  // namespace disambig
