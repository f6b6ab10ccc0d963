#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace disambig {

struct LabeledUtterance {
  std::string text;
  std::string intent;

  bool operator==(const LabeledUtterance&) const = default;
};

// Labeled training utterances plus the ordered intent inventory.
//
// Invariants: at least two intents, no duplicate intents, every utterance
// text non-empty and labeled with an inventory member. Immutable once built.
class Corpus {
 public:
  // Inventory is the first-appearance order of the utterances' labels.
  explicit Corpus(std::vector<LabeledUtterance> utterances);
  // Explicit inventory; intents without utterances are allowed.
  Corpus(std::vector<LabeledUtterance> utterances, std::vector<std::string> intents);

  const std::vector<LabeledUtterance>& utterances() const { return utterances_; }
  const std::vector<std::string>& intents() const { return intents_; }
  std::size_t size() const { return utterances_.size(); }
  std::size_t num_intents() const { return intents_.size(); }

  std::optional<std::size_t> intent_index(std::string_view intent) const;
  // Throws NotFoundError for an unknown intent.
  std::size_t require_intent(std::string_view intent) const;

  bool operator==(const Corpus& other) const {
    return utterances_ == other.utterances_ && intents_ == other.intents_;
  }

 private:
  void validate();

  std::vector<LabeledUtterance> utterances_;
  std::vector<std::string> intents_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// Test-only record: a query that is ambiguous between two intents. Pairing is
// order-insensitive.
struct AmbiguousExample {
  std::string text;
  std::string intent_a;
  std::string intent_b;

  bool operator==(const AmbiguousExample&) const = default;
};

// Symmetric (word, word) -> hypernym lookup shared by verb and modifier rules.
class HypernymLexicon {
 public:
  void add(std::string_view a, std::string_view b, std::string_view hypernym);
  std::optional<std::string> lookup(std::string_view a, std::string_view b) const;
  std::size_t size() const { return entries_.size(); }
  // Stored entries keyed by the lexicographically ordered pair.
  const std::map<std::pair<std::string, std::string>, std::string>& entries() const {
    return entries_;
  }

  bool operator==(const HypernymLexicon&) const = default;

 private:
  std::map<std::pair<std::string, std::string>, std::string> entries_;
};

// One JSON object per line: {"text": ..., "intent": ...}. Blank lines are
// skipped. Records carrying "intent_b" belong in ambiguous-set files and are
// rejected here.
Corpus load_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::istream& in, const std::string& source_name);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Records {"text", "intent", "intent_b"}; both intents must exist in `corpus`.
std::vector<AmbiguousExample> load_ambiguous(const std::filesystem::path& path,
                                             const Corpus& corpus);
void save_ambiguous(const std::vector<AmbiguousExample>& examples,
                    const std::filesystem::path& path);

// Tab-separated word_a, word_b, hypernym; '#' lines are comments.
HypernymLexicon load_hypernyms(const std::filesystem::path& path);
HypernymLexicon parse_hypernyms(std::istream& in, const std::string& source_name);
void save_hypernyms(const HypernymLexicon& lexicon, const std::filesystem::path& path);

// Stratified per-intent split. Each intent contributes
// clamp(round(n * holdout_fraction), 1, n - 1) utterances to the held-out
// part; both parts keep the original relative order and the full inventory.
std::pair<Corpus, Corpus> split(const Corpus& corpus, double holdout_fraction, std::uint64_t seed);

}  // namespace disambig
