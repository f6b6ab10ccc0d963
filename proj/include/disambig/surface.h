#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "disambig/corpus.h"
#include "disambig/selector.h"
#include "disambig/syntax.h"

namespace disambig {

enum class Provenance { kQgPath, kTemplatePath };

// Combination rules, tried in order; exactly one fires per QG-path question.
enum class CombineRule {
  kPersonFlip,             // R1: identical user-voice questions, person flipped
  kSharedObjectModifiers,  // R2: same verb and object, different modifiers
  kSharedVerb,             // R3: same verb, answers as options
  kVerbHypernym,           // R4: different verbs with a shared hypernym
  kGenericDo,              // R5: different verbs, generic "do" question
};

std::string_view rule_id(CombineRule rule);
std::string_view to_string(Provenance provenance);

struct ClarifyingQuestion {
  std::string text;      // ends with '?'
  std::string option_j;  // answer option mapped to intent j
  std::string option_k;  // answer option mapped to intent k
  Provenance provenance = Provenance::kTemplatePath;
  std::optional<CombineRule> applied_rule;  // set iff provenance is kQgPath
};

// Throws InvariantError when the question breaks its invariants.
void validate(const ClarifyingQuestion& question);

// Paraphrase pass applied to QG-path text (back-translation slot).
using ParaphraseHook = std::function<std::string(std::string_view)>;

std::string identity_paraphrase(std::string_view text);
// "identity" is the only built-in; unknown ids throw NotFoundError.
ParaphraseHook make_paraphrase_hook(std::string_view id);

// Rule ladder over the selected pairs. None when both questions fail to
// parse or the two options would coincide.
std::optional<ClarifyingQuestion> combine(const DiscriminativeSelection& selection,
                                          const HypernymLexicon& hypernyms,
                                          const ParaphraseHook& paraphrase = identity_paraphrase);

struct DiscriminativePhrase {
  std::string intent;
  std::string phrase;  // lowercased word n-gram, 1 <= n <= 3
  double weight = 0.0;

  bool operator==(const DiscriminativePhrase&) const = default;
};

// TF-IDF phrase ranking with one document per intent (its utterances
// concatenated). Candidates are n-grams up to length 3 that neither start
// nor end with a function word and do not occur in every intent. Ties go to
// the shorter n-gram, then to the earlier first occurrence.
std::vector<DiscriminativePhrase> discriminative_phrases(const Corpus& corpus,
                                                         std::string_view intent,
                                                         std::size_t top_n);

// Same ranking for every intent at once, keyed by intent.
std::map<std::string, std::vector<DiscriminativePhrase>> phrase_table(const Corpus& corpus,
                                                                      std::size_t top_n);

inline const std::vector<std::string> kDefaultTemplates = {"Are you talking about {A} or {B}?",
                                                           "Do you mean {A} or {B}?"};

// Accepts or rejects a candidate (option_j, option_k) pair.
using OptionCheck = std::function<bool(std::string_view, std::string_view)>;

// Fills templates[template_index % size] with the two phrases.
ClarifyingQuestion template_question(const DiscriminativePhrase& dp_j,
                                     const DiscriminativePhrase& dp_k,
                                     const std::vector<std::string>& templates = kDefaultTemplates,
                                     std::size_t template_index = 0);

// Walks the ranked lists until the phrases differ after normalization (and
// pass `accept`, when given): j keeps its best phrase while k advances, then
// j advances. Throws PreconditionError when the lists are exhausted.
ClarifyingQuestion template_question(const std::vector<DiscriminativePhrase>& ranked_j,
                                     const std::vector<DiscriminativePhrase>& ranked_k,
                                     const std::vector<std::string>& templates,
                                     std::size_t template_index, const OptionCheck& accept = {});

}  // namespace disambig
