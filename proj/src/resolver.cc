#include "disambig/resolver.h"

#include <algorithm>

#include "disambig/errors.h"
#include "disambig/text.h"

namespace disambig {

NoneLexicon::NoneLexicon()
    : phrases_({"none", "none of them", "neither", "no", "something else"}) {}

NoneLexicon::NoneLexicon(std::vector<std::string> phrases) {
  for (auto& p : phrases) {
    std::string norm = to_lower(normalize_whitespace(p));
    if (!norm.empty()) phrases_.push_back(std::move(norm));
  }
  if (phrases_.empty()) throw InvariantError("none lexicon is empty");
}

std::string_view to_string(ResolutionOutcome outcome) {
  switch (outcome) {
    case ResolutionOutcome::kIntentJ:
      return "intent_j";
    case ResolutionOutcome::kIntentK:
      return "intent_k";
    case ResolutionOutcome::kNeither:
      return "neither";
  }
  return "unknown";
}

Resolution resolve(std::string_view reply, const ClarifyingQuestion& question,
                   const SentenceEncoder& encoder, const NoneLexicon& none_lexicon,
                   const ResolverOptions& options) {
  if (normalize_whitespace(reply).empty()) throw PreconditionError("resolve: empty reply");
  const SentenceVector r = encoder.encode(reply);
  Resolution res{};
  res.similarity_j = cosine(r, encoder.encode(question.option_j));
  res.similarity_k = cosine(r, encoder.encode(question.option_k));
  res.similarity_none = -1.0;
  for (const auto& phrase : none_lexicon.phrases()) {
    res.similarity_none = std::max(res.similarity_none, cosine(r, encoder.encode(phrase)));
  }

  // Strict comparisons give the tie order Neither > IntentJ > IntentK.
  double best = res.similarity_none;
  res.outcome = ResolutionOutcome::kNeither;
  if (res.similarity_j > best) {
    best = res.similarity_j;
    res.outcome = ResolutionOutcome::kIntentJ;
  }
  if (res.similarity_k > best) {
    best = res.similarity_k;
    res.outcome = ResolutionOutcome::kIntentK;
  }
  double sims[3] = {res.similarity_none, res.similarity_j, res.similarity_k};
  std::sort(sims, sims + 3);
  res.margin = sims[2] - sims[1];
  if (options.minimum_similarity && best < *options.minimum_similarity) {
    res.outcome = ResolutionOutcome::kNeither;
  }
  return res;
}

}  // namespace disambig
