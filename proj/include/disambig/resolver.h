#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "disambig/encoder.h"
#include "disambig/surface.h"

namespace disambig {

// Rejection expressions a user may answer with.
class NoneLexicon {
 public:
  NoneLexicon();  // "none", "none of them", "neither", "no", "something else"
  explicit NoneLexicon(std::vector<std::string> phrases);

  const std::vector<std::string>& phrases() const { return phrases_; }

 private:
  std::vector<std::string> phrases_;
};

enum class ResolutionOutcome { kIntentJ, kIntentK, kNeither };

std::string_view to_string(ResolutionOutcome outcome);

struct Resolution {
  ResolutionOutcome outcome;
  double similarity_j;
  double similarity_k;
  double similarity_none;  // max over the none lexicon
  double margin;           // best minus runner-up similarity
};

struct ResolverOptions {
  // Below this best similarity the reply resolves to Neither. Off by default.
  std::optional<double> minimum_similarity;
};

// Argmax of cos(r, option_j), cos(r, option_k), max_n cos(r, n). Ties:
// Neither, then IntentJ, then IntentK. Throws PreconditionError on an empty
// reply.
Resolution resolve(std::string_view reply, const ClarifyingQuestion& question,
                   const SentenceEncoder& encoder, const NoneLexicon& none_lexicon,
                   const ResolverOptions& options = {});

}  // namespace disambig
