#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "disambig/corpus.h"
#include "disambig/encoder.h"

namespace disambig {

// Deterministic desk-scale benchmark: an IT/banking service-desk intent set
// with sibling families (intents that share a verb or an object), a held-out
// test split, a blended ambiguous set, word vectors and hypernyms.
struct SyntheticOptions {
  std::uint64_t seed = 2024;
  std::size_t train_per_intent = 30;
  std::size_t test_per_intent = 10;
  // Generic utterances (the family's shared phrasing, no distinguishing
  // word) per sibling intent, in train and test respectively.
  std::size_t generic_train_per_intent = 3;
  std::size_t generic_test_per_intent = 1;
  // About 38% of the blended set names both intents explicitly; the rest are
  // abstract phrasings.
  std::size_t abstract_per_family = 18;
  std::size_t blended_pairs = 88;
  std::size_t vector_dim = 48;
};

struct SyntheticBundle {
  Corpus train;
  Corpus test;
  std::vector<AmbiguousExample> ambiguous;
  WordVectorTable vectors;
  HypernymLexicon hypernyms;
};

SyntheticBundle make_synthetic_bundle(const SyntheticOptions& options = {});

// Two intents, three utterances each: open_savings and open_checking.
Corpus toy_banking_corpus();

// Hypernyms for the bundled families.
HypernymLexicon bundled_hypernyms();

// Words a user commonly types in replies (none phrases, pronouns, "one").
std::vector<std::string> reply_vocabulary();

// One pseudo-random Gaussian vector per distinct token of `texts`, seeded
// from (seed, token) so a token's vector does not depend on the others.
// Function words are scaled down by 4.
WordVectorTable hashed_vectors(const std::vector<std::string>& texts, std::size_t dim,
                               std::uint64_t seed);

}  // namespace disambig
