#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <string_view>
#include <vector>

#include "disambig/encoder.h"
#include "disambig/qgen.h"

namespace disambig {

struct ScoreWeights {
  double question_similarity_weight = 1.0;
  double answer_dissimilarity_weight = 1.0;
  double query_affinity_weight = 0.5;

  void validate() const;
};

struct ScoreTerms {
  double question_similarity = 0.0;  // sim(q_j, q_k)
  double answer_similarity = 0.0;    // sim(a_j, a_k)
  double query_similarity_j = 0.0;   // sim(q, q_j)
  double query_similarity_k = 0.0;   // sim(q, q_k)
  double total = 0.0;
};

// w_q * sim(q_j, q_k) - w_a * sim(a_j, a_k) + w_aff * (sim(q, q_j) + sim(q, q_k))
double combine_terms(const ScoreTerms& terms, const ScoreWeights& weights);

ScoreTerms score_terms(std::string_view query, const QAPair& qa_j, const QAPair& qa_k,
                       const SentenceEncoder& encoder, const ScoreWeights& weights);

double score_pair(std::string_view query, const QAPair& qa_j, const QAPair& qa_k,
                  const SentenceEncoder& encoder, const ScoreWeights& weights = {});

struct DiscriminativeSelection {
  QAPair pair_j;  // (q_J*, a_J*)
  QAPair pair_k;  // (q_K*, a_K*)
  double score = 0.0;
  bool gate_passed = false;
  std::size_t index_j = 0;  // position in the input sets
  std::size_t index_k = 0;
};

struct ScoreCell {
  std::size_t index_j;
  std::size_t index_k;
  ScoreTerms terms;
};

struct SelectionOptions {
  ScoreWeights weights;
  double gate = 1.3;  // tuned on the bundled synthetic corpus
  std::size_t cross_product_cap = 10000;
  std::size_t keep_top = 3;
  bool keep_matrix = false;
};

struct SelectionResult {
  // Best first; ties in (index_j, index_k) lexicographic order.
  std::vector<DiscriminativeSelection> ranked;
  // Every scored cell, in evaluation order, when keep_matrix is set.
  std::vector<ScoreCell> matrix;
  // True if the cross-product cap forced truncation.
  bool truncated = false;
};

// Exhaustive scoring of Q_J x Q_K. If |Q_J| * |Q_K| exceeds the cap, each set
// is first cut down to its members whose questions are most similar to the
// query. Empty when either set is empty.
SelectionResult rank_candidates(std::string_view query, const QAPairSet& set_j,
                                const QAPairSet& set_k, const SentenceEncoder& encoder,
                                const SelectionOptions& options);

// Both sets without the pairs whose answer, compared as lowercased tokens,
// occurs on both sides: a shared answer cannot separate the intents.
std::pair<QAPairSet, QAPairSet> drop_shared_answers(const QAPairSet& set_j,
                                                    const QAPairSet& set_k);

// Argmax of the discriminative score; gate_passed = score >= gate.
std::optional<DiscriminativeSelection> select_best(std::string_view query,
                                                   const QAPairSet& set_j,
                                                   const QAPairSet& set_k,
                                                   const SentenceEncoder& encoder,
                                                   const ScoreWeights& weights, double gate,
                                                   std::size_t cross_product_cap = 10000);

// CSV: q_j,a_j,q_k,a_k,sim_qq,sim_aa,sim_q_qj,sim_q_qk,total
void write_score_matrix_csv(std::ostream& out, const std::vector<ScoreCell>& matrix,
                            const QAPairSet& set_j, const QAPairSet& set_k);

}  // namespace disambig
