#include "disambig/selector.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "disambig/errors.h"
#include "disambig/text.h"

namespace disambig {

void ScoreWeights::validate() const {
  if (!std::isfinite(question_similarity_weight) || !std::isfinite(answer_dissimilarity_weight) ||
      !std::isfinite(query_affinity_weight)) {
    throw InvariantError("score weights must be finite");
  }
}

double combine_terms(const ScoreTerms& t, const ScoreWeights& w) {
  return w.question_similarity_weight * t.question_similarity -
         w.answer_dissimilarity_weight * t.answer_similarity +
         w.query_affinity_weight * (t.query_similarity_j + t.query_similarity_k);
}

namespace {

ScoreTerms terms_from_vectors(const SentenceVector& query, const SentenceVector& qj,
                              const SentenceVector& aj, const SentenceVector& qk,
                              const SentenceVector& ak, const ScoreWeights& weights) {
  ScoreTerms t;
  t.question_similarity = cosine(qj, qk);
  t.answer_similarity = cosine(aj, ak);
  t.query_similarity_j = cosine(query, qj);
  t.query_similarity_k = cosine(query, qk);
  t.total = combine_terms(t, weights);
  return t;
}

struct EncodedSet {
  std::vector<std::size_t> members;  // indices into the source set
  std::vector<SentenceVector> questions;
  std::vector<SentenceVector> answers;
};

std::vector<std::size_t> most_query_similar(const QAPairSet& set, const SentenceVector& query,
                                            const SentenceEncoder& encoder, std::size_t keep) {
  std::vector<std::pair<double, std::size_t>> sims;
  sims.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    sims.emplace_back(cosine(query, encoder.encode(set.pairs[i].question)), i);
  }
  std::stable_sort(sims.begin(), sims.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  sims.resize(std::min(keep, sims.size()));
  std::vector<std::size_t> out;
  for (const auto& s : sims) out.push_back(s.second);
  std::sort(out.begin(), out.end());
  return out;
}

EncodedSet encode_members(const QAPairSet& set, std::vector<std::size_t> members,
                          const SentenceEncoder& encoder) {
  EncodedSet out;
  out.members = std::move(members);
  for (std::size_t i : out.members) {
    out.questions.push_back(encoder.encode(set.pairs[i].question));
    out.answers.push_back(encoder.encode(set.pairs[i].answer));
  }
  return out;
}

bool ranks_before(const DiscriminativeSelection& a, const DiscriminativeSelection& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.index_j != b.index_j) return a.index_j < b.index_j;
  return a.index_k < b.index_k;
}

}  // namespace

ScoreTerms score_terms(std::string_view query, const QAPair& qa_j, const QAPair& qa_k,
                       const SentenceEncoder& encoder, const ScoreWeights& weights) {
  return terms_from_vectors(encoder.encode(query), encoder.encode(qa_j.question),
                            encoder.encode(qa_j.answer), encoder.encode(qa_k.question),
                            encoder.encode(qa_k.answer), weights);
}

double score_pair(std::string_view query, const QAPair& qa_j, const QAPair& qa_k,
                  const SentenceEncoder& encoder, const ScoreWeights& weights) {
  return score_terms(query, qa_j, qa_k, encoder, weights).total;
}

std::pair<QAPairSet, QAPairSet> drop_shared_answers(const QAPairSet& set_j,
                                                    const QAPairSet& set_k) {
  auto key = [](const QAPair& p) { return join(tokenize(p.answer), " "); };
  std::set<std::string> answers_j, answers_k;
  for (const auto& p : set_j.pairs) answers_j.insert(key(p));
  for (const auto& p : set_k.pairs) answers_k.insert(key(p));
  auto keep = [&](const QAPairSet& set, const std::set<std::string>& other) {
    QAPairSet out{set.intent, {}};
    for (const auto& p : set.pairs) {
      if (!other.count(key(p))) out.pairs.push_back(p);
    }
    return out;
  };
  return {keep(set_j, answers_k), keep(set_k, answers_j)};
}

SelectionResult rank_candidates(std::string_view query, const QAPairSet& set_j,
                                const QAPairSet& set_k, const SentenceEncoder& encoder,
                                const SelectionOptions& options) {
  options.weights.validate();
  SelectionResult result;
  if (set_j.empty() || set_k.empty()) return result;
  const SentenceVector query_vec = encoder.encode(query);

  std::vector<std::size_t> members_j(set_j.size()), members_k(set_k.size());
  std::iota(members_j.begin(), members_j.end(), 0);
  std::iota(members_k.begin(), members_k.end(), 0);
  const std::size_t cap = std::max<std::size_t>(1, options.cross_product_cap);
  if (set_j.size() * set_k.size() > cap) {
    result.truncated = true;
    std::size_t side = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(cap))));
    std::size_t keep_j = std::min(set_j.size(), side);
    std::size_t keep_k = std::min(set_k.size(), std::max<std::size_t>(1, cap / keep_j));
    keep_j = std::min(set_j.size(), std::max<std::size_t>(1, cap / keep_k));
    members_j = most_query_similar(set_j, query_vec, encoder, keep_j);
    members_k = most_query_similar(set_k, query_vec, encoder, keep_k);
  }
  const EncodedSet enc_j = encode_members(set_j, std::move(members_j), encoder);
  const EncodedSet enc_k = encode_members(set_k, std::move(members_k), encoder);

  const std::size_t keep_top = std::max<std::size_t>(1, options.keep_top);
  if (options.keep_matrix) result.matrix.reserve(enc_j.members.size() * enc_k.members.size());
  for (std::size_t a = 0; a < enc_j.members.size(); ++a) {
    for (std::size_t b = 0; b < enc_k.members.size(); ++b) {
      ScoreTerms t = terms_from_vectors(query_vec, enc_j.questions[a], enc_j.answers[a],
                                        enc_k.questions[b], enc_k.answers[b], options.weights);
      const std::size_t ij = enc_j.members[a];
      const std::size_t ik = enc_k.members[b];
      if (options.keep_matrix) result.matrix.push_back({ij, ik, t});
      if (result.ranked.size() == keep_top && t.total <= result.ranked.back().score) continue;
      DiscriminativeSelection sel{set_j.pairs[ij], set_k.pairs[ik], t.total,
                                  t.total >= options.gate, ij, ik};
      auto pos = std::upper_bound(result.ranked.begin(), result.ranked.end(), sel, ranks_before);
      result.ranked.insert(pos, std::move(sel));
      if (result.ranked.size() > keep_top) result.ranked.pop_back();
    }
  }
  return result;
}

std::optional<DiscriminativeSelection> select_best(std::string_view query,
                                                   const QAPairSet& set_j,
                                                   const QAPairSet& set_k,
                                                   const SentenceEncoder& encoder,
                                                   const ScoreWeights& weights, double gate,
                                                   std::size_t cross_product_cap) {
  SelectionOptions options;
  options.weights = weights;
  options.gate = gate;
  options.cross_product_cap = cross_product_cap;
  options.keep_top = 1;
  auto result = rank_candidates(query, set_j, set_k, encoder, options);
  if (result.ranked.empty()) return std::nullopt;
  return result.ranked.front();
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_score_matrix_csv(std::ostream& out, const std::vector<ScoreCell>& matrix,
                            const QAPairSet& set_j, const QAPairSet& set_k) {
  out << "q_j,a_j,q_k,a_k,sim_qq,sim_aa,sim_q_qj,sim_q_qk,total\n";
  for (const auto& cell : matrix) {
    const auto& pj = set_j.pairs.at(cell.index_j);
    const auto& pk = set_k.pairs.at(cell.index_k);
    out << csv_field(pj.question) << ',' << csv_field(pj.answer) << ',' << csv_field(pk.question)
        << ',' << csv_field(pk.answer) << ',' << cell.terms.question_similarity << ','
        << cell.terms.answer_similarity << ',' << cell.terms.query_similarity_j << ','
        << cell.terms.query_similarity_k << ',' << cell.terms.total << '\n';
  }
}

}  // namespace disambig
