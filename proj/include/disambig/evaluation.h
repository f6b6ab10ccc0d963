#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "disambig/classifier.h"
#include "disambig/corpus.h"
#include "disambig/engine.h"

namespace disambig {

struct TopKMetrics {
  std::size_t total = 0;
  std::size_t top1_correct = 0;
  std::size_t top2_correct = 0;
  // Errors whose gold intent ranked second.
  std::size_t rank2_errors = 0;
  double top1_accuracy = 0.0;
  double top2_accuracy = 0.0;
  // Micro-averaged over single-label predictions.
  double top1_f1 = 0.0;
  double top2_f1 = 0.0;

  double rank2_error_fraction() const;
};

// Pure form over precomputed distributions; `gold[i]` indexes `dists[i]`.
// Ties in rank follow top_two (lower index first).
TopKMetrics topk_metrics(const std::vector<IntentDistribution>& dists,
                         const std::vector<std::size_t>& gold);

// Throws PreconditionError on an empty test set and NotFoundError when a test
// label is unknown to the engine.
TopKMetrics evaluate_topk(const Engine& engine, const Corpus& test);

struct AmbiguityPoint {
  double t2 = 0.0;
  std::size_t detected = 0;  // PairAmbiguous verdicts
  std::size_t matched = 0;   // ... whose {j, k} equals the expected pair
  double match_rate = 0.0;   // matched / total examples
};

struct MarginHistogram {
  std::vector<double> edges;  // size counts.size() + 1
  std::vector<std::size_t> counts;
};

// Fixed-width bins over [0, 1]; the last bin is closed on the right.
MarginHistogram margin_histogram(const std::vector<double>& margins, double bin_width = 0.05);

struct AmbiguityReport {
  std::size_t total = 0;
  std::vector<AmbiguityPoint> sweep;  // in the order of the requested t2 values
  std::vector<double> margins;        // p_j - p_k per example
  MarginHistogram histogram;
};

// The engine's t1 is kept; each t2 value is swept independently. Pair
// matching is order-insensitive.
AmbiguityReport evaluate_ambiguity(const Engine& engine,
                                   const std::vector<AmbiguousExample>& examples,
                                   const std::vector<double>& t2_values);

struct CoverageReport {
  double gate = 0.0;
  std::size_t detected = 0;
  std::size_t qg_path = 0;
  std::size_t template_path = 0;
  double qg_fraction = 0.0;
  double template_fraction = 0.0;  // 1 - qg_fraction
  // Every emitted question, in example order (kept on request).
  std::vector<ClarifyingQuestion> questions;
};

// Clarifies every ambiguous example (Pair or Self verdict) under the given
// gate, or the configured one.
CoverageReport evaluate_coverage(const Engine& engine,
                                 const std::vector<AmbiguousExample>& examples,
                                 std::optional<double> gate = std::nullopt,
                                 bool keep_questions = false);

std::vector<CoverageReport> coverage_sweep(const Engine& engine,
                                           const std::vector<AmbiguousExample>& examples,
                                           const std::vector<double>& gates);

// CSV writers with a header row.
void write_topk_csv(std::ostream& out, const TopKMetrics& metrics);
void write_ambiguity_csv(std::ostream& out, const AmbiguityReport& report);
void write_histogram_csv(std::ostream& out, const MarginHistogram& histogram);
void write_coverage_csv(std::ostream& out, const std::vector<CoverageReport>& reports);

}  // namespace disambig
