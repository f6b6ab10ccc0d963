#include "disambig/evaluation.h"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "disambig/errors.h"

namespace disambig {

double TopKMetrics::rank2_error_fraction() const {
  const std::size_t errors = total - top1_correct;
  return errors == 0 ? 0.0 : static_cast<double>(rank2_errors) / static_cast<double>(errors);
}

TopKMetrics topk_metrics(const std::vector<IntentDistribution>& dists,
                         const std::vector<std::size_t>& gold) {
  if (dists.size() != gold.size()) throw PreconditionError("topk_metrics: size mismatch");
  if (dists.empty()) throw PreconditionError("topk_metrics: empty test set");
  TopKMetrics m;
  m.total = dists.size();
  for (std::size_t i = 0; i < dists.size(); ++i) {
    auto [first, second] = top_two(dists[i].probabilities);
    if (gold[i] == first) {
      ++m.top1_correct;
      ++m.top2_correct;
    } else if (gold[i] == second) {
      ++m.top2_correct;
      ++m.rank2_errors;
    }
  }
  const double n = static_cast<double>(m.total);
  m.top1_accuracy = static_cast<double>(m.top1_correct) / n;
  m.top2_accuracy = static_cast<double>(m.top2_correct) / n;
  // One prediction per example: micro precision = micro recall = accuracy.
  m.top1_f1 = m.top1_accuracy;
  m.top2_f1 = m.top2_accuracy;
  return m;
}

TopKMetrics evaluate_topk(const Engine& engine, const Corpus& test) {
  if (test.size() == 0) throw PreconditionError("evaluate_topk: empty test set");
  std::vector<IntentDistribution> dists;
  std::vector<std::size_t> gold;
  dists.reserve(test.size());
  gold.reserve(test.size());
  for (const auto& u : test.utterances()) {
    gold.push_back(engine.intent_index(u.intent));
    dists.push_back(engine.predict(u.text));
  }
  return topk_metrics(dists, gold);
}

MarginHistogram margin_histogram(const std::vector<double>& margins, double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw PreconditionError("margin_histogram: bin width must lie in (0, 1]");
  }
  const auto bins = static_cast<std::size_t>(std::ceil(1.0 / bin_width - 1e-9));
  MarginHistogram h;
  h.counts.assign(bins, 0);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.edges.push_back(std::min(1.0, static_cast<double>(b) * bin_width));
  }
  for (double m : margins) {
    auto b = static_cast<std::size_t>(std::clamp(m, 0.0, 1.0) / bin_width);
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

namespace {

bool same_pair(std::size_t j, std::size_t k, std::size_t a, std::size_t b) {
  return (j == a && k == b) || (j == b && k == a);
}

}  // namespace

AmbiguityReport evaluate_ambiguity(const Engine& engine,
                                   const std::vector<AmbiguousExample>& examples,
                                   const std::vector<double>& t2_values) {
  AmbiguityReport report;
  report.total = examples.size();
  std::vector<IntentDistribution> dists;
  std::vector<std::pair<std::size_t, std::size_t>> expected;
  for (const auto& e : examples) {
    dists.push_back(engine.predict(e.text));
    expected.emplace_back(engine.intent_index(e.intent_a), engine.intent_index(e.intent_b));
  }
  for (double t2 : t2_values) {
    Thresholds thresholds = engine.config().thresholds;
    thresholds.t2 = t2;
    thresholds.validate();
    AmbiguityPoint point;
    point.t2 = t2;
    for (std::size_t i = 0; i < dists.size(); ++i) {
      AmbiguityVerdict v = detect_ambiguity(dists[i], thresholds);
      if (v.kind != AmbiguityKind::kPairAmbiguous) continue;
      ++point.detected;
      if (same_pair(v.top, v.second, expected[i].first, expected[i].second)) ++point.matched;
    }
    point.match_rate = report.total == 0 ? 0.0
                                         : static_cast<double>(point.matched) /
                                               static_cast<double>(report.total);
    report.sweep.push_back(point);
  }
  for (const auto& d : dists) {
    auto [j, k] = top_two(d.probabilities);
    report.margins.push_back(d[j] - d[k]);
  }
  report.histogram = margin_histogram(report.margins);
  return report;
}

CoverageReport evaluate_coverage(const Engine& engine,
                                 const std::vector<AmbiguousExample>& examples,
                                 std::optional<double> gate, bool keep_questions) {
  CoverageReport report;
  report.gate = gate.value_or(engine.config().gate);
  for (const auto& e : examples) {
    AmbiguityVerdict v = engine.assess(engine.predict(e.text));
    if (!v.ambiguous()) continue;
    ++report.detected;
    Clarification c = engine.clarify(e.text, v.top, v.second, report.gate);
    if (c.question.provenance == Provenance::kQgPath) {
      ++report.qg_path;
    } else {
      ++report.template_path;
    }
    if (keep_questions) report.questions.push_back(std::move(c.question));
  }
  if (report.detected > 0) {
    report.qg_fraction =
        static_cast<double>(report.qg_path) / static_cast<double>(report.detected);
    report.template_fraction = 1.0 - report.qg_fraction;
  }
  return report;
}

std::vector<CoverageReport> coverage_sweep(const Engine& engine,
                                           const std::vector<AmbiguousExample>& examples,
                                           const std::vector<double>& gates) {
  std::vector<CoverageReport> out;
  for (double g : gates) out.push_back(evaluate_coverage(engine, examples, g));
  return out;
}

void write_topk_csv(std::ostream& out, const TopKMetrics& m) {
  out << "n,top1,top2,top1_f1,top2_f1,rank2_errors\n"
      << m.total << ',' << m.top1_accuracy << ',' << m.top2_accuracy << ',' << m.top1_f1 << ','
      << m.top2_f1 << ',' << m.rank2_errors << '\n';
}

void write_ambiguity_csv(std::ostream& out, const AmbiguityReport& report) {
  out << "t2,total,detected,matched,match_rate\n";
  for (const auto& p : report.sweep) {
    out << p.t2 << ',' << report.total << ',' << p.detected << ',' << p.matched << ','
        << p.match_rate << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const MarginHistogram& h) {
  out << "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    out << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.counts[b] << '\n';
  }
}

void write_coverage_csv(std::ostream& out, const std::vector<CoverageReport>& reports) {
  out << "gate,detected,qg_path,template_path,qg_fraction,template_fraction\n";
  for (const auto& r : reports) {
    out << r.gate << ',' << r.detected << ',' << r.qg_path << ',' << r.template_path << ','
        << r.qg_fraction << ',' << r.template_fraction << '\n';
  }
}

}  // namespace disambig
