#include "disambig/classifier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "disambig/errors.h"
#include "disambig/kernels.h"
#include "disambig/text.h"

namespace disambig {

using nlohmann::json;

namespace {

std::vector<std::string> unigrams_and_bigrams(std::string_view text) {
  auto tokens = tokenize(text);
  auto grams = tokens;
  auto bigrams = ngrams(tokens, 2);
  grams.insert(grams.end(), bigrams.begin(), bigrams.end());
  return grams;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vocabulary

void Vocabulary::add_term(std::string term, std::uint32_t df) {
  index_.emplace(term, static_cast<std::uint32_t>(terms_.size()));
  terms_.push_back(std::move(term));
  df_.push_back(df);
}

void Vocabulary::finalize() {
  idf_.resize(terms_.size());
  const double n = static_cast<double>(num_documents_);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df_[i]))) + 1.0;
  }
}

Vocabulary Vocabulary::build(const Corpus& corpus) {
  Vocabulary vocab;
  vocab.num_documents_ = corpus.size();
  for (const auto& u : corpus.utterances()) {
    auto grams = unigrams_and_bigrams(u.text);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) {
      auto it = vocab.index_.find(g);
      if (it == vocab.index_.end()) {
        vocab.add_term(std::move(g), 1);
      } else {
        ++vocab.df_[it->second];
      }
    }
  }
  // Re-number by first appearance in the token stream so indices do not
  // depend on the per-document sort above.
  Vocabulary ordered;
  ordered.num_documents_ = vocab.num_documents_;
  for (const auto& u : corpus.utterances()) {
    for (auto& g : unigrams_and_bigrams(u.text)) {
      if (ordered.index_.find(g) != ordered.index_.end()) continue;
      std::uint32_t df = vocab.df_[vocab.index_.find(g)->second];
      ordered.add_term(std::move(g), df);
    }
  }
  ordered.finalize();
  return ordered;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view ngram) const {
  auto it = index_.find(ngram);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

json Vocabulary::to_json() const {
  return json{{"num_documents", num_documents_}, {"terms", terms_}, {"df", df_}};
}

Vocabulary Vocabulary::from_json(const json& j) {
  Vocabulary vocab;
  vocab.num_documents_ = j.at("num_documents").get<std::size_t>();
  auto terms = j.at("terms").get<std::vector<std::string>>();
  auto df = j.at("df").get<std::vector<std::uint32_t>>();
  if (terms.size() != df.size()) throw ParseError("vocabulary", 0, "terms/df length mismatch");
  for (std::size_t i = 0; i < terms.size(); ++i) vocab.add_term(std::move(terms[i]), df[i]);
  vocab.finalize();
  return vocab;
}

FeatureVector featurize(std::string_view text, const Vocabulary& vocabulary) {
  if (normalize_whitespace(text).empty()) throw PreconditionError("featurize: empty text");
  std::map<std::uint32_t, double> counts;
  for (const auto& g : unigrams_and_bigrams(text)) {
    if (auto idx = vocabulary.find(g)) counts[*idx] += 1.0;
  }
  FeatureVector features;
  features.reserve(counts.size());
  double norm_sq = 0.0;
  for (const auto& [idx, count] : counts) {
    double w = count * vocabulary.idf(idx);
    features.push_back({idx, w});
    norm_sq += w * w;
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& f : features) f.value *= inv;
  }
  return features;
}

// ---------------------------------------------------------------------------
// IntentModel

IntentModel::IntentModel(std::vector<std::string> intents, Vocabulary vocabulary)
    : intents_(std::move(intents)),
      vocabulary_(std::move(vocabulary)),
      weights_(intents_.size() * vocabulary_.size(), 0.0),
      bias_(intents_.size(), 0.0) {
  if (intents_.size() < 2) throw InvariantError("model needs at least 2 intents");
}

std::span<double> IntentModel::weight_row(std::size_t intent) {
  return std::span<double>(weights_).subspan(intent * num_features(), num_features());
}

std::span<const double> IntentModel::weight_row(std::size_t intent) const {
  return std::span<const double>(weights_).subspan(intent * num_features(), num_features());
}

void IntentModel::set_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvariantError("temperature must be positive");
  temperature_ = t;
}

std::vector<double> IntentModel::logits(const FeatureVector& features) const {
  std::vector<double> z(bias_.begin(), bias_.end());
  for (std::size_t c = 0; c < z.size(); ++c) {
    const double* row = weights_.data() + c * num_features();
    double s = 0.0;
    for (const auto& f : features) s += row[f.index] * f.value;
    z[c] += s;
  }
  return z;
}

void IntentModel::scale_parameters(double factor) {
  kernels::scale(weights_, factor);
  kernels::scale(bias_, factor);
}

json IntentModel::to_json() const {
  return json{{"intents", intents_},         {"vocabulary", vocabulary_.to_json()},
              {"weights", weights_},         {"bias", bias_},
              {"temperature", temperature_}};
}

IntentModel IntentModel::from_json(const json& j) {
  IntentModel model(j.at("intents").get<std::vector<std::string>>(),
                    Vocabulary::from_json(j.at("vocabulary")));
  auto weights = j.at("weights").get<std::vector<double>>();
  auto bias = j.at("bias").get<std::vector<double>>();
  if (weights.size() != model.weights_.size() || bias.size() != model.bias_.size()) {
    throw ParseError("model", 0, "weight/bias shape mismatch");
  }
  model.weights_ = std::move(weights);
  model.bias_ = std::move(bias);
  model.set_temperature(j.at("temperature").get<double>());
  return model;
}

// ---------------------------------------------------------------------------
// Training

IntentDistribution softmax(std::span<const double> logits, double temperature) {
  IntentDistribution dist;
  dist.probabilities.resize(logits.size());
  if (logits.empty()) return dist;
  double max_z = *std::max_element(logits.begin(), logits.end()) / temperature;
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    double e = std::exp(logits[i] / temperature - max_z);
    dist.probabilities[i] = e;
    total += e;
  }
  for (double& p : dist.probabilities) p /= total;
  return dist;
}

IntentModel train(const Corpus& corpus, const TrainingOptions& options) {
  if (corpus.size() == 0) throw PreconditionError("train: empty corpus");
  if (options.epochs <= 0 || options.batch_size == 0 || !(options.learning_rate > 0.0) ||
      options.l2 < 0.0) {
    throw PreconditionError("train: invalid hyperparameters");
  }
  IntentModel model(corpus.intents(), Vocabulary::build(corpus));
  const std::size_t m = model.num_intents();
  const std::size_t n = corpus.size();

  std::vector<FeatureVector> features(n);
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    features[i] = featurize(corpus.utterances()[i].text, model.vocabulary());
    labels[i] = *corpus.intent_index(corpus.utterances()[i].intent);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<double>> residuals;
  auto weights = model.weights();
  auto bias = model.bias();
  const std::size_t stride = model.num_features();

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
    for (std::size_t start = 0; start < n; start += options.batch_size) {
      const std::size_t end = std::min(n, start + options.batch_size);
      const double step = options.learning_rate / static_cast<double>(end - start);
      // Residuals for the whole batch first, so the update is the exact
      // batch gradient.
      residuals.assign(end - start, {});
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        auto probs = softmax(model.logits(features[i]), 1.0).probabilities;
        probs[labels[i]] -= 1.0;
        residuals[b - start] = std::move(probs);
      }
      if (options.l2 > 0.0) kernels::scale(weights, 1.0 - options.learning_rate * options.l2);
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t i = order[b];
        const auto& r = residuals[b - start];
        for (std::size_t c = 0; c < m; ++c) {
          const double g = step * r[c];
          if (g == 0.0) continue;
          double* row = weights.data() + c * stride;
          for (const auto& f : features[i]) row[f.index] -= g * f.value;
          bias[c] -= g;
        }
      }
    }
  }
  return model;
}

IntentDistribution predict(const IntentModel& model, const FeatureVector& features) {
  return softmax(model.logits(features), model.temperature());
}

IntentDistribution predict(const IntentModel& model, std::string_view text) {
  return predict(model, featurize(text, model.vocabulary()));
}

std::pair<std::size_t, std::size_t> top_two(std::span<const double> p) {
  if (p.size() < 2) throw PreconditionError("top_two needs at least 2 entries");
  std::size_t first = p[1] > p[0] ? 1 : 0;
  std::size_t second = 1 - first;
  for (std::size_t i = 2; i < p.size(); ++i) {
    if (p[i] > p[first]) {
      second = first;
      first = i;
    } else if (p[i] > p[second]) {
      second = i;
    }
  }
  return {first, second};
}

// ---------------------------------------------------------------------------
// Calibration

namespace {

struct HeldOutLogits {
  std::vector<std::vector<double>> logits;
  std::vector<std::size_t> labels;
};

HeldOutLogits collect_logits(const IntentModel& model, const Corpus& held_out) {
  HeldOutLogits out;
  std::map<std::string_view, std::size_t> model_index;
  for (std::size_t i = 0; i < model.intents().size(); ++i) model_index[model.intents()[i]] = i;
  for (const auto& u : held_out.utterances()) {
    auto it = model_index.find(u.intent);
    if (it == model_index.end()) throw NotFoundError("held-out intent unknown to model: " + u.intent);
    out.logits.push_back(model.logits(featurize(u.text, model.vocabulary())));
    out.labels.push_back(it->second);
  }
  return out;
}

double nll(const HeldOutLogits& data, double temperature) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.logits.size(); ++i) {
    const auto& z = data.logits[i];
    double max_z = *std::max_element(z.begin(), z.end()) / temperature;
    double sum = 0.0;
    for (double v : z) sum += std::exp(v / temperature - max_z);
    total += (max_z + std::log(sum)) - z[data.labels[i]] / temperature;
  }
  return total / static_cast<double>(data.logits.size());
}

}  // namespace

double negative_log_likelihood(const IntentModel& model, const Corpus& held_out,
                               double temperature) {
  return nll(collect_logits(model, held_out), temperature);
}

IntentModel calibrate(IntentModel model, const Corpus& held_out) {
  if (held_out.size() == 0) throw PreconditionError("calibrate: empty held-out set");
  const auto data = collect_logits(model, held_out);
  auto f = [&](double t) { return nll(data, t); };

  // NLL is convex in 1/T, hence unimodal in T.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = kMinTemperature, b = kMaxTemperature;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int iter = 0; iter < 200 && (b - a) > 1e-9; ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  double best = 0.5 * (a + b);
  double best_value = f(best);
  for (double edge : {kMinTemperature, kMaxTemperature}) {
    double v = f(edge);
    if (v < best_value) {
      best = edge;
      best_value = v;
    }
  }
  model.set_temperature(best);
  return model;
}

// ---------------------------------------------------------------------------
// Ambiguity

void Thresholds::validate() const {
  if (!(t1 >= 0.0 && t1 <= 1.0) || !(t2 >= 0.0 && t2 <= 1.0)) {
    throw InvariantError("thresholds must lie in [0, 1]");
  }
}

std::string_view to_string(AmbiguityKind kind) {
  switch (kind) {
    case AmbiguityKind::kUnambiguous:
      return "unambiguous";
    case AmbiguityKind::kSelfAmbiguous:
      return "self_ambiguous";
    case AmbiguityKind::kPairAmbiguous:
      return "pair_ambiguous";
  }
  return "unknown";
}

AmbiguityVerdict detect_ambiguity(const IntentDistribution& dist, const Thresholds& thresholds) {
  if (dist.size() < 2) throw PreconditionError("detect_ambiguity needs at least 2 intents");
  thresholds.validate();
  auto [j, k] = top_two(dist.probabilities);
  AmbiguityVerdict v{AmbiguityKind::kUnambiguous, j, k, dist[j], dist[j] - dist[k]};
  if (dist[j] < thresholds.t1) {
    v.kind = AmbiguityKind::kSelfAmbiguous;
  } else if (v.margin < thresholds.t2) {
    v.kind = AmbiguityKind::kPairAmbiguous;
  }
  return v;
}

}  // namespace disambig
