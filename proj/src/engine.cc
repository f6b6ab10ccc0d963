#include "disambig/engine.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "disambig/errors.h"
#include "disambig/text.h"

namespace disambig {

using nlohmann::json;

// ---------------------------------------------------------------------------
// EngineConfig

void EngineConfig::validate() const {
  thresholds.validate();
  weights.validate();
  if (std::isnan(gate)) throw InvariantError("gate is NaN");
  if (templates.empty()) throw InvariantError("template list is empty");
  for (const auto& t : templates) {
    if (t.find("{A}") == std::string::npos || t.find("{B}") == std::string::npos) {
      throw InvariantError("template must contain {A} and {B}: " + t);
    }
  }
  NoneLexicon check(none_lexicon);
  if (pairs_per_utterance_cap == 0) throw InvariantError("pairs_per_utterance_cap must be >= 1");
  if (cross_product_cap == 0) throw InvariantError("cross_product_cap must be >= 1");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw InvariantError("holdout_fraction must lie in (0, 1)");
  }
  if (!(session_ttl_seconds > 0.0)) throw InvariantError("session_ttl_seconds must be positive");
  make_paraphrase_hook(paraphrase_hook);
}

json EngineConfig::to_json() const {
  json j;
  j["thresholds"] = {{"t1", thresholds.t1}, {"t2", thresholds.t2}};
  j["weights"] = {{"question_similarity_weight", weights.question_similarity_weight},
                  {"answer_dissimilarity_weight", weights.answer_dissimilarity_weight},
                  {"query_affinity_weight", weights.query_affinity_weight}};
  j["gate"] = gate;
  j["top_n"] = top_n;
  j["none_lexicon"] = none_lexicon;
  j["templates"] = templates;
  j["pairs_per_utterance_cap"] = pairs_per_utterance_cap;
  j["cross_product_cap"] = cross_product_cap;
  j["paraphrase_hook"] = paraphrase_hook;
  j["resolver_minimum_similarity"] =
      resolver_minimum_similarity ? json(*resolver_minimum_similarity) : json(nullptr);
  j["training"] = {{"epochs", training.epochs},
                   {"batch_size", training.batch_size},
                   {"learning_rate", training.learning_rate},
                   {"l2", training.l2},
                   {"seed", training.seed}};
  j["holdout_fraction"] = holdout_fraction;
  j["session_ttl_seconds"] = session_ttl_seconds;
  j["cors_origin"] = cors_origin;
  return j;
}

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ParseError(where, 0, "expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ParseError(where, 0, "unknown key \"" + key + "\"");
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& target) {
  if (auto it = j.find(key); it != j.end()) target = it->get<T>();
}

}  // namespace

EngineConfig EngineConfig::from_json(const json& j) {
  EngineConfig c;
  try {
    reject_unknown_keys(j,
                        {"thresholds", "weights", "gate", "top_n", "none_lexicon", "templates",
                         "pairs_per_utterance_cap", "cross_product_cap", "paraphrase_hook",
                         "resolver_minimum_similarity", "training", "holdout_fraction",
                         "session_ttl_seconds", "cors_origin"},
                        "config");
    if (auto it = j.find("thresholds"); it != j.end()) {
      reject_unknown_keys(*it, {"t1", "t2"}, "config.thresholds");
      read_if(*it, "t1", c.thresholds.t1);
      read_if(*it, "t2", c.thresholds.t2);
    }
    if (auto it = j.find("weights"); it != j.end()) {
      reject_unknown_keys(*it,
                          {"question_similarity_weight", "answer_dissimilarity_weight",
                           "query_affinity_weight"},
                          "config.weights");
      read_if(*it, "question_similarity_weight", c.weights.question_similarity_weight);
      read_if(*it, "answer_dissimilarity_weight", c.weights.answer_dissimilarity_weight);
      read_if(*it, "query_affinity_weight", c.weights.query_affinity_weight);
    }
    read_if(j, "gate", c.gate);
    read_if(j, "top_n", c.top_n);
    read_if(j, "none_lexicon", c.none_lexicon);
    read_if(j, "templates", c.templates);
    read_if(j, "pairs_per_utterance_cap", c.pairs_per_utterance_cap);
    read_if(j, "cross_product_cap", c.cross_product_cap);
    read_if(j, "paraphrase_hook", c.paraphrase_hook);
    if (auto it = j.find("resolver_minimum_similarity"); it != j.end() && !it->is_null()) {
      c.resolver_minimum_similarity = it->get<double>();
    }
    if (auto it = j.find("training"); it != j.end()) {
      reject_unknown_keys(*it, {"epochs", "batch_size", "learning_rate", "l2", "seed"},
                          "config.training");
      read_if(*it, "epochs", c.training.epochs);
      read_if(*it, "batch_size", c.training.batch_size);
      read_if(*it, "learning_rate", c.training.learning_rate);
      read_if(*it, "l2", c.training.l2);
      read_if(*it, "seed", c.training.seed);
    }
    read_if(j, "holdout_fraction", c.holdout_fraction);
    read_if(j, "session_ttl_seconds", c.session_ttl_seconds);
    read_if(j, "cors_origin", c.cors_origin);
  } catch (const json::exception& e) {
    throw ParseError("config", 0, e.what());
  }
  c.validate();
  return c;
}

EngineConfig EngineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return from_json(j);
}

// ---------------------------------------------------------------------------
// Session / reply

std::string_view Session::state_name() const {
  if (std::holds_alternative<AwaitingQuery>(state)) return "awaiting_query";
  if (std::holds_alternative<AwaitingClarification>(state)) return "awaiting_clarification";
  return "closed";
}

json Session::to_json() const {
  json events = json::array();
  for (const auto& e : transcript) events.push_back({{"speaker", e.speaker}, {"text", e.text}});
  json j{{"session_id", id}, {"state", state_name()}, {"transcript", std::move(events)}};
  if (const auto* pending = std::get_if<AwaitingClarification>(&state)) {
    j["pending"] = {{"question", pending->question.text},
                    {"options", json::array({json{{"text", pending->question.option_j}},
                                             json{{"text", pending->question.option_k}}})}};
  } else if (const auto* closed = std::get_if<Closed>(&state)) {
    j["final_intent"] = closed->intent ? json(*closed->intent) : json(nullptr);
    j["confidence"] = closed->confidence;
  }
  return j;
}

json EngineReply::to_json() const {
  switch (kind) {
    case Kind::kFinal:
      return {{"kind", "final"}, {"intent", intent}, {"confidence", confidence}};
    case Kind::kClarify:
      return {{"kind", "clarify"},
              {"question", question},
              {"options", json::array({json{{"text", option_j}}, json{{"text", option_k}}})}};
    case Kind::kRejected:
      return {{"kind", "rejected"}, {"reason", reason}};
  }
  return {};
}

std::string EngineReply::display_text() const {
  switch (kind) {
    case Kind::kFinal:
      return intent;
    case Kind::kClarify:
      return question;
    case Kind::kRejected:
      return reason;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(EngineConfig config, IntentModel model,
               std::shared_ptr<const WordVectorTable> vectors, HypernymLexicon hypernyms,
               std::vector<QAPairSet> qa_sets,
               std::vector<std::vector<DiscriminativePhrase>> phrases)
    : config_(std::move(config)),
      model_(std::move(model)),
      vectors_(std::move(vectors)),
      encoder_(std::make_shared<MeanPoolingEncoder>(vectors_)),
      hypernyms_(std::move(hypernyms)),
      qa_sets_(std::move(qa_sets)),
      phrases_(std::move(phrases)),
      none_lexicon_(config_.none_lexicon),
      paraphrase_(make_paraphrase_hook(config_.paraphrase_hook)) {
  if (qa_sets_.size() != model_.num_intents() || phrases_.size() != model_.num_intents()) {
    throw InvariantError("engine tables do not match the intent inventory");
  }
}

Engine Engine::build(const Corpus& corpus, const EngineConfig& config, WordVectorTable vectors,
                     HypernymLexicon hypernyms, const std::vector<QAPairSet>* external_pairs,
                     std::vector<std::string>* warnings) {
  config.validate();
  // The temperature is fitted on a held-out split, then carried over to a
  // model trained on the whole corpus with the same options.
  auto [train_part, held_out] = split(corpus, config.holdout_fraction, config.training.seed);
  const double temperature =
      calibrate(train(train_part, config.training), held_out).temperature();
  IntentModel model = train(corpus, config.training);
  model.set_temperature(temperature);

  std::map<std::string, const QAPairSet*> external;
  if (external_pairs) {
    for (const auto& set : *external_pairs) {
      if (corpus.intent_index(set.intent)) external[set.intent] = &set;
    }
  }
  RuleBasedGenerator generator(config.pairs_per_utterance_cap);
  std::vector<QAPairSet> qa_sets;
  for (const auto& intent : corpus.intents()) {
    if (auto it = external.find(intent); it != external.end()) {
      qa_sets.push_back(*it->second);
      continue;
    }
    auto result = generate_pairs(utterances_of(corpus, intent), intent, generator);
    if (warnings) {
      warnings->insert(warnings->end(), result.warnings.begin(), result.warnings.end());
    }
    qa_sets.push_back(std::move(result.set));
  }

  auto table = phrase_table(corpus, config.top_n);
  std::vector<std::vector<DiscriminativePhrase>> phrases;
  for (const auto& intent : corpus.intents()) phrases.push_back(std::move(table[intent]));

  return Engine(config, std::move(model),
                std::make_shared<const WordVectorTable>(std::move(vectors)), std::move(hypernyms),
                std::move(qa_sets), std::move(phrases));
}

std::string Engine::serialize() const {
  json vectors_json = json::object();
  for (const auto& token : vectors_->tokens()) {
    auto v = vectors_->find(token);
    vectors_json[token] = std::vector<double>(v.begin(), v.end());
  }
  json hyper = json::array();
  for (const auto& [key, h] : hypernyms_.entries()) hyper.push_back({key.first, key.second, h});
  json qa = json::array();
  for (const auto& set : qa_sets_) qa.push_back(disambig::to_json(set));
  json phrases = json::array();
  for (const auto& list : phrases_) {
    json entries = json::array();
    for (const auto& p : list) entries.push_back({{"phrase", p.phrase}, {"weight", p.weight}});
    phrases.push_back(std::move(entries));
  }
  json j{{"format", "disambig-engine"},
         {"version", kArtifactVersion},
         {"config", config_.to_json()},
         {"model", model_.to_json()},
         {"qa_sets", std::move(qa)},
         {"phrases", std::move(phrases)},
         {"vectors", {{"dim", vectors_->dim()}, {"table", std::move(vectors_json)}}},
         {"hypernyms", std::move(hyper)}};
  return j.dump() + "\n";
}

Engine Engine::deserialize(std::string_view data) {
  json j;
  try {
    j = json::parse(data);
  } catch (const json::parse_error& e) {
    throw ParseError("artifact", 0, e.what());
  }
  try {
    if (j.at("format") != "disambig-engine") throw ParseError("artifact", 0, "not an engine artifact");
    if (j.at("version").get<int>() != kArtifactVersion) {
      throw ParseError("artifact", 0, "unsupported artifact version");
    }
    EngineConfig config = EngineConfig::from_json(j.at("config"));
    IntentModel model = IntentModel::from_json(j.at("model"));
    WordVectorTable vectors(j.at("vectors").at("dim").get<std::size_t>());
    for (const auto& [token, v] : j.at("vectors").at("table").items()) {
      vectors.add(token, v.get<std::vector<double>>());
    }
    HypernymLexicon hypernyms;
    for (const auto& row : j.at("hypernyms")) {
      hypernyms.add(row.at(0).get<std::string>(), row.at(1).get<std::string>(),
                    row.at(2).get<std::string>());
    }
    std::vector<QAPairSet> qa_sets;
    for (const auto& s : j.at("qa_sets")) qa_sets.push_back(qa_set_from_json(s));
    std::vector<std::vector<DiscriminativePhrase>> phrases;
    const auto& intents = model.intents();
    const auto& phrase_json = j.at("phrases");
    if (phrase_json.size() != intents.size()) throw ParseError("artifact", 0, "phrase table size");
    for (std::size_t i = 0; i < intents.size(); ++i) {
      std::vector<DiscriminativePhrase> list;
      for (const auto& p : phrase_json[i]) {
        list.push_back({intents[i], p.at("phrase").get<std::string>(), p.at("weight").get<double>()});
      }
      phrases.push_back(std::move(list));
    }
    for (std::size_t i = 0; i < qa_sets.size() && i < intents.size(); ++i) {
      if (qa_sets[i].intent != intents[i]) throw ParseError("artifact", 0, "QA set order mismatch");
    }
    return Engine(std::move(config), std::move(model),
                  std::make_shared<const WordVectorTable>(std::move(vectors)),
                  std::move(hypernyms), std::move(qa_sets), std::move(phrases));
  } catch (const json::exception& e) {
    throw ParseError("artifact", 0, e.what());
  }
}

void Engine::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize();
}

Engine Engine::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return deserialize(buffer.str());
}

std::size_t Engine::intent_index(std::string_view intent) const {
  const auto& intents = model_.intents();
  for (std::size_t i = 0; i < intents.size(); ++i) {
    if (intents[i] == intent) return i;
  }
  throw NotFoundError("unknown intent: " + std::string(intent));
}

IntentDistribution Engine::predict(std::string_view text) const {
  return disambig::predict(model_, text);
}

AmbiguityVerdict Engine::assess(const IntentDistribution& dist) const {
  return detect_ambiguity(dist, config_.thresholds);
}

Resolution Engine::resolve(std::string_view reply, const ClarifyingQuestion& question) const {
  ResolverOptions options;
  options.minimum_similarity = config_.resolver_minimum_similarity;
  return disambig::resolve(reply, question, *encoder_, none_lexicon_, options);
}

bool Engine::options_resolvable(std::string_view option_j, std::string_view option_k) const {
  ClarifyingQuestion probe{"?", std::string(option_j), std::string(option_k),
                           Provenance::kTemplatePath, std::nullopt};
  return resolve(option_j, probe).outcome == ResolutionOutcome::kIntentJ &&
         resolve(option_k, probe).outcome == ResolutionOutcome::kIntentK;
}

namespace {

std::string humanize(std::string_view intent) {
  std::string out(intent);
  for (char& c : out) {
    if (c == '_' || c == '-') c = ' ';
  }
  return normalize_whitespace(out);
}

}  // namespace

Clarification Engine::clarify(std::string_view query, std::size_t j, std::size_t k,
                              std::optional<double> gate, bool keep_matrix) const {
  if (j == k || j >= intents().size() || k >= intents().size()) {
    throw PreconditionError("clarify: need two distinct intents");
  }
  Clarification out;
  SelectionOptions options;
  options.weights = config_.weights;
  options.gate = gate.value_or(config_.gate);
  options.cross_product_cap = config_.cross_product_cap;
  options.keep_top = 3;
  options.keep_matrix = keep_matrix;
  std::tie(out.set_j, out.set_k) = drop_shared_answers(qa_sets_[j], qa_sets_[k]);
  out.candidates = rank_candidates(query, out.set_j, out.set_k, *encoder_, options);
  for (const auto& selection : out.candidates.ranked) {
    if (!selection.gate_passed) continue;
    auto question = combine(selection, hypernyms_, paraphrase_);
    if (question && options_resolvable(question->option_j, question->option_k)) {
      out.question = std::move(*question);
      out.selection = selection;
      return out;
    }
  }
  const std::size_t template_index = j * intents().size() + k;
  auto accept = [this](std::string_view a, std::string_view b) {
    return options_resolvable(a, b);
  };
  try {
    out.question = template_question(phrases_[j], phrases_[k], config_.templates, template_index,
                                     accept);
  } catch (const PreconditionError&) {
    // Phrase tables exhausted: fall back to the intent names themselves.
    DiscriminativePhrase a{intents()[j], humanize(intents()[j]), 1.0};
    DiscriminativePhrase b{intents()[k], humanize(intents()[k]), 1.0};
    out.question = template_question(a, b, config_.templates, template_index);
  }
  return out;
}

Session Engine::start_session(std::string id) const { return Session{std::move(id), AwaitingQuery{}, {}}; }

std::pair<Session, EngineReply> Engine::handle_message(Session session,
                                                       std::string_view text) const {
  if (session.closed()) throw StateError("session " + session.id + " is closed");
  const std::string message = normalize_whitespace(text);
  if (message.empty()) throw PreconditionError("empty message");

  EngineReply reply;
  if (std::holds_alternative<AwaitingQuery>(session.state)) {
    IntentDistribution dist = predict(message);
    AmbiguityVerdict verdict = assess(dist);
    if (!verdict.ambiguous()) {
      reply.kind = EngineReply::Kind::kFinal;
      reply.intent = intents()[verdict.top];
      reply.confidence = verdict.top_probability;
      session.state = Closed{reply.intent, reply.confidence};
    } else {
      // SelfAmbiguous takes the same top-2 route as PairAmbiguous.
      Clarification c = clarify(message, verdict.top, verdict.second);
      reply.kind = EngineReply::Kind::kClarify;
      reply.question = c.question.text;
      reply.option_j = c.question.option_j;
      reply.option_k = c.question.option_k;
      session.state = AwaitingClarification{verdict.top, verdict.second, std::move(c.question),
                                            message, std::move(dist.probabilities)};
    }
  } else {
    const auto pending = std::get<AwaitingClarification>(session.state);
    Resolution res = resolve(message, pending.question);
    const double pj = pending.original_probabilities[pending.intent_j];
    const double pk = pending.original_probabilities[pending.intent_k];
    if (res.outcome == ResolutionOutcome::kNeither) {
      reply.kind = EngineReply::Kind::kRejected;
      reply.reason = "neither";
      session.state = Closed{std::nullopt, 0.0};
    } else {
      const bool is_j = res.outcome == ResolutionOutcome::kIntentJ;
      reply.kind = EngineReply::Kind::kFinal;
      reply.intent = intents()[is_j ? pending.intent_j : pending.intent_k];
      reply.confidence = (is_j ? pj : pk) / (pj + pk);
      session.state = Closed{reply.intent, reply.confidence};
    }
  }
  session.transcript.push_back({"user", message});
  session.transcript.push_back({"system", reply.display_text()});
  return {std::move(session), std::move(reply)};
}

}  // namespace disambig
