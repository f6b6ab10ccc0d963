#include "disambig/qgen.h"

#include <fstream>
#include <map>

#include "disambig/errors.h"
#include "disambig/syntax.h"
#include "disambig/text.h"

namespace disambig {

using nlohmann::json;

void validate(const QAPair& pair) {
  if (normalize_whitespace(pair.question).empty() || pair.question.back() != '?') {
    throw InvariantError("question must be non-empty and end with '?': \"" + pair.question + "\"");
  }
  if (normalize_whitespace(pair.answer).empty()) throw InvariantError("answer is empty");
  if (pair.intent.empty()) throw InvariantError("pair intent is empty");
}

namespace {

std::string trim_trailing_punct(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?' || s.back() == ',' ||
                        s.back() == ';' || s.back() == ':')) {
    s.pop_back();
  }
  return normalize_whitespace(s);
}

bool is_pronoun_phrase(std::string_view phrase) {
  auto tokens = tokenize(phrase);
  return tokens.size() == 1 && is_function_word(tokens[0]);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> RuleBasedGenerator::generate(
    std::string_view utterance) const {
  std::vector<std::pair<std::string, std::string>> out;
  auto clause = shallow_parse(utterance);
  if (!clause) return out;
  const std::string verb = clause->main_verb;
  if (verb == "be" || verb == "have" || verb == "do") return out;

  std::string object = trim_trailing_punct(clause->object_phrase);
  if (clause->object_from_wh || is_pronoun_phrase(object)) object.clear();
  const std::string vp = trim_trailing_punct(clause->verb_phrase);
  auto tokens = tokenize(utterance);
  const bool third_person_subject =
      clause->subject_person == Person::kThird && !tokens.empty() && is_determiner(tokens[0]);

  if (third_person_subject) {
    // (b) "my laptop needs a new battery" -> "What does your laptop need?"
    auto subject_end = utterance.find(clause->verb_surface);
    std::string subject = subject_end == std::string_view::npos
                              ? std::string()
                              : normalize_whitespace(utterance.substr(0, subject_end));
    if (!subject.empty() && !object.empty()) {
      std::string flipped = to_lower(flip_person(subject));
      out.emplace_back("What does " + flipped + " " + verb + "?", object);
    }
  } else if (clause->subject_person == Person::kFirst && (verb == "need" || verb == "want")) {
    // (b) "I need a new laptop": the desire verb is the main verb.
    if (!object.empty()) out.emplace_back("What do you " + verb + "?", object);
  } else {
    // (a) desire, request or imperative.
    if (!object.empty()) out.emplace_back("What do you want to " + verb + "?", object);
    out.emplace_back("What do you want to do?", vp);
    // (c) trailing prepositional phrase.
    std::string pp_object = trim_trailing_punct(clause->prepositional_object);
    if (!clause->preposition.empty() && !pp_object.empty()) {
      std::string q = "What do you want to " + verb;
      if (!object.empty()) q += " " + object;
      out.emplace_back(q + " " + clause->preposition + "?", pp_object);
    }
  }
  if (out.size() > cap_) out.resize(cap_);
  return out;
}

std::vector<std::string> utterances_of(const Corpus& corpus, std::string_view intent) {
  corpus.require_intent(intent);
  std::vector<std::string> out;
  for (const auto& u : corpus.utterances()) {
    if (u.intent == intent) out.push_back(u.text);
  }
  return out;
}

std::pair<std::vector<std::string>, std::vector<std::string>> build_utterance_sets(
    const Corpus& corpus, std::string_view j, std::string_view k) {
  if (j == k) throw PreconditionError("build_utterance_sets: j and k must differ");
  return {utterances_of(corpus, j), utterances_of(corpus, k)};
}

GenerationResult generate_pairs(const std::vector<std::string>& utterances,
                                std::string_view intent, const QuestionGenerator& generator) {
  GenerationResult result;
  result.set.intent = std::string(intent);
  for (const auto& text : utterances) {
    std::vector<std::pair<std::string, std::string>> pairs;
    try {
      pairs = generator.generate(text);
    } catch (const std::exception& e) {
      result.warnings.push_back("question generation failed for \"" + text + "\": " + e.what());
      continue;
    }
    std::size_t kept = 0;
    for (auto& [q, a] : pairs) {
      QAPair pair{normalize_whitespace(q), normalize_whitespace(a), text, std::string(intent)};
      try {
        validate(pair);
      } catch (const InvariantError& e) {
        result.warnings.push_back("dropped pair for \"" + text + "\": " + e.what());
        continue;
      }
      result.set.pairs.push_back(std::move(pair));
      ++kept;
    }
    if (kept == 0 && pairs.empty()) {
      result.warnings.push_back("no question-answer pairs for \"" + text + "\"");
    }
  }
  return result;
}

json to_json(const QAPairSet& set) {
  json pairs = json::array();
  for (const auto& p : set.pairs) {
    pairs.push_back({{"question", p.question},
                     {"answer", p.answer},
                     {"source_text", p.source_text},
                     {"intent", p.intent}});
  }
  return json{{"intent", set.intent}, {"pairs", std::move(pairs)}};
}

QAPairSet qa_set_from_json(const json& j) {
  QAPairSet set;
  set.intent = j.at("intent").get<std::string>();
  for (const auto& p : j.at("pairs")) {
    QAPair pair{p.at("question").get<std::string>(), p.at("answer").get<std::string>(),
                p.at("source_text").get<std::string>(), p.at("intent").get<std::string>()};
    validate(pair);
    if (pair.intent != set.intent) throw InvariantError("pair intent differs from its set");
    set.pairs.push_back(std::move(pair));
  }
  return set;
}

std::vector<QAPairSet> load_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  const std::string source = path.string();
  if (!in) throw ParseError(source, 0, "cannot open file");
  std::vector<QAPairSet> sets;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (normalize_whitespace(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    QAPair pair;
    try {
      pair = QAPair{normalize_whitespace(record.at("question").get<std::string>()),
                    normalize_whitespace(record.at("answer").get<std::string>()),
                    normalize_whitespace(record.at("source_text").get<std::string>()),
                    normalize_whitespace(record.at("intent").get<std::string>())};
      validate(pair);
    } catch (const json::exception& e) {
      throw ParseError(source, line_no, std::string("bad record: ") + e.what());
    } catch (const InvariantError& e) {
      throw ParseError(source, line_no, e.what());
    }
    auto [it, inserted] = index.emplace(pair.intent, sets.size());
    if (inserted) sets.push_back(QAPairSet{pair.intent, {}});
    sets[it->second].pairs.push_back(std::move(pair));
  }
  return sets;
}

void save_pairs(const std::vector<QAPairSet>& sets, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& set : sets) {
    for (const auto& p : set.pairs) {
      out << json{{"question", p.question},
                  {"answer", p.answer},
                  {"source_text", p.source_text},
                  {"intent", p.intent}}
                 .dump()
          << '\n';
    }
  }
}

}  // namespace disambig
