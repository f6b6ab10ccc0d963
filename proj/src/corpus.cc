#include "disambig/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "disambig/errors.h"
#include "disambig/text.h"
#include "json.hpp"

namespace disambig {

using nlohmann::json;

Corpus::Corpus(std::vector<LabeledUtterance> utterances) : utterances_(std::move(utterances)) {
  for (const auto& u : utterances_) {
    if (index_.find(u.intent) == index_.end()) {
      index_.emplace(u.intent, intents_.size());
      intents_.push_back(u.intent);
    }
  }
  validate();
}

Corpus::Corpus(std::vector<LabeledUtterance> utterances, std::vector<std::string> intents)
    : utterances_(std::move(utterances)), intents_(std::move(intents)) {
  for (std::size_t i = 0; i < intents_.size(); ++i) {
    if (!index_.emplace(intents_[i], i).second) {
      throw InvariantError("duplicate intent in inventory: " + intents_[i]);
    }
  }
  validate();
}

void Corpus::validate() {
  if (utterances_.empty()) throw InvariantError("corpus is empty");
  if (intents_.size() < 2) {
    throw InvariantError("corpus needs at least 2 intents, found " + std::to_string(intents_.size()));
  }
  for (auto& u : utterances_) {
    u.text = normalize_whitespace(u.text);
    if (u.text.empty()) throw InvariantError("utterance text is empty");
    if (u.intent.empty()) throw InvariantError("utterance intent is empty");
    if (index_.find(u.intent) == index_.end()) {
      throw InvariantError("utterance labeled with unknown intent: " + u.intent);
    }
  }
}

std::optional<std::size_t> Corpus::intent_index(std::string_view intent) const {
  auto it = index_.find(intent);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::require_intent(std::string_view intent) const {
  auto idx = intent_index(intent);
  if (!idx) throw NotFoundError("unknown intent: " + std::string(intent));
  return *idx;
}

namespace {

std::pair<std::string, std::string> ordered_key(std::string_view a, std::string_view b) {
  std::string x = to_lower(a);
  std::string y = to_lower(b);
  if (y < x) std::swap(x, y);
  return {std::move(x), std::move(y)};
}

}  // namespace

void HypernymLexicon::add(std::string_view a, std::string_view b, std::string_view hypernym) {
  entries_[ordered_key(a, b)] = to_lower(hypernym);
}

std::optional<std::string> HypernymLexicon::lookup(std::string_view a, std::string_view b) const {
  auto it = entries_.find(ordered_key(a, b));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string required_string(const json& record, const char* key, const std::string& source,
                            std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw ParseError(source, line, std::string("missing string field \"") + key + "\"");
  }
  std::string value = normalize_whitespace(it->get<std::string>());
  if (value.empty()) throw ParseError(source, line, std::string("empty field \"") + key + "\"");
  return value;
}

template <typename Fn>
void for_each_json_line(std::istream& in, const std::string& source, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(source, line_no, "record is not a JSON object");
    fn(record, line_no);
  }
}

}  // namespace

Corpus parse_corpus(std::istream& in, const std::string& source_name) {
  std::vector<LabeledUtterance> utterances;
  for_each_json_line(in, source_name, [&](const json& record, std::size_t line) {
    if (record.contains("intent_b")) {
      throw ParseError(source_name, line, "ambiguous record (intent_b) in a corpus file");
    }
    utterances.push_back({required_string(record, "text", source_name, line),
                          required_string(record, "intent", source_name, line)});
  });
  if (utterances.empty()) throw ParseError(source_name, 0, "empty corpus");
  try {
    return Corpus(std::move(utterances));
  } catch (const InvariantError& e) {
    throw InvariantError(source_name + ": " + e.what());
  }
}

Corpus load_corpus(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_corpus(in, path.string());
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& u : corpus.utterances()) {
    out << json{{"text", u.text}, {"intent", u.intent}}.dump() << '\n';
  }
}

std::vector<AmbiguousExample> load_ambiguous(const std::filesystem::path& path,
                                             const Corpus& corpus) {
  auto in = open_input(path);
  const std::string source = path.string();
  std::vector<AmbiguousExample> examples;
  for_each_json_line(in, source, [&](const json& record, std::size_t line) {
    AmbiguousExample ex{required_string(record, "text", source, line),
                        required_string(record, "intent", source, line),
                        required_string(record, "intent_b", source, line)};
    if (ex.intent_a == ex.intent_b) throw ParseError(source, line, "intent and intent_b are equal");
    if (!corpus.intent_index(ex.intent_a) || !corpus.intent_index(ex.intent_b)) {
      throw ParseError(source, line, "intent not in corpus inventory");
    }
    examples.push_back(std::move(ex));
  });
  return examples;
}

void save_ambiguous(const std::vector<AmbiguousExample>& examples,
                    const std::filesystem::path& path) {
  auto out = open_output(path);
  for (const auto& ex : examples) {
    out << json{{"text", ex.text}, {"intent", ex.intent_a}, {"intent_b", ex.intent_b}}.dump()
        << '\n';
  }
}

HypernymLexicon parse_hypernyms(std::istream& in, const std::string& source_name) {
  HypernymLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line) || line.front() == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(normalize_whitespace(col));
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty() || cols[2].empty()) {
      throw ParseError(source_name, line_no, "expected 3 tab-separated columns");
    }
    lexicon.add(cols[0], cols[1], cols[2]);
  }
  return lexicon;
}

HypernymLexicon load_hypernyms(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_hypernyms(in, path.string());
}

void save_hypernyms(const HypernymLexicon& lexicon, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "# word_a\tword_b\thypernym\n";
  for (const auto& [key, hyper] : lexicon.entries()) {
    out << key.first << '\t' << key.second << '\t' << hyper << '\n';
  }
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, double holdout_fraction, std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw PreconditionError("holdout_fraction must lie in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> by_intent(corpus.num_intents());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    by_intent[*corpus.intent_index(corpus.utterances()[i].intent)].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<bool> held(corpus.size(), false);
  for (std::size_t c = 0; c < by_intent.size(); ++c) {
    auto& idx = by_intent[c];
    if (idx.size() < 2) {
      throw PreconditionError("cannot stratify: intent " + corpus.intents()[c] + " has " +
                              std::to_string(idx.size()) + " utterance(s), need >= 2");
    }
    // Fisher-Yates with raw engine output: std::shuffle and the standard
    // distributions are not reproducible across library implementations.
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      std::swap(idx[i], idx[rng() % (i + 1)]);
    }
    auto n = static_cast<double>(idx.size());
    auto count = static_cast<std::size_t>(std::llround(n * holdout_fraction));
    count = std::clamp<std::size_t>(count, 1, idx.size() - 1);
    for (std::size_t i = 0; i < count; ++i) held[idx[i]] = true;
  }
  std::vector<LabeledUtterance> train, heldout;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (held[i] ? heldout : train).push_back(corpus.utterances()[i]);
  }
  return {Corpus(std::move(train), corpus.intents()), Corpus(std::move(heldout), corpus.intents())};
}

}  // namespace disambig
