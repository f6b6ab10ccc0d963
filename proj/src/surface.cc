#include "disambig/surface.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "disambig/errors.h"
#include "disambig/text.h"

namespace disambig {

std::string_view rule_id(CombineRule rule) {
  switch (rule) {
    case CombineRule::kPersonFlip:
      return "R1";
    case CombineRule::kSharedObjectModifiers:
      return "R2";
    case CombineRule::kSharedVerb:
      return "R3";
    case CombineRule::kVerbHypernym:
      return "R4";
    case CombineRule::kGenericDo:
      return "R5";
  }
  return "?";
}

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::kQgPath ? "qg" : "template";
}

namespace {

std::string canonical(std::string_view text) { return join(tokenize(text), " "); }

std::string strip_question_mark(std::string_view text) {
  std::string s = normalize_whitespace(text);
  while (!s.empty() && (s.back() == '?' || s.back() == '.' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string strip_trailing_punct(std::string s) {
  while (!s.empty() && (s.back() == '.' || s.back() == '!' || s.back() == '?' || s.back() == ',')) {
    s.pop_back();
  }
  return normalize_whitespace(s);
}

std::string with_article(const std::string& phrase) {
  return (starts_with_vowel_sound(phrase) ? "an " : "a ") + phrase;
}

// The selected pair read as one answered clause.
struct AnsweredClause {
  bool parsed = false;
  std::string verb;  // lemma
  std::string object_head;
  std::vector<std::string> modifiers;
  std::string vp_option;  // verb + object, as an option
  std::string np_option;  // the answer, as an option
};

AnsweredClause analyze(const std::string& question, const std::string& raw_answer) {
  AnsweredClause out;
  const std::string answer = strip_trailing_punct(flip_person(raw_answer));
  out.np_option = answer;
  out.vp_option = answer;
  auto pq = shallow_parse(question);
  if (pq && pq->main_verb != "do") {
    out.parsed = true;
    out.verb = pq->main_verb;
    // A stranded preposition keeps its verb phrase: "increase the memory of" + answer.
    const auto vp_tokens = tokenize(pq->verb_phrase);
    const bool stranded = !pq->object_from_wh && pq->has_object() && pq->preposition.empty() &&
                          !vp_tokens.empty() && is_preposition(vp_tokens.back());
    out.vp_option = (stranded ? to_lower(pq->verb_phrase) : to_lower(pq->verb_surface)) + " " + answer;
    if (pq->has_object() && !pq->object_from_wh) {
      out.object_head = pq->direct_object;
      out.modifiers = pq->object_modifiers;
    } else if (pq->object_from_wh) {
      // "What type of account ...?" answered by "savings" or "a savings account".
      out.object_head = pq->direct_object;
      auto np = parse_noun_phrase(answer);
      if (np && np->head == pq->direct_object) {
        out.modifiers = np->modifiers;
      } else if (np) {
        out.modifiers = np->modifiers;
        out.modifiers.push_back(np->head);
      }
    } else if (auto np = parse_noun_phrase(answer)) {
      out.object_head = np->head;
      out.modifiers = np->modifiers;
    }
    return out;
  }
  // Pro-verb question ("What do you want to do?"): the answer carries the verb.
  if (auto pa = shallow_parse(answer)) {
    out.parsed = true;
    out.verb = pa->main_verb;
    out.object_head = pa->direct_object;
    out.modifiers = pa->object_modifiers;
    if (!pa->object_phrase.empty()) out.np_option = strip_trailing_punct(pa->object_phrase);
    return out;
  }
  if (pq) {
    out.parsed = true;
    out.verb = pq->main_verb;
    if (auto np = parse_noun_phrase(answer)) {
      out.object_head = np->head;
      out.modifiers = np->modifiers;
    }
  }
  return out;
}

std::optional<ClarifyingQuestion> finish(std::string text, std::string option_j,
                                         std::string option_k, CombineRule rule,
                                         const ParaphraseHook& paraphrase) {
  option_j = normalize_whitespace(option_j);
  option_k = normalize_whitespace(option_k);
  if (option_j.empty() || option_k.empty() || canonical(option_j) == canonical(option_k)) {
    return std::nullopt;
  }
  text = normalize_whitespace(paraphrase ? paraphrase(text) : text);
  if (text.empty()) return std::nullopt;
  if (text.back() != '?') text = strip_question_mark(text) + "?";
  return ClarifyingQuestion{std::move(text), std::move(option_j), std::move(option_k),
                            Provenance::kQgPath, rule};
}

}  // namespace

void validate(const ClarifyingQuestion& q) {
  if (q.text.empty() || q.text.back() != '?') throw InvariantError("question must end with '?'");
  if (q.option_j.empty() || q.option_k.empty()) throw InvariantError("empty answer option");
  if (canonical(q.option_j) == canonical(q.option_k)) {
    throw InvariantError("answer options coincide: " + q.option_j);
  }
  if ((q.provenance == Provenance::kQgPath) != q.applied_rule.has_value()) {
    throw InvariantError("applied_rule must be set exactly for QG-path questions");
  }
}

std::string identity_paraphrase(std::string_view text) { return std::string(text); }

ParaphraseHook make_paraphrase_hook(std::string_view id) {
  if (id == "identity" || id.empty()) return identity_paraphrase;
  throw NotFoundError("unknown paraphrase hook: " + std::string(id));
}

std::optional<ClarifyingQuestion> combine(const DiscriminativeSelection& selection,
                                          const HypernymLexicon& hypernyms,
                                          const ParaphraseHook& paraphrase) {
  std::string qj = selection.pair_j.question;
  std::string qk = selection.pair_k.question;
  const bool user_voice = has_first_person(qj) || has_first_person(qk);
  if (user_voice) {
    qj = flip_person(qj);
    qk = flip_person(qk);
  }
  const std::string answer_j = strip_trailing_punct(flip_person(selection.pair_j.answer));
  const std::string answer_k = strip_trailing_punct(flip_person(selection.pair_k.answer));

  // R1: one question asked in the user's voice, identical once flipped.
  if (user_voice && canonical(qj) == canonical(qk)) {
    return finish(strip_question_mark(qj) + ": " + answer_j + " or " + answer_k + "?", answer_j,
                  answer_k, CombineRule::kPersonFlip, paraphrase);
  }

  const AnsweredClause cj = analyze(qj, selection.pair_j.answer);
  const AnsweredClause ck = analyze(qk, selection.pair_k.answer);
  if (!cj.parsed && !ck.parsed) return std::nullopt;

  if (cj.parsed && ck.parsed && cj.verb == ck.verb) {
    // R2: same verb, same object head, different modifiers.
    if (!cj.object_head.empty() && cj.object_head == ck.object_head && !cj.modifiers.empty() &&
        !ck.modifiers.empty() && cj.modifiers != ck.modifiers) {
      const std::string mj = join(cj.modifiers, " ");
      const std::string mk = join(ck.modifiers, " ");
      if (auto hyper = hypernyms.lookup(mj, mk)) {
        return finish("What " + *hyper + " of " + cj.object_head + " do you want to " + cj.verb +
                          "?",
                      mj, mk, CombineRule::kSharedObjectModifiers, paraphrase);
      }
      return finish("Do you want to " + cj.verb + " " + with_article(mj) + " or " +
                        with_article(mk) + " " + cj.object_head + "?",
                    mj, mk, CombineRule::kSharedObjectModifiers, paraphrase);
    }
    // R3: shared verb, the two answers become the options.
    if (cj.verb == "be") {
      return finish(strip_question_mark(qj) + ": " + cj.np_option + " or " + ck.np_option + "?",
                    cj.np_option, ck.np_option, CombineRule::kSharedVerb, paraphrase);
    }
    return finish("Do you want to " + cj.verb + ": " + cj.np_option + " or " + ck.np_option + "?",
                  cj.np_option, ck.np_option, CombineRule::kSharedVerb, paraphrase);
  }

  // R4: different verbs sharing a hypernym.
  if (cj.parsed && ck.parsed) {
    if (auto hyper = hypernyms.lookup(cj.verb, ck.verb)) {
      bool np_distinct = canonical(cj.np_option) != canonical(ck.np_option);
      const std::string& a = np_distinct ? cj.np_option : cj.vp_option;
      const std::string& b = np_distinct ? ck.np_option : ck.vp_option;
      return finish("Do you want to " + *hyper + ": " + a + " or " + b + "?", a, b,
                    CombineRule::kVerbHypernym, paraphrase);
    }
  }
  // R5: generic "do" with both verb phrases.
  return finish("What would you like to do: " + cj.vp_option + " or " + ck.vp_option + "?",
                cj.vp_option, ck.vp_option, CombineRule::kGenericDo, paraphrase);
}

// ---------------------------------------------------------------------------
// Discriminative phrases

namespace {

struct PhraseStats {
  double tf = 0.0;
  std::size_t n = 0;
  std::size_t first_seen = 0;
};

}  // namespace

std::map<std::string, std::vector<DiscriminativePhrase>> phrase_table(const Corpus& corpus,
                                                                      std::size_t top_n) {
  const std::size_t m = corpus.num_intents();
  std::vector<std::unordered_map<std::string, PhraseStats>> per_intent(m);
  std::vector<std::size_t> seen_counter(m, 0);
  for (const auto& u : corpus.utterances()) {
    const std::size_t c = *corpus.intent_index(u.intent);
    const auto tokens = tokenize(u.text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      for (std::size_t n = 1; n <= 3 && i + n <= tokens.size(); ++n) {
        if (is_function_word(tokens[i]) || is_function_word(tokens[i + n - 1])) continue;
        std::string gram = tokens[i];
        for (std::size_t t = 1; t < n; ++t) gram += " " + tokens[i + t];
        auto [it, inserted] = per_intent[c].try_emplace(gram);
        if (inserted) {
          it->second.n = n;
          it->second.first_seen = seen_counter[c]++;
        }
        it->second.tf += 1.0;
      }
    }
  }
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& stats : per_intent) {
    for (const auto& [gram, _] : stats) ++df[gram];
  }
  std::map<std::string, std::vector<DiscriminativePhrase>> table;
  const double n_docs = static_cast<double>(m);
  for (std::size_t c = 0; c < m; ++c) {
    struct Candidate {
      const std::string* gram;
      const PhraseStats* stats;
      double weight;
    };
    std::vector<Candidate> candidates;
    for (const auto& [gram, stats] : per_intent[c]) {
      const std::size_t d = df[gram];
      if (d == m) continue;
      const double idf = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(d))) + 1.0;
      candidates.push_back({&gram, &stats, stats.tf * idf});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.weight != b.weight) return a.weight > b.weight;
      if (a.stats->n != b.stats->n) return a.stats->n < b.stats->n;
      return a.stats->first_seen < b.stats->first_seen;
    });
    auto& out = table[corpus.intents()[c]];
    for (std::size_t i = 0; i < candidates.size() && i < top_n; ++i) {
      out.push_back({corpus.intents()[c], *candidates[i].gram, candidates[i].weight});
    }
  }
  return table;
}

std::vector<DiscriminativePhrase> discriminative_phrases(const Corpus& corpus,
                                                         std::string_view intent,
                                                         std::size_t top_n) {
  corpus.require_intent(intent);
  auto table = phrase_table(corpus, top_n);
  return std::move(table[std::string(intent)]);
}

// ---------------------------------------------------------------------------
// Templates

namespace {

std::string fill_template(const std::string& tmpl, std::string_view a, std::string_view b) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl.compare(i, 3, "{A}") == 0) {
      out += a;
      i += 3;
    } else if (tmpl.compare(i, 3, "{B}") == 0) {
      out += b;
      i += 3;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

}  // namespace

ClarifyingQuestion template_question(const DiscriminativePhrase& dp_j,
                                     const DiscriminativePhrase& dp_k,
                                     const std::vector<std::string>& templates,
                                     std::size_t template_index) {
  if (dp_j.intent == dp_k.intent) throw PreconditionError("template_question: same intent");
  if (templates.empty()) throw PreconditionError("template_question: no templates");
  if (canonical(dp_j.phrase) == canonical(dp_k.phrase)) {
    throw PreconditionError("template_question: identical phrases");
  }
  ClarifyingQuestion q;
  q.text = fill_template(templates[template_index % templates.size()], dp_j.phrase, dp_k.phrase);
  q.option_j = dp_j.phrase;
  q.option_k = dp_k.phrase;
  q.provenance = Provenance::kTemplatePath;
  return q;
}

ClarifyingQuestion template_question(const std::vector<DiscriminativePhrase>& ranked_j,
                                     const std::vector<DiscriminativePhrase>& ranked_k,
                                     const std::vector<std::string>& templates,
                                     std::size_t template_index, const OptionCheck& accept) {
  for (std::size_t a = 0; a < ranked_j.size(); ++a) {
    for (std::size_t b = 0; b < ranked_k.size(); ++b) {
      const auto& pj = ranked_j[a];
      const auto& pk = ranked_k[b];
      if (canonical(pj.phrase) == canonical(pk.phrase)) continue;
      if (accept && !accept(pj.phrase, pk.phrase)) continue;
      return template_question(pj, pk, templates, template_index);
    }
  }
  throw PreconditionError("template_question: discriminative phrases exhausted");
}

}  // namespace disambig
