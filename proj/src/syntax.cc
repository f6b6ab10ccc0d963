#include "disambig/syntax.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <unordered_map>

#include "disambig/text.h"

namespace disambig {
namespace {

using WordSet = std::set<std::string, std::less<>>;

const WordSet kDeterminers = {"a",    "an",   "the",   "this",  "that",    "these", "those",
                              "some", "any",  "my",    "your",  "our",     "his",   "her",
                              "their", "its", "every", "each",  "another", "all"};

const WordSet kPrepositions = {"to",      "for",    "in",     "inside", "on",      "at",
                               "with",    "from",   "of",     "into",   "onto",    "about",
                               "by",      "under",  "over",   "within", "without", "between",
                               "through", "via",    "across", "after",  "before",  "during",
                               "near",    "outside", "per",   "until",  "since",   "than"};

const WordSet kConjunctions = {"and", "or", "but", "so", "because", "if", "then", "while"};

const WordSet kSubjectPronouns = {"i", "you", "we", "he", "she", "they"};

const WordSet kObjectPronouns = {"me", "us", "him", "them", "it", "you", "her"};

const WordSet kOtherPronouns = {"mine", "yours", "ours", "theirs", "myself", "yourself",
                                "itself", "something", "anything", "everything", "nothing",
                                "someone", "anyone", "there", "here", "one"};

const WordSet kAuxiliaries = {"do",   "does",  "did",   "can",  "could", "will", "would",
                              "shall", "should", "may", "might", "must", "am",   "is",
                              "are",  "was",   "were",  "be",   "been",  "being", "have",
                              "has",  "had",   "not"};

const WordSet kSkippableAdverbs = {"just",     "really", "also",    "please", "kindly",
                                   "quickly",  "still",  "now",     "actually", "maybe",
                                   "somehow",  "again",  "simply",  "currently", "urgently",
                                   "finally",  "even",   "already", "never",  "ever"};

const WordSet kControlVerbs = {"want",  "wants", "wanted", "need",  "needs",  "needed",
                               "like",  "wish",  "try",    "tries", "trying", "hope",
                               "plan",  "going", "able",   "have",  "has",    "love"};

const WordSet kHelpVerbs = {"help", "helps", "assist"};

const WordSet kWhWords = {"what", "which", "how", "why", "when", "where", "who", "whom", "whose"};

const WordSet kInterjections = {"hello", "hi",  "hey",  "thanks", "thank", "ok",    "okay",
                                "yes",   "no",  "bye",  "goodbye", "yeah", "sure",  "hmm",
                                "sorry", "yep", "nope", "cheers", "please"};

const WordSet kParticles = {"up", "out", "off", "down"};

const WordSet kVerbs = {
    "access",   "activate", "add",      "apply",    "approve",  "archive",  "ask",
    "assign",   "attach",   "back",     "backup",   "block",    "book",     "break",
    "buy",      "call",     "cancel",   "change",   "check",    "claim",    "clean",
    "clear",    "close",    "configure", "confirm", "connect",  "contact",  "copy",
    "create",   "deactivate", "delete", "deposit",  "disable",  "disconnect", "dispute",
    "do",       "download", "edit",     "email",    "enable",   "exchange", "extend",
    "file",     "find",     "fix",      "forget",   "forward",  "freeze",   "get",
    "give",     "grant",    "help",     "hire",     "increase", "install",  "join",
    "keep",     "know",     "launch",   "learn",    "leave",    "load",     "lock",
    "log",      "login",    "lose",     "make",     "manage",   "migrate",  "modify",
    "move",     "need",     "open",     "order",    "pay",      "print",    "raise",
    "receive",  "recover",  "redirect", "register", "reinstall", "relocate", "remove",
    "rename",   "renew",    "rent",     "repair",   "replace",  "report",   "request",
    "reserve",  "reset",    "restart",  "restore",  "return",   "revoke",   "run",
    "save",     "scan",     "schedule", "see",      "send",     "set",      "setup",
    "share",    "show",     "shut",     "sign",     "start",    "stop",     "submit",
    "switch",   "sync",     "take",     "talk",     "tell",     "track",    "transfer",
    "turn",     "unblock",  "unfreeze", "uninstall", "unlock",  "update",   "upgrade",
    "upload",   "use",      "verify",   "view",     "want",     "withdraw", "be",
    "have",     "go",       "boot",     "mount",    "print",    "replace",  "refill",
    "recharge", "top",      "close",    "fill",     "reboot",   "pair",     "route"};

const std::unordered_map<std::string, std::string> kIrregularVerbs = {
    {"forgot", "forget"}, {"forgotten", "forget"}, {"lost", "lose"},   {"got", "get"},
    {"gotten", "get"},    {"made", "make"},       {"sent", "send"},   {"bought", "buy"},
    {"broke", "break"},   {"broken", "break"},    {"ran", "run"},     {"went", "go"},
    {"gone", "go"},       {"did", "do"},          {"does", "do"},     {"done", "do"},
    {"has", "have"},      {"had", "have"},        {"is", "be"},       {"are", "be"},
    {"am", "be"},         {"was", "be"},          {"were", "be"},     {"been", "be"},
    {"left", "leave"},    {"took", "take"},       {"taken", "take"},  {"gave", "give"},
    {"given", "give"},    {"paid", "pay"},        {"kept", "keep"},   {"saw", "see"},
    {"seen", "see"},      {"found", "find"},      {"told", "tell"},   {"shown", "show"}};

const std::unordered_map<std::string, std::vector<std::string>> kContractions = {
    {"i'd", {"i", "would"}},       {"i'm", {"i", "am"}},         {"i've", {"i", "have"}},
    {"i'll", {"i", "will"}},       {"don't", {"do", "not"}},     {"doesn't", {"does", "not"}},
    {"didn't", {"did", "not"}},    {"can't", {"can", "not"}},    {"cannot", {"can", "not"}},
    {"won't", {"will", "not"}},    {"it's", {"it", "is"}},       {"what's", {"what", "is"}},
    {"you're", {"you", "are"}},    {"let's", {"let", "us"}},     {"isn't", {"is", "not"}},
    {"we're", {"we", "are"}},      {"we'd", {"we", "would"}},    {"couldn't", {"could", "not"}}};

bool contains(const WordSet& set, std::string_view word) { return set.find(word) != set.end(); }

struct Word {
  std::string surface;
  std::string lower;
};

bool is_edge_punct(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 0x80 && !std::isalnum(u) && c != '\'' && c != '-';
}

// Whitespace words with edge punctuation stripped and contractions expanded.
// `boundaries` receives indices of words followed by clause punctuation.
std::vector<Word> split_words(std::string_view text, std::vector<bool>* clause_end = nullptr) {
  std::vector<Word> out;
  std::vector<bool> ends;
  std::string chunk;
  auto flush = [&] {
    if (chunk.empty()) return;
    std::size_t b = 0, e = chunk.size();
    while (b < e && (is_edge_punct(chunk[b]) || chunk[b] == '\'')) ++b;
    bool ends_clause = false;
    while (e > b && (is_edge_punct(chunk[e - 1]) || chunk[e - 1] == '\'')) {
      char c = chunk[e - 1];
      if (c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?') ends_clause = true;
      --e;
    }
    std::string core = chunk.substr(b, e - b);
    chunk.clear();
    if (core.empty()) {
      if (ends_clause && !ends.empty()) ends.back() = true;
      return;
    }
    std::string lower = to_lower(core);
    auto it = kContractions.find(lower);
    if (it != kContractions.end()) {
      for (const auto& part : it->second) {
        out.push_back({part == "i" ? "I" : part, part});
        ends.push_back(false);
      }
    } else {
      out.push_back({core, lower});
      ends.push_back(false);
    }
    if (ends_clause) ends.back() = true;
  };
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      chunk.push_back(c);
    }
  }
  flush();
  if (clause_end) *clause_end = std::move(ends);
  return out;
}

std::string join_surface(const std::vector<Word>& words, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end && i < words.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out += words[i].surface;
  }
  return out;
}

bool is_pronoun(std::string_view w) {
  return contains(kSubjectPronouns, w) || contains(kObjectPronouns, w) ||
         contains(kOtherPronouns, w);
}

bool is_np_boundary(std::string_view w) {
  return contains(kPrepositions, w) || contains(kConjunctions, w) || contains(kWhWords, w) ||
         contains(kAuxiliaries, w) || contains(kInterjections, w) || w == "asap";
}

}  // namespace

bool is_determiner(std::string_view word) { return contains(kDeterminers, word); }
bool is_preposition(std::string_view word) { return contains(kPrepositions, word); }

bool is_function_word(std::string_view w) {
  return contains(kDeterminers, w) || contains(kPrepositions, w) || contains(kConjunctions, w) ||
         is_pronoun(w) || contains(kAuxiliaries, w) || contains(kSkippableAdverbs, w) ||
         contains(kWhWords, w) || contains(kInterjections, w);
}

std::string verb_lemma(std::string_view word) {
  std::string w = to_lower(word);
  if (contains(kVerbs, w)) return w;
  if (auto it = kIrregularVerbs.find(w); it != kIrregularVerbs.end()) return it->second;
  auto try_form = [](const std::string& candidate) { return contains(kVerbs, candidate); };
  auto ends_with = [&](std::string_view suffix) {
    return w.size() > suffix.size() + 1 && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  std::vector<std::string> candidates;
  if (ends_with("ies")) candidates.push_back(w.substr(0, w.size() - 3) + "y");
  if (ends_with("es")) candidates.push_back(w.substr(0, w.size() - 2));
  if (ends_with("s")) candidates.push_back(w.substr(0, w.size() - 1));
  if (ends_with("ied")) candidates.push_back(w.substr(0, w.size() - 3) + "y");
  if (ends_with("ed")) {
    std::string stem = w.substr(0, w.size() - 2);
    candidates.push_back(stem);
    candidates.push_back(stem + "e");
    if (stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) {
      candidates.push_back(stem.substr(0, stem.size() - 1));
    }
  }
  if (ends_with("ing")) {
    std::string stem = w.substr(0, w.size() - 3);
    candidates.push_back(stem);
    candidates.push_back(stem + "e");
    if (stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) {
      candidates.push_back(stem.substr(0, stem.size() - 1));
    }
  }
  for (const auto& c : candidates) {
    if (try_form(c)) return c;
  }
  return w;
}

bool is_known_verb(std::string_view word) { return contains(kVerbs, verb_lemma(word)); }

std::optional<NounPhrase> parse_noun_phrase(std::string_view text) {
  auto words = split_words(text);
  std::size_t b = 0;
  while (b < words.size() && is_determiner(words[b].lower)) ++b;
  std::size_t e = b;
  while (e < words.size() && !is_np_boundary(words[e].lower)) ++e;
  if (e == b) return std::nullopt;
  NounPhrase np;
  np.head = words[e - 1].lower;
  for (std::size_t i = b; i + 1 < e; ++i) np.modifiers.push_back(words[i].lower);
  np.text = join_surface(words, b, e);
  return np;
}

std::optional<ParsedClause> shallow_parse(std::string_view text) {
  std::vector<bool> clause_end;
  auto words = split_words(text, &clause_end);
  const std::size_t n = words.size();
  if (n == 0) return std::nullopt;
  auto lower = [&](std::size_t i) -> std::string_view {
    return i < n ? std::string_view(words[i].lower) : std::string_view();
  };

  std::size_t pos = 0;
  std::optional<NounPhrase> wh_np;
  std::string wh_text;
  if (lower(0) == "what" || lower(0) == "which") {
    std::size_t p = 1;
    if ((lower(p) == "type" || lower(p) == "kind" || lower(p) == "sort") && lower(p + 1) == "of") {
      p += 2;
    }
    std::size_t start = p;
    while (p < n && !contains(kAuxiliaries, lower(p)) && !contains(kSubjectPronouns, lower(p)) &&
           !is_preposition(lower(p))) {
      ++p;
    }
    if (p > start && p < n) {
      wh_text = join_surface(words, start, p);
      wh_np = parse_noun_phrase(wh_text);
    }
    pos = wh_np ? p : 1;
  } else if (contains(kWhWords, lower(0))) {
    pos = 1;
  }

  // Subject pronoun, allowing leading auxiliaries and adverbs ("can you ...").
  std::optional<std::size_t> subject;
  for (std::size_t i = pos; i < n; ++i) {
    if (contains(kSubjectPronouns, lower(i))) {
      subject = i;
      break;
    }
    if (!contains(kAuxiliaries, lower(i)) && !contains(kSkippableAdverbs, lower(i))) break;
  }

  std::size_t p = subject ? *subject + 1 : pos;
  bool np_subject = false;
  if (!subject && p < n && is_determiner(lower(p))) {
    // Noun-phrase subject: "my laptop needs a battery".
    std::size_t q = p;
    while (q < n && is_determiner(lower(q))) ++q;
    while (q < n && !is_known_verb(lower(q)) && !is_np_boundary(lower(q))) ++q;
    if (q < n && is_known_verb(lower(q)) && q > p + 1) {
      p = q;
      np_subject = true;
    }
  }

  while (p < n) {
    std::string_view w = lower(p);
    std::string_view next = lower(p + 1);
    if (contains(kControlVerbs, w) && next == "to") {
      p += 2;
      continue;
    }
    if (contains(kAuxiliaries, w) || contains(kSkippableAdverbs, w)) {
      // do/have/be as the last word or before an object are main verbs.
      bool main_use = (w == "do" || w == "does" || w == "did" || contains(kControlVerbs, w) ||
                       verb_lemma(w) == "be") &&
                      (p + 1 >= n || is_determiner(next) || is_preposition(next));
      if (main_use || (w == "please" && p + 1 >= n)) break;
      ++p;
      continue;
    }
    if (w == "like" && p > 0 && (lower(p - 1) == "would" || lower(p - 1) == "not") &&
        next == "to") {
      p += 2;
      continue;
    }
    if (contains(kHelpVerbs, w) && p + 1 < n &&
        (contains(kObjectPronouns, next) || next == "to")) {
      p += 2;
      if (lower(p) == "to") ++p;
      continue;
    }
    break;
  }
  if (p >= n) return std::nullopt;

  std::string_view verb = lower(p);
  if (is_determiner(verb) || is_preposition(verb) || is_pronoun(verb) ||
      contains(kInterjections, verb) || contains(kWhWords, verb) || contains(kConjunctions, verb)) {
    return std::nullopt;
  }
  if (!subject && !np_subject && !is_known_verb(verb)) {
    bool object_follows = p + 1 < n && (is_determiner(lower(p + 1)) || is_pronoun(lower(p + 1)));
    if (!object_follows) return std::nullopt;
  }

  ParsedClause clause;
  clause.main_verb = verb_lemma(verb);
  clause.verb_surface = words[p].surface;
  if (subject) {
    std::string_view s = lower(*subject);
    clause.subject_person = (s == "i" || s == "we") ? Person::kFirst
                            : s == "you"            ? Person::kSecond
                                                    : Person::kThird;
  }
  const std::size_t verb_index = p;
  std::size_t q = p + 1;
  if (q < n && contains(kParticles, lower(q)) && !clause_end[p]) {
    clause.main_verb += " " + std::string(lower(q));
    clause.verb_surface += " " + words[q].surface;
    ++q;
  }
  // A closing benefactive "for me" names the requester, not the task.
  std::size_t vp_end = n;
  if (n >= q + 2 && lower(n - 2) == "for" && (lower(n - 1) == "me" || lower(n - 1) == "us")) {
    vp_end = n - 2;
  }
  clause.verb_phrase = join_surface(words, verb_index, vp_end);

  // Direct object: determiners, premodifiers, head.
  std::size_t np_begin = q;
  std::size_t np_end = q;
  if (!clause_end[verb_index] && (q == verb_index + 1 || !clause_end[q - 1])) {
    while (np_end < n && !is_np_boundary(lower(np_end))) {
      ++np_end;
      if (clause_end[np_end - 1]) break;
    }
  }
  std::size_t content = np_begin;
  while (content < np_end && is_determiner(lower(content))) ++content;
  if (content < np_end) {
    clause.direct_object = words[np_end - 1].lower;
    for (std::size_t i = content; i + 1 < np_end; ++i) {
      clause.object_modifiers.push_back(words[i].lower);
    }
    clause.object_phrase = join_surface(words, np_begin, np_end);
  } else if (wh_np) {
    clause.direct_object = wh_np->head;
    clause.object_modifiers = wh_np->modifiers;
    clause.object_phrase = wh_np->text;
    clause.object_from_wh = true;
  }

  // Trailing prepositional phrase with a non-pronoun object.
  std::size_t r = np_end;
  if (r < n && is_preposition(lower(r)) && (r == 0 || !clause_end[r - 1])) {
    std::size_t s = r + 1;
    std::size_t e = s;
    while (e < n && !contains(kConjunctions, lower(e)) && !contains(kWhWords, lower(e))) {
      ++e;
      if (clause_end[e - 1]) break;
    }
    if (e == n) e = std::max(s, vp_end);
    std::size_t c = s;
    while (c < e && is_determiner(lower(c))) ++c;
    if (c < e && !(e - c == 1 && is_pronoun(lower(c)))) {
      clause.preposition = words[r].lower;
      clause.prepositional_object = join_surface(words, s, e);
    }
  }
  return clause;
}

bool has_first_person(std::string_view text) {
  static const WordSet kFirst = {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours"};
  for (const auto& w : split_words(text)) {
    if (contains(kFirst, w.lower)) return true;
  }
  return false;
}

std::string flip_person(std::string_view text) {
  // Whitespace chunks keep their punctuation; only the word core is swapped.
  std::vector<std::string> chunks;
  {
    std::string cur;
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) chunks.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) chunks.push_back(std::move(cur));
  }
  struct Piece {
    std::string prefix, core, suffix;
  };
  std::vector<Piece> pieces;
  for (const auto& ch : chunks) {
    std::size_t b = 0, e = ch.size();
    while (b < e && is_edge_punct(ch[b])) ++b;
    while (e > b && is_edge_punct(ch[e - 1])) --e;
    pieces.push_back({ch.substr(0, b), ch.substr(b, e - b), ch.substr(e)});
  }

  static const std::unordered_map<std::string, std::string> kSwap = {
      {"me", "you"},        {"my", "your"},   {"mine", "yours"},  {"myself", "yourself"},
      {"we", "you"},        {"us", "you"},    {"our", "your"},    {"ours", "yours"},
      {"your", "my"},       {"yours", "mine"}, {"yourself", "myself"},
      {"i'm", "you're"},    {"i'd", "you'd"}, {"i've", "you've"}, {"i'll", "you'll"},
      {"you're", "I'm"},    {"you've", "I've"}, {"you'll", "I'll"}, {"you'd", "I'd"}};

  std::vector<std::string> out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& piece = pieces[i];
    std::string lower = to_lower(piece.core);
    std::string replacement = piece.core;
    std::string prev = i > 0 ? to_lower(pieces[i - 1].core) : std::string();
    std::string next = i + 1 < pieces.size() ? to_lower(pieces[i + 1].core) : std::string();
    if (lower == "i") {
      // Only a clause-initial "I VERB" states what the user wants; inside a
      // relative clause ("the card I lost") the pronoun is simply swapped.
      const bool clause_start = i == 0 || contains(kConjunctions, prev) || !pieces[i - 1].suffix.empty();
      bool plain_verb = clause_start && !next.empty() && piece.suffix.empty() && is_known_verb(next) &&
                        verb_lemma(next) != "want" && verb_lemma(next) != "need" &&
                        !contains(kAuxiliaries, next) && !contains(kControlVerbs, next);
      if (plain_verb) {
        out.push_back(piece.prefix + "you want to " + verb_lemma(next) + pieces[i + 1].suffix);
        ++i;
        continue;
      }
      replacement = "you";
    } else if (lower == "you") {
      bool subject_position = i == 0 || contains(kAuxiliaries, prev) || contains(kWhWords, prev) ||
                              contains(kConjunctions, prev) || prev == "that";
      replacement = subject_position ? "I" : "me";
    } else if ((lower == "am" || lower == "was") && prev == "i") {
      replacement = lower == "am" ? "are" : "were";
    } else if (auto it = kSwap.find(lower); it != kSwap.end()) {
      replacement = it->second;
    }
    if (i == 0 && lower != "i" && !piece.core.empty() && std::isupper(static_cast<unsigned char>(piece.core[0])) &&
        replacement != "I" && !replacement.empty()) {
      replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
    }
    out.push_back(piece.prefix + replacement + piece.suffix);
  }
  return join(out, " ");
}

}  // namespace disambig
