#pragma once

// Heuristic shallow syntax: closed-class word lists plus position rules. Good
// enough to find a main verb, its direct object and the object's
// premodifiers in short task-oriented utterances and generated questions.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace disambig {

enum class Person { kFirst, kSecond, kThird };

struct ParsedClause {
  std::string main_verb;                    // lemma, non-empty
  std::string direct_object;                // head noun, empty when none
  std::vector<std::string> object_modifiers;  // lowercased premodifiers
  Person subject_person = Person::kThird;

  // Surface text of the object noun phrase (including determiner) and of
  // the verb phrase from the main verb to the end of the clause.
  std::string object_phrase;
  std::string verb_phrase;
  // Surface form of the verb as written.
  std::string verb_surface;
  // Object came from a fronted wh-phrase ("what type of account ...").
  bool object_from_wh = false;
  // Prepositional phrase after the object: preposition and its NP.
  std::string preposition;
  std::string prepositional_object;

  bool has_object() const { return !direct_object.empty(); }
};

// None when no main verb is found.
std::optional<ParsedClause> shallow_parse(std::string_view text);

struct NounPhrase {
  std::string head;
  std::vector<std::string> modifiers;
  std::string text;  // surface, determiner stripped
};

// Parses text as a bare noun phrase: leading determiners/possessives are
// dropped, the last word is the head, the words in between are modifiers.
std::optional<NounPhrase> parse_noun_phrase(std::string_view text);

// Rewrites user-voice text for the system to say back: a clause-initial
// "I VERB" becomes "you want to VERB" (unless VERB is want/need or an
// auxiliary), first-person pronouns become second-person and second-person
// become first-person.
std::string flip_person(std::string_view text);

// True if the text contains a first-person pronoun (user voice).
bool has_first_person(std::string_view text);

// Lexicon predicates, all on lowercased words.
bool is_function_word(std::string_view word);
bool is_known_verb(std::string_view word);
bool is_determiner(std::string_view word);
bool is_preposition(std::string_view word);
std::string verb_lemma(std::string_view word);

}  // namespace disambig
