#include "disambig/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string_view>

#include "disambig/resolver.h"
#include "disambig/surface.h"
#include "disambig/syntax.h"
#include "disambig/text.h"

namespace disambig {
namespace {

struct IntentSpec {
  std::string_view name;
  std::vector<std::string_view> verb_phrases;
};

struct FamilySpec {
  std::vector<IntentSpec> members;
  // Phrasings shared by every member: no word separates them.
  std::vector<std::string_view> generic_phrases;
};

const std::vector<FamilySpec>& families() {
  static const std::vector<FamilySpec> kFamilies = {
      {{{"open_savings",
         {"open a savings account", "open a new savings account", "set up a savings account",
          "create a savings account for my salary"}},
        {"open_checking",
         {"open a checking account", "open a new checking account", "set up a checking account",
          "create a checking account for my salary"}}},
       {"open an account", "open a new bank account", "set up an account"}},
      {{{"reset_email_password",
         {"reset my email password", "reset the password for my email",
          "change my email password", "recover my email password"}},
        {"reset_vpn_password",
         {"reset my vpn password", "reset the password for my vpn", "change my vpn password",
          "recover my vpn password"}}},
       {"reset my password", "change my password", "recover my password"}},
      {{{"install_excel",
         {"install excel", "install excel on my laptop", "install microsoft excel",
          "set up excel for the spreadsheets"}},
        {"install_outlook",
         {"install outlook", "install outlook on my laptop", "install microsoft outlook",
          "set up outlook for the calendar"}}},
       {"install an office app", "install some office software", "set up an office program"}},
      {{{"add_printer",
         {"add a printer", "add the network printer", "connect a printer to my laptop",
          "set up a new printer"}},
        {"add_scanner",
         {"add a scanner", "add the network scanner", "connect a scanner to my laptop",
          "set up a new scanner"}}},
       {"add a device", "connect a new device", "set up a device"}},
      {{{"order_laptop",
         {"order a new laptop", "order a laptop for a new hire", "request a replacement laptop",
          "buy a laptop"}},
        {"order_monitor",
         {"order a new monitor", "order a monitor for a new hire",
          "request a replacement monitor", "buy a monitor"}}},
       {"order new hardware", "order some equipment", "buy new equipment"}},
      {{{"move_office",
         {"move to another office", "move my office to the third floor", "move offices",
          "move into a bigger office"}},
        {"relocate_desk",
         {"relocate my desk", "relocate my desk to another floor",
          "relocate the desk near the window", "relocate my workstation desk"}}},
       {"change where I sit", "change my workspace", "get a new workspace"}},
      {{{"block_credit_card",
         {"block my credit card", "freeze my credit card", "block the credit card I lost",
          "stop my credit card"}},
        {"block_debit_card",
         {"block my debit card", "freeze my debit card", "block the debit card I lost",
          "stop my debit card"}}},
       {"block my card", "freeze my card", "stop my card"}},
      {{{"book_meeting_room",
         {"book a meeting room", "reserve a meeting room", "book a conference room",
          "reserve a room for the team meeting"}},
        {"cancel_meeting",
         {"cancel my meeting", "cancel the team meeting", "call off the meeting",
          "cancel the weekly meeting"}}},
       {"arrange something for my meeting", "sort out my meeting", "deal with the meeting"}},
  };
  return kFamilies;
}

const std::vector<IntentSpec>& singletons() {
  static const std::vector<IntentSpec> kSingletons = {
      {"unlock_account",
       {"unlock my user account", "unlock my login", "unlock my locked user account",
        "unlock my profile"}},
      {"update_address",
       {"update my mailing address", "change my home address", "update the address on file",
        "correct my postal address"}},
      {"report_phishing",
       {"report a phishing email", "report a suspicious email", "report a scam message",
        "flag a phishing message"}},
      {"request_vpn_access",
       {"request vpn access", "get access to the vpn", "request remote access",
        "apply for vpn access"}},
      {"restore_files",
       {"restore my deleted files", "recover deleted files", "restore a file from backup",
        "restore an old version of a document"}},
      {"upgrade_memory",
       {"upgrade the memory on my laptop", "add more ram to my computer", "upgrade my ram",
        "increase the memory of my workstation"}},
      {"transfer_money",
       {"transfer money to another account", "send money to my friend",
        "transfer funds between accounts", "wire money abroad"}},
      {"archive_emails",
       {"archive my old emails", "archive the emails in my inbox", "clean up my mailbox",
        "archive last year's mail"}},
      {"start_vm",
       {"start a virtual machine", "launch a virtual machine", "spin up a new vm",
        "start my test server"}},
  };
  return kSingletons;
}

const std::vector<std::string_view> kTemplates = {
    "I want to {}",     "I need to {}",          "I would like to {}", "please {}",
    "can you help me {}", "how do I {}",         "{}",                 "could you {} for me",
    "help me {}",       "I am trying to {}"};

const std::vector<std::string_view> kAbstractTemplates = {
    "I think I need to {}",       "is it possible to {}",   "I was hoping to {}",
    "my manager asked me to {}", "I have been asked to {}", "is there a way to {}"};

const std::vector<std::string_view> kBlendTemplates = {
    "I want to {} and also {}", "I need to {} and then {}", "can you help me {} and {}",
    "please {} and also {}",    "I would like to {} and {} today"};

const std::vector<std::string_view> kExtraVocabulary = {
    "what", "which", "do", "does", "you", "want", "to", "type", "kind", "of", "would", "like",
    "is", "the", "are", "talking", "about", "mean", "or", "a", "an", "one", "it", "that"};

std::string fill(std::string_view pattern, std::string_view a, std::string_view b = {}) {
  std::string out;
  std::size_t slot = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '{' && i + 1 < pattern.size() && pattern[i + 1] == '}') {
      out += slot++ == 0 ? a : b;
      ++i;
    } else {
      out += pattern[i];
    }
  }
  return out;
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng() % i]);
  }
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Box-Muller on raw engine output; std::normal_distribution is not
// reproducible across standard library implementations.
std::pair<double, double> gaussian_pair(std::mt19937_64& rng) {
  auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

// Every (phrase, template) combination, shuffled.
std::vector<std::string> expand(const std::vector<std::string_view>& phrases,
                                const std::vector<std::string_view>& templates,
                                std::mt19937_64& rng) {
  std::vector<std::string> out;
  for (auto p : phrases) {
    for (auto t : templates) out.push_back(fill(t, p));
  }
  shuffle(out, rng);
  return out;
}

}  // namespace

std::vector<std::string> reply_vocabulary() {
  std::vector<std::string> words = NoneLexicon().phrases();
  for (const char* w : {"yes", "the", "one", "a", "first", "second", "other", "i", "mean", "please"}) {
    words.emplace_back(w);
  }
  return words;
}

HypernymLexicon bundled_hypernyms() {
  HypernymLexicon h;
  h.add("savings", "checking", "type");
  h.add("email", "vpn", "kind");
  h.add("credit", "debit", "type");
  h.add("move", "relocate", "relocate");
  h.add("book", "cancel", "manage");
  h.add("printer", "scanner", "device");
  h.add("laptop", "monitor", "hardware");
  return h;
}

WordVectorTable hashed_vectors(const std::vector<std::string>& texts, std::size_t dim,
                               std::uint64_t seed) {
  std::set<std::string> tokens;
  for (const auto& t : texts) {
    for (auto& tok : tokenize(t)) tokens.insert(std::move(tok));
  }
  WordVectorTable table(dim);
  std::vector<double> v(dim);
  for (const auto& tok : tokens) {
    std::mt19937_64 rng(seed ^ fnv1a(tok));
    const double scale = is_function_word(tok) ? 0.25 : 1.0;
    for (std::size_t i = 0; i < dim; i += 2) {
      auto [g0, g1] = gaussian_pair(rng);
      v[i] = scale * g0;
      if (i + 1 < dim) v[i + 1] = scale * g1;
    }
    table.add(tok, v);
  }
  return table;
}

Corpus toy_banking_corpus() {
  return Corpus({{"I want to open a savings account", "open_savings"},
                 {"open a savings account for me", "open_savings"},
                 {"how do I start a savings account", "open_savings"},
                 {"I want to open a checking account", "open_checking"},
                 {"open a checking account for me", "open_checking"},
                 {"how do I start a checking account", "open_checking"}});
}

SyntheticBundle make_synthetic_bundle(const SyntheticOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::vector<LabeledUtterance> train;
  std::vector<LabeledUtterance> test;
  std::vector<std::string> inventory;
  std::vector<const IntentSpec*> all_specs;

  // Sibling intents share one (phrase slot, template) order and one generic
  // sample, so the only systematic difference between them is their own
  // wording.
  auto add_intent = [&](const IntentSpec& spec, const std::vector<std::size_t>& order,
                        const std::vector<std::string>* generic) {
    inventory.emplace_back(spec.name);
    all_specs.push_back(&spec);
    const std::size_t generic_train = generic ? options.generic_train_per_intent : 0;
    const std::size_t generic_test = generic ? options.generic_test_per_intent : 0;
    const std::size_t need_test = options.test_per_intent - generic_test;
    const std::size_t need_train = options.train_per_intent - generic_train;
    std::size_t next = 0;
    auto take = [&]() -> std::string {
      // Cycle with a numbered suffix once the combinations run out.
      const std::size_t slot = order[next % order.size()];
      std::string s = fill(kTemplates[slot % kTemplates.size()],
                           spec.verb_phrases[slot / kTemplates.size() % spec.verb_phrases.size()]);
      if (next >= order.size()) s += " " + std::to_string(next / order.size() + 1);
      ++next;
      return s;
    };
    for (std::size_t i = 0; i < need_test; ++i) test.push_back({take(), std::string(spec.name)});
    for (std::size_t i = 0; i < generic_test; ++i) {
      test.push_back({(*generic)[(generic_train + i) % generic->size()], std::string(spec.name)});
    }
    for (std::size_t i = 0; i < need_train; ++i) train.push_back({take(), std::string(spec.name)});
    for (std::size_t i = 0; i < generic_train; ++i) {
      train.push_back({(*generic)[i % generic->size()], std::string(spec.name)});
    }
  };
  auto slot_order = [&](std::size_t phrases) {
    std::vector<std::size_t> order(phrases * kTemplates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);
    return order;
  };

  for (const auto& family : families()) {
    // Generic phrases interleaved so any prefix covers all of them.
    std::vector<std::string> generic;
    auto templates = kTemplates;
    shuffle(templates, rng);
    for (std::size_t t = 0; t < templates.size(); ++t) {
      for (std::size_t p = 0; p < family.generic_phrases.size(); ++p) {
        generic.push_back(fill(templates[(t + p) % templates.size()], family.generic_phrases[p]));
      }
    }
    const auto order = slot_order(family.members[0].verb_phrases.size());
    for (const auto& member : family.members) add_intent(member, order, &generic);
  }
  for (const auto& spec : singletons()) add_intent(spec, slot_order(spec.verb_phrases.size()), nullptr);

  std::vector<AmbiguousExample> ambiguous;
  std::set<std::string> seen;
  auto push = [&](std::string text, std::string_view a, std::string_view b) {
    if (seen.insert(text).second) ambiguous.push_back({std::move(text), std::string(a), std::string(b)});
  };
  for (const auto& family : families()) {
    auto abstract = expand(family.generic_phrases, kAbstractTemplates, rng);
    abstract.resize(std::min(abstract.size(), options.abstract_per_family));
    for (auto& text : abstract) {
      push(std::move(text), family.members[0].name, family.members[1].name);
    }
  }
  for (std::size_t n = 0, attempts = 0; n < options.blended_pairs && attempts < 100 * options.blended_pairs;
       ++attempts) {
    const std::size_t a = rng() % all_specs.size();
    const std::size_t b = rng() % all_specs.size();
    if (a == b) continue;
    const auto& pa = all_specs[a]->verb_phrases;
    const auto& pb = all_specs[b]->verb_phrases;
    const auto& t = kBlendTemplates[rng() % kBlendTemplates.size()];
    const auto before = ambiguous.size();
    push(fill(t, pa[rng() % pa.size()], pb[rng() % pb.size()]), all_specs[a]->name,
         all_specs[b]->name);
    if (ambiguous.size() > before) ++n;
  }

  std::vector<std::string> texts;
  for (const auto& u : train) texts.push_back(u.text);
  for (const auto& u : test) texts.push_back(u.text);
  for (const auto& e : ambiguous) texts.push_back(e.text);
  for (const auto& w : reply_vocabulary()) texts.push_back(w);
  for (auto w : kExtraVocabulary) texts.emplace_back(w);
  for (const auto& t : kDefaultTemplates) texts.push_back(t);
  HypernymLexicon hypernyms = bundled_hypernyms();
  for (const auto& [key, h] : hypernyms.entries()) texts.push_back(h);

  return SyntheticBundle{Corpus(std::move(train), inventory), Corpus(std::move(test), inventory),
                         std::move(ambiguous),
                         hashed_vectors(texts, options.vector_dim, options.seed), std::move(hypernyms)};
}

}  // namespace disambig
