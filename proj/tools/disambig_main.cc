// Command-line front end: train, eval, chat, inspect, serve, synth.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "disambig/engine.h"
#include "disambig/errors.h"
#include "disambig/evaluation.h"
#include "disambig/gateway.h"
#include "disambig/kernels.h"
#include "disambig/synthetic.h"

namespace fs = std::filesystem;
using namespace disambig;

namespace {

struct TrainArgs {
  std::string data, vectors, hypernyms, qa_pairs, out, config;
};

struct EvalArgs {
  std::string artifact, test, ambiguous, out_dir;
  std::vector<double> t2_values;
  std::vector<double> gates;
};

struct InspectArgs {
  std::string artifact, query, intents;
  std::optional<double> gate;
};

struct ServeArgs {
  std::string artifact, bind = "127.0.0.1:8080";
};

struct SynthArgs {
  std::string out_dir;
  std::uint64_t seed = SyntheticOptions{}.seed;
};

int run_train(const TrainArgs& a) {
  EngineConfig config = EngineConfig::load(a.config);
  Corpus corpus = load_corpus(a.data);
  WordVectorTable vectors = load_word_vectors(a.vectors);
  HypernymLexicon hypernyms = load_hypernyms(a.hypernyms);
  std::vector<QAPairSet> external;
  if (!a.qa_pairs.empty()) external = load_pairs(a.qa_pairs);
  std::vector<std::string> warnings;
  Engine engine = Engine::build(corpus, config, std::move(vectors), std::move(hypernyms),
                                a.qa_pairs.empty() ? nullptr : &external, &warnings);
  engine.save(a.out);
  std::cerr << "trained " << engine.intents().size() << " intents on " << corpus.size()
            << " utterances; temperature " << engine.model().temperature() << "; "
            << warnings.size() << " generation warnings\n";
  return 0;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

int run_eval(const EvalArgs& a) {
  Engine engine = Engine::load(a.artifact);
  Corpus test = load_corpus(a.test);
  std::ostringstream topk;
  write_topk_csv(topk, evaluate_topk(engine, test));
  std::cout << topk.str();
  if (!a.out_dir.empty()) {
    fs::create_directories(a.out_dir);
    write_file(fs::path(a.out_dir) / "topk.csv", topk.str());
  }
  if (a.ambiguous.empty()) return 0;

  auto examples = load_ambiguous(a.ambiguous, test);
  std::vector<double> t2_values = a.t2_values;
  if (t2_values.empty()) t2_values = {engine.config().thresholds.t2};
  AmbiguityReport report = evaluate_ambiguity(engine, examples, t2_values);
  std::vector<double> gates = a.gates;
  if (gates.empty()) gates = {engine.config().gate};
  std::ostringstream ambiguity, histogram, coverage;
  write_ambiguity_csv(ambiguity, report);
  write_histogram_csv(histogram, report.histogram);
  write_coverage_csv(coverage, coverage_sweep(engine, examples, gates));
  std::cout << '\n' << ambiguity.str() << '\n' << histogram.str() << '\n' << coverage.str();
  if (!a.out_dir.empty()) {
    write_file(fs::path(a.out_dir) / "ambiguity.csv", ambiguity.str());
    write_file(fs::path(a.out_dir) / "margins.csv", histogram.str());
    write_file(fs::path(a.out_dir) / "coverage.csv", coverage.str());
  }
  return 0;
}

int run_chat(const std::string& artifact) {
  Engine engine = Engine::load(artifact);
  std::size_t counter = 0;
  Session session = engine.start_session("chat-" + std::to_string(++counter));
  std::cout << "> " << std::flush;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      std::cout << "> " << std::flush;
      continue;
    }
    auto [next, reply] = engine.handle_message(std::move(session), line);
    session = std::move(next);
    switch (reply.kind) {
      case EngineReply::Kind::kClarify:
        std::cout << reply.question << "\n  [1] " << reply.option_j << "\n  [2] "
                  << reply.option_k << "\n";
        break;
      case EngineReply::Kind::kFinal:
        std::cout << "intent: " << reply.intent << " (confidence " << reply.confidence << ")\n";
        break;
      case EngineReply::Kind::kRejected:
        std::cout << "no intent (" << reply.reason << ")\n";
        break;
    }
    if (session.closed()) session = engine.start_session("chat-" + std::to_string(++counter));
    std::cout << "> " << std::flush;
  }
  std::cout << '\n';
  return 0;
}

int run_inspect(const InspectArgs& a) {
  Engine engine = Engine::load(a.artifact);
  IntentDistribution dist = engine.predict(a.query);
  AmbiguityVerdict verdict = engine.assess(dist);
  std::size_t j = verdict.top;
  std::size_t k = verdict.second;
  if (!a.intents.empty()) {
    auto comma = a.intents.find(',');
    if (comma == std::string::npos) throw PreconditionError("--intents expects J,K");
    j = engine.intent_index(a.intents.substr(0, comma));
    k = engine.intent_index(a.intents.substr(comma + 1));
  }
  std::cout << "query: " << a.query << "\n"
            << "verdict: " << to_string(verdict.kind) << "\n"
            << "top: " << engine.intents()[verdict.top] << " " << verdict.top_probability << "\n"
            << "second: " << engine.intents()[verdict.second] << " " << dist[verdict.second]
            << "\n"
            << "margin: " << verdict.margin << "\n"
            << "pair: " << engine.intents()[j] << " / " << engine.intents()[k] << "\n";
  Clarification c = engine.clarify(a.query, j, k, a.gate, /*keep_matrix=*/true);
  std::cout << "score_matrix:\n";
  write_score_matrix_csv(std::cout, c.candidates.matrix, c.set_j, c.set_k);
  if (c.candidates.truncated) std::cout << "(cross product truncated)\n";
  if (c.selection) {
    std::cout << "selected: " << c.selection->pair_j.question << " | "
              << c.selection->pair_j.answer << " || " << c.selection->pair_k.question << " | "
              << c.selection->pair_k.answer << " score " << c.selection->score << "\n";
  }
  std::cout << "provenance: " << to_string(c.question.provenance) << "\n"
            << "applied_rule: "
            << (c.question.applied_rule ? std::string(rule_id(*c.question.applied_rule)) : "none")
            << "\n"
            << "question: " << c.question.text << "\n"
            << "option_j: " << c.question.option_j << "\n"
            << "option_k: " << c.question.option_k << "\n";
  return 0;
}

HttpServer* g_server = nullptr;

extern "C" void handle_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const ServeArgs& a) {
  auto engine = std::make_shared<const Engine>(Engine::load(a.artifact));
  auto [host, port] = parse_bind_address(a.bind);
  HttpServer server(std::make_shared<Gateway>(engine));
  int bound = server.bind(host, port);
  std::cerr << "listening on " << host << ":" << bound << " (kernels: "
            << kernels::isa_name(kernels::active_isa()) << ")\n";
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  server.run();
  g_server = nullptr;
  return 0;
}

int run_synth(const SynthArgs& a) {
  SyntheticOptions options;
  options.seed = a.seed;
  SyntheticBundle bundle = make_synthetic_bundle(options);
  fs::path dir(a.out_dir);
  fs::create_directories(dir);
  save_corpus(bundle.train, dir / "train.jsonl");
  save_corpus(bundle.test, dir / "test.jsonl");
  save_ambiguous(bundle.ambiguous, dir / "ambiguous.jsonl");
  save_word_vectors(bundle.vectors, dir / "vectors.txt");
  save_hypernyms(bundle.hypernyms, dir / "hypernyms.tsv");
  save_corpus(toy_banking_corpus(), dir / "toy_banking.jsonl");
  write_file(dir / "config.json", EngineConfig{}.to_json().dump(2) + "\n");
  std::cerr << "wrote " << bundle.train.size() << " train, " << bundle.test.size() << " test, "
            << bundle.ambiguous.size() << " ambiguous examples to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intent disambiguation engine"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train an engine artifact");
  train->add_option("--data", train_args.data, "Labeled utterances (JSONL)")->required();
  train->add_option("--vectors", train_args.vectors, "Word vectors (text)")->required();
  train->add_option("--hypernyms", train_args.hypernyms, "Hypernym lexicon (TSV)")->required();
  train->add_option("--qa-pairs", train_args.qa_pairs, "External QA pairs (JSONL)");
  train->add_option("--out", train_args.out, "Artifact output path")->required();
  train->add_option("--config", train_args.config, "Engine config (JSON)")->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate an artifact, CSV to stdout");
  eval->add_option("--artifact", eval_args.artifact)->required();
  eval->add_option("--test", eval_args.test, "Labeled test utterances (JSONL)")->required();
  eval->add_option("--ambiguous", eval_args.ambiguous, "Ambiguous examples (JSONL)");
  eval->add_option("--sweep-t2", eval_args.t2_values, "Comma-separated t2 values")
      ->delimiter(',');
  eval->add_option("--sweep-gate", eval_args.gates, "Comma-separated gate values")
      ->delimiter(',');
  eval->add_option("--out-dir", eval_args.out_dir, "Also write each table to this directory");

  std::string chat_artifact;
  auto* chat = app.add_subcommand("chat", "Interactive terminal session");
  chat->add_option("--artifact", chat_artifact)->required();

  InspectArgs inspect_args;
  auto* inspect = app.add_subcommand("inspect", "Trace one query through the pipeline");
  inspect->add_option("--artifact", inspect_args.artifact)->required();
  inspect->add_option("--query", inspect_args.query)->required();
  inspect->add_option("--intents", inspect_args.intents, "Force the pair J,K");
  inspect->add_option("--gate", inspect_args.gate, "Override the configured gate");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "HTTP gateway");
  serve->add_option("--artifact", serve_args.artifact)->required();
  serve->add_option("--bind", serve_args.bind, "host:port")->capture_default_str();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write the bundled synthetic dataset");
  synth->add_option("--out-dir", synth_args.out_dir)->required();
  synth->add_option("--seed", synth_args.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*train) return run_train(train_args);
    if (*eval) return run_eval(eval_args);
    if (*chat) return run_chat(chat_artifact);
    if (*inspect) return run_inspect(inspect_args);
    if (*serve) return run_serve(serve_args);
    if (*synth) return run_synth(synth_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
