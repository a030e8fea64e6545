// Command-line front end: serve the HTTP API or run single pipeline steps
// against a local bowl.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "phishbowl/config.hpp"
#include "phishbowl/corpus.hpp"
#include "phishbowl/errors.hpp"
#include "phishbowl/eval.hpp"
#include "phishbowl/platform.hpp"
#include "phishbowl/service.hpp"

namespace {

using json = nlohmann::json;
using namespace phishbowl;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("input", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// An email file is either a JSON object {sender?, subject?, body} or plain
// body text.
EmailContent read_email(const std::string& path) {
  const std::string raw = read_file(path);
  json j = json::parse(raw, nullptr, false);
  if (!j.is_discarded() && j.is_object()) return email_from_json(j, "input");
  EmailContent e;
  e.body = raw;
  return e;
}

void print(const json& j) {
  std::cout << j.dump(2, ' ', false, json::error_handler_t::replace) << '\n';
}

std::optional<double> parse_lambda(const std::string& s) {
  if (s == "none" || s == "off") return std::nullopt;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw ValidationError("eval", "lambda must be a number or 'none'");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phish bowl: lazy-learning phishing detection"};
  app.require_subcommand(1);

  std::string config_path;
  std::string bowl_path;
  std::string alerts_path;
  app.add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  app.add_option("--bowl", bowl_path, "Bowl log (JSONL); overrides the config");
  app.add_option("--alerts", alerts_path, "Alert log (JSONL); overrides the config");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  std::string host;
  int port = 0;
  serve_cmd->add_option("--host", host, "Listen address");
  serve_cmd->add_option("--port", port, "Listen port")->check(CLI::Range(1, 65535));

  auto* classify_cmd = app.add_subcommand("classify", "Classify one email");
  std::string email_file;
  std::string ocr_file;
  auto* file_opt = classify_cmd->add_option("--file", email_file, "Email as JSON or body text")
                       ->check(CLI::ExistingFile);
  auto* ocr_opt = classify_cmd->add_option("--ocr-file", ocr_file, "OCR word table (TSV)")
                      ->check(CLI::ExistingFile);
  file_opt->excludes(ocr_opt);
  classify_cmd->callback([&] {
    if (email_file.empty() && ocr_file.empty()) {
      throw CLI::RequiredError("--file or --ocr-file");
    }
  });

  auto* submit_cmd = app.add_subcommand("submit", "Add a known phishing email to the bowl");
  std::string submit_file;
  submit_cmd->add_option("--file", submit_file, "Email as JSON or body text")
      ->required()
      ->check(CLI::ExistingFile);

  auto* search_cmd = app.add_subcommand("search", "Natural-language search over the bowl");
  std::string query;
  std::size_t n = 10;
  search_cmd->add_option("query", query, "Search text")->required();
  search_cmd->add_option("-n", n, "Number of results")->check(CLI::Range(1, 100));

  auto* preload_cmd = app.add_subcommand("preload", "Bulk-load a labeled corpus");
  std::string corpus_path;
  preload_cmd->add_option("--corpus", corpus_path, "JSONL corpus")
      ->required()
      ->check(CLI::ExistingFile);

  auto* eval_cmd = app.add_subcommand("eval", "Run hermetic bowl experiments");
  std::string eval_corpus;
  std::vector<std::size_t> train_sizes{2048};
  std::vector<std::string> lambdas{"0.5"};
  std::size_t test_size = 200;
  std::string balance = "balanced";
  std::string analyzer = "bowl";
  std::uint64_t seed = 1;
  bool memorize = false;
  eval_cmd->add_option("--corpus", eval_corpus, "JSONL corpus (default: synthetic)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--train", train_sizes, "Training sizes");
  eval_cmd->add_option("--test", test_size, "Test size (half phishing)");
  eval_cmd->add_option("--lambda", lambdas, "Confidence decay values, or 'none'");
  eval_cmd->add_option("--balance", balance, "balanced | phish-only")
      ->check(CLI::IsMember({"balanced", "phish-only"}));
  eval_cmd->add_option("--analyzer", analyzer, "bowl | gpt | ensemble")
      ->check(CLI::IsMember({"bowl", "gpt", "ensemble"}));
  eval_cmd->add_option("--seed", seed, "Split seed");
  eval_cmd->add_flag("--memorize", memorize, "Preload the test split itself");

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval_cmd->parsed()) {
      ExperimentSpec spec;
      spec.corpus = eval_corpus.empty() ? synthetic_corpus() : load_corpus(eval_corpus);
      spec.test_size = test_size;
      spec.balance = balance == "phish-only" ? Balance::PhishOnly : Balance::Balanced;
      spec.analyzer = analyzer == "gpt"        ? AnalyzerKind::Gpt
                      : analyzer == "ensemble" ? AnalyzerKind::Ensemble
                                               : AnalyzerKind::Bowl;
      spec.seed = seed;
      spec.memorize_test_split = memorize;
      std::cout << results_header() << '\n';
      for (std::size_t train : train_sizes) {
        for (const auto& l : lambdas) {
          spec.train_size = train;
          spec.lambda = parse_lambda(l);
          std::cout << results_row(spec, run_experiment(spec)) << '\n';
        }
      }
      return 0;
    }

    PlatformConfig config = config_path.empty() ? PlatformConfig{} : load_config(config_path);
    apply_environment(config);
    if (!bowl_path.empty()) config.bowl_path = bowl_path;
    if (!alerts_path.empty()) config.alert_log_path = alerts_path;
    if (!host.empty()) config.listen_host = host;
    if (port != 0) config.listen_port = port;
    auto platform = Platform::from_config(config);

    if (serve_cmd->parsed()) {
      std::cerr << "listening on " << config.listen_host << ':' << config.listen_port << '\n';
      if (!serve(*platform, config.listen_host, config.listen_port)) {
        throw Error("server", "cannot listen on " + config.listen_host + ":" +
                                  std::to_string(config.listen_port));
      }
    } else if (classify_cmd->parsed()) {
      ClassifyRequest req;
      if (!ocr_file.empty()) {
        req.ocr_table = read_file(ocr_file);
      } else {
        req.email = read_email(email_file);
      }
      print(to_json(platform->classify(req)));
    } else if (submit_cmd->parsed()) {
      print(to_json(platform->submit(read_email(submit_file))));
    } else if (search_cmd->parsed()) {
      for (const auto& hit : platform->search(query, n)) {
        std::cout << to_json(hit).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
      }
    } else if (preload_cmd->parsed()) {
      const std::size_t added = platform->preload_corpus(corpus_path);
      std::cout << "preloaded " << added << " records; bowl size " << platform->bowl().size()
                << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
