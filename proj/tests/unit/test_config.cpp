#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "phishbowl/config.hpp"
#include "phishbowl/errors.hpp"
#include "support.hpp"

using namespace phishbowl;

TEST_CASE("defaults") {
  const PlatformConfig c;
  CHECK(c.bowl.k == 12);
  CHECK(c.bowl.epsilon == 1e-8);
  CHECK(c.bowl.lambda == 0.5);
  CHECK(c.ensemble.coefficient == 0.8);
  CHECK(c.ocr.t_ocr == 80);
  CHECK(c.ocr.t_header == 7);
  CHECK(c.trend.t_alert == 35);
  CHECK(c.converter.tokens_per_char == 0.2815);
  CHECK(c.embedding_dimension() == 256);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("sections, JSON values and bare words") {
  const auto c = parse_config(R"(
# comment
[bowl]
k = 5
lambda = 1.0
confidence_decay = false
path = data/bowl.jsonl

[embedder]
kind = remote
dimension = 1536
url = "http://localhost:9/embed"

[converter]
strategy = "content"
token_limit = 512

[ocr]
greeting_terms = ["hey", "greetings"]

[trend]
delta = 0.3
)");
  CHECK(c.bowl.k == 5);
  CHECK(c.bowl.lambda == 1.0);
  CHECK_FALSE(c.bowl.confidence_decay_enabled);
  CHECK(c.bowl_path == "data/bowl.jsonl");
  CHECK(c.embedder == EmbedderKind::Remote);
  CHECK(c.embedding_dimension() == 1536);
  CHECK(c.embedding_endpoint.url == "http://localhost:9/embed");
  CHECK(c.converter.strategy == Truncation::Content);
  CHECK(c.converter.token_limit == 512);
  CHECK(c.ocr.greeting_terms == std::vector<std::string>{"hey", "greetings"});
  CHECK(c.trend.delta == 0.3);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("errors carry line numbers") {
  auto line_of = [](std::string_view text) -> std::size_t {
    try {
      parse_config(text);
    } catch (const ParseError& e) {
      return e.row();
    }
    return 0;
  };
  CHECK(line_of("[bowl]\nk = 3\nnope = 1\n") == 3);
  CHECK(line_of("[bowl\n") == 1);
  CHECK(line_of("[bowl]\njust words\n") == 2);
  CHECK(line_of("[bowl]\nk = \"three\"\n") == 2);
  CHECK(line_of("[converter]\nstrategy = middle\n") == 2);
  CHECK(line_of("[chat]\nkind = carrier-pigeon\n") == 2);
}

TEST_CASE("validation catches inconsistent settings") {
  PlatformConfig c;
  c.embedder = EmbedderKind::Remote;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.chat = ChatKind::Remote;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.trend.k_alert = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.max_attempts = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("files resolve data paths next to the config") {
  testing::TempDir dir;
  const auto path = dir / "pb.conf";
  std::ofstream(path) << "[bowl]\npath = \"bowl.jsonl\"\n[alerts]\npath = \"/abs/alerts.jsonl\"\n";
  const auto c = load_config(path);
  CHECK(c.bowl_path == dir.path() / "bowl.jsonl");
  CHECK(c.alert_log_path == "/abs/alerts.jsonl");
  CHECK_THROWS_AS(load_config(dir / "missing.conf"), Error);
}

TEST_CASE("shipped example config parses and validates") {
  const auto c = load_config(PHISHBOWL_SOURCE_DIR "/config/phishbowl.conf");
  CHECK_NOTHROW(c.validate());
  CHECK(c.converter.strategy == Truncation::ContentEnd);
}

TEST_CASE("environment overrides endpoints") {
  ::setenv("PHISHBOWL_CHAT_URL", "http://chat.local/v1", 1);
  ::setenv("PHISHBOWL_EMBED_MODEL", "embed-small", 1);
  PlatformConfig c;
  apply_environment(c);
  CHECK(c.chat_endpoint.url == "http://chat.local/v1");
  CHECK(c.embedding_endpoint.model == "embed-small");
  CHECK(c.embedding_endpoint.url.empty());
  ::unsetenv("PHISHBOWL_CHAT_URL");
  ::unsetenv("PHISHBOWL_EMBED_MODEL");
}
