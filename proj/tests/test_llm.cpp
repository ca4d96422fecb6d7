#include "httplib.h"

#include <atomic>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "fuzzfeed/llm/extract.hpp"
#include "fuzzfeed/llm/provider.hpp"
#include "support/sources.hpp"

using namespace fuzzfeed;
using namespace fuzzfeed::llm;
using fuzzfeed::testing::copy_sort_source;
using fuzzfeed::testing::motivating_candidate;

namespace {

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string response_for(const std::string& stage) { return copy_sort_source() + "\n" + motivating_candidate(stage); }

RequestContext ctx(std::string id, PromptKind kind = PromptKind::InitialWp, std::string hash = "h") {
  return RequestContext{std::move(id), kind, std::move(hash), 1};
}

std::filesystem::path temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "fuzzfeed-tests";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST_CASE("initial prompt embeds the program and one grammar appendix") {
  auto p = minilang::load_program(copy_sort_source());
  std::string prompt = render_initial_prompt(*p);
  CHECK(prompt.find("int[] b_clone = clone(b);") != std::string::npos);
  CHECK(count(prompt, "program  := funcdef+") == 1);
  CHECK(prompt.find("single brief comment describing the precondition in pseudo-code") != std::string::npos);
  CHECK(prompt.find("Mini program containing a method named 'foo'") != std::string::npos);
  CHECK(prompt.find("Java") == std::string::npos);
  CHECK(ends_with(prompt, "Reason through your solution internally."));
  CHECK(render_initial_prompt(*p) == prompt);
}

TEST_CASE("repair-validity prompt embeds the witness") {
  auto p = minilang::load_program(copy_sort_source());
  std::string cand = response_for("initial");
  FuzzInput w{{1401919545, 267222264, 1358618764}, {739288021, 776171394, -594227544},
              {427235608, -506959485, 1997723943, -498207265, 733576341}};
  std::string prompt = render_repair_validity_prompt(*p, cand, w);
  CHECK(prompt.find(R"({"a":[1401919545,267222264,1358618764],"b":[739288021,776171394,-594227544],)") !=
        std::string::npos);
  CHECK(prompt.find("len(c) >= len(a)") != std::string::npos);
  CHECK(ends_with(prompt, "Reason through your solution internally."));
  CHECK(render_repair_validity_prompt(*p, cand, FuzzInput{}).find(R"({"a":[],"b":[],"c":[]})") != std::string::npos);
  CHECK(render_repair_validity_prompt(*p, cand, w) == prompt);
}

TEST_CASE("repair-weakness prompt embeds the witness and its distinguishing phrase") {
  auto p = minilang::load_program(copy_sort_source());
  std::string prompt = render_repair_weakness_prompt(*p, response_for("strong"), FuzzInput{{-1286467063}, {0}, {}});
  CHECK(prompt.find(R"({"a":[-1286467063],"b":[0],"c":[]})") != std::string::npos);
  CHECK(prompt.find("returns 'false' - indicating that the inputs do not satisfy the given precondition, but still "
                    "result in a succesful execution of 'foo'") != std::string::npos);
  CHECK(ends_with(prompt, "Reason through your solution internally."));
  CHECK(prompt.find("runtime error") == std::string::npos);
  std::string noted = render_repair_weakness_prompt(*p, response_for("strong"), FuzzInput{},
                                                    minilang::PreconditionFault::OutOfBoundsInPrecondition);
  CHECK(noted.find("OutOfBoundsInPrecondition") != std::string::npos);
}

TEST_CASE("sha256 of known strings") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("prompt kinds round-trip by name") {
  for (auto k : {PromptKind::InitialWp, PromptKind::RepairValidity, PromptKind::RepairWeakness}) {
    CHECK(prompt_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(prompt_kind_from_string("other"), std::invalid_argument);
}

TEST_CASE("scripted provider pops responses then runs dry") {
  ScriptedProvider s({{std::nullopt, "first"}});
  auto ex = s.complete(ctx("p"), make_request("hi"));
  CHECK(ex.response.text == "first");
  CHECK(ex.request.messages.size() == 1);
  try {
    s.complete(ctx("p"), make_request("hi"));
    FAIL("expected exhaustion");
  } catch (const ProviderError& e) {
    CHECK(e.kind() == ProviderError::Kind::ExhaustedTranscript);
  }
}

TEST_CASE("scripted provider serves keyed entries before the shared queue") {
  ScriptedProvider s({{"x", "x1"}, {std::nullopt, "shared"}, {"y", "y1"}, {"x", "x2"}});
  CHECK(s.complete(ctx("y"), make_request("")).response.text == "y1");
  CHECK(s.complete(ctx("x"), make_request("")).response.text == "x1");
  CHECK(s.complete(ctx("x"), make_request("")).response.text == "x2");
  CHECK(s.complete(ctx("x"), make_request("")).response.text == "shared");
  CHECK_THROWS_AS(s.complete(ctx("y"), make_request("")), ProviderError);
}

TEST_CASE("recording then replaying a transcript") {
  auto path = temp_file("record.jsonl");
  {
    auto inner = std::make_shared<ScriptedProvider>(std::vector<ScriptEntry>{{std::nullopt, "one"}, {std::nullopt, "two"}});
    RecordingProvider rec(inner, path);
    rec.complete(ctx("p", PromptKind::InitialWp, "aaa"), make_request("prompt-1"));
    rec.complete(ctx("p", PromptKind::RepairValidity, "bbb"), make_request("prompt-2"));
  }
  auto entries = read_transcript(path);
  REQUIRE(entries.size() == 2);
  CHECK(entries[1].prompt_kind == PromptKind::RepairValidity);
  CHECK(entries[1].request.messages[0].content == "prompt-2");

  ReplayProvider replay(entries);
  CHECK(replay.complete(ctx("p", PromptKind::InitialWp, "aaa"), make_request("prompt-1")).response.text == "one");
  try {
    replay.complete(ctx("p", PromptKind::RepairValidity, "zzz"), make_request("other"));
    FAIL("expected divergence");
  } catch (const ProviderError& e) {
    CHECK(e.kind() == ProviderError::Kind::Divergence);
  }

  ReplayProvider lenient(entries, true);
  lenient.complete(ctx("p", PromptKind::InitialWp, "aaa"), make_request(""));
  CHECK(lenient.complete(ctx("p", PromptKind::RepairValidity, "zzz"), make_request("")).response.text == "two");
  CHECK(lenient.divergences() == 1);
  CHECK_THROWS_AS(lenient.complete(ctx("p"), make_request("")), ProviderError);
  CHECK_THROWS_AS(lenient.complete(ctx("other"), make_request("")), ProviderError);
}

TEST_CASE("http provider against a local endpoint") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::atomic<int> flaky{0};
  std::string seen_auth;
  std::string seen_body;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    if (seen_auth == "Bearer bad") {
      res.status = 401;
      return;
    }
    if (seen_auth == "Bearer flaky" && flaky++ < 2) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"ok"}}],"usage":{"prompt_tokens":3,"completion_tokens":1}})",
                    "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  cfg.model = "test-model";
  cfg.initial_backoff = std::chrono::milliseconds(1);

  SUBCASE("success") {
    cfg.api_key = "good";
    HttpProvider http(cfg);
    auto ex = http.complete(ctx("p"), make_request("hello"));
    CHECK(ex.response.text == "ok");
    CHECK(ex.response.prompt_tokens == 3u);
    auto body = nlohmann::json::parse(seen_body);
    CHECK(body["model"] == "test-model");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["messages"][0]["content"] == "hello");
  }
  SUBCASE("auth failure is not retried") {
    cfg.api_key = "bad";
    HttpProvider http(cfg);
    try {
      http.complete(ctx("p"), make_request("hello"));
      FAIL("expected auth error");
    } catch (const ProviderError& e) {
      CHECK(e.kind() == ProviderError::Kind::Auth);
      CHECK(std::string(e.what()).find("bad") == std::string::npos);
    }
    CHECK(hits == 1);
  }
  SUBCASE("transient failures are retried") {
    cfg.api_key = "flaky";
    HttpProvider http(cfg);
    CHECK(http.complete(ctx("p"), make_request("x")).response.text == "ok");
    CHECK(hits == 3);
  }
  SUBCASE("retries are bounded") {
    cfg.api_key = "flaky";
    cfg.max_retries = 1;
    HttpProvider http(cfg);
    try {
      http.complete(ctx("p"), make_request("x"));
      FAIL("expected network error");
    } catch (const ProviderError& e) {
      CHECK(e.kind() == ProviderError::Kind::Network);
    }
    CHECK(hits == 2);
  }
  SUBCASE("missing key") {
    HttpProvider http(cfg);
    CHECK_THROWS_AS(http.complete(ctx("p"), make_request("x")), ProviderError);
    CHECK(hits == 0);
  }
  server.stop();
  th.join();
}

TEST_CASE("http provider rejects malformed base urls") {
  HttpConfig cfg;
  cfg.base_url = "ftp://example";
  CHECK_THROWS_AS(HttpProvider{cfg}, std::invalid_argument);
}

TEST_CASE("extracting the final candidate keeps its comment") {
  auto p = minilang::load_program(copy_sort_source());
  auto c = extract_candidate(response_for("final"), *p);
  REQUIRE(c.program->precondition() != nullptr);
  CHECK(c.comment.find("sorted ascending") != std::string::npos);
  CHECK(minilang::eval_precondition(*c.program, {{1, 2}, {0, 0}, {}}).holds);
}

TEST_CASE("extraction strips fences and preamble") {
  auto p = minilang::load_program(copy_sort_source());
  auto fenced = "Here you go:\n```java\n" + response_for("regressed") + "```\nDone.";
  CHECK_NOTHROW(extract_candidate(fenced, *p));
  auto chatty = "Sure, here is the program.\n\n" + response_for("regressed");
  CHECK_NOTHROW(extract_candidate(chatty, *p));
}

TEST_CASE("extraction error kinds") {
  auto p = minilang::load_program(copy_sort_source());
  auto kind_of = [&](const std::string& text) {
    try {
      extract_candidate(text, *p);
    } catch (const ExtractionError& e) {
      return e.kind();
    }
    FAIL("expected an extraction error");
    return ExtractionError::Kind::Unparsable;
  };
  using K = ExtractionError::Kind;
  CHECK(kind_of("The weakest precondition is that a is sorted.") == K::Unparsable);
  CHECK(kind_of("") == K::Unparsable);
  std::string mutated = response_for("final");
  auto pos = mutated.find("throw;");
  mutated.replace(pos, 6, "return 1;");
  CHECK(kind_of(mutated) == K::FooMutated);
  CHECK(kind_of(motivating_candidate("final")) == K::FooMutated);
  CHECK(kind_of(copy_sort_source()) == K::MissingPrecondition);
  CHECK(kind_of(copy_sort_source() + "bool precondition(int[] a, int[] b, int[] c) { return 1; }") == K::TypeError);
  CHECK(kind_of(copy_sort_source() + "int precondition(int[] a, int[] b, int[] c) { return 1; }") == K::TypeError);
}

TEST_CASE("extraction round-trips a printed candidate") {
  auto p = minilang::load_program(copy_sort_source());
  auto c = extract_candidate(response_for("strong"), *p);
  auto again = extract_candidate(minilang::print_program(*c.program), *p);
  CHECK(minilang::same_function(*again.program->precondition(), *c.program->precondition()));
}
