#include "httplib.h"

#include <cstdlib>
#include <ctime>
#include <regex>
#include <thread>

#include "fuzzfeed/llm/provider.hpp"

namespace fuzzfeed::llm {

using nlohmann::json;

void to_json(json& j, const ChatMessage& m) { j = json{{"role", m.role}, {"content", m.content}}; }
void from_json(const json& j, ChatMessage& m) {
  m.role = j.at("role").get<std::string>();
  m.content = j.at("content").get<std::string>();
}

void to_json(json& j, const ChatRequest& r) {
  j = json{{"model", r.model}, {"temperature", r.temperature}, {"messages", r.messages}};
}
void from_json(const json& j, ChatRequest& r) {
  r.model = j.value("model", std::string{});
  r.temperature = j.value("temperature", 0.0);
  r.messages = j.at("messages").get<std::vector<ChatMessage>>();
}

ChatRequest make_request(std::string prompt, std::string model, double temperature) {
  ChatRequest r;
  r.messages.push_back({"user", std::move(prompt)});
  r.model = std::move(model);
  r.temperature = temperature;
  return r;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view to_string(ProviderError::Kind kind) {
  switch (kind) {
    case ProviderError::Kind::Network: return "network";
    case ProviderError::Kind::Auth: return "auth";
    case ProviderError::Kind::ExhaustedTranscript: return "exhausted-transcript";
    case ProviderError::Kind::Divergence: return "divergence";
    case ProviderError::Kind::Protocol: return "protocol";
  }
  return "?";
}

namespace {

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

ChatExchange exchange_for(const ChatRequest& request, std::string text) {
  ChatExchange ex;
  ex.request = request;
  ex.response.text = std::move(text);
  ex.timestamp = utc_timestamp();
  return ex;
}

}  // namespace

// ---------------------------------------------------------------------------

ScriptedProvider::ScriptedProvider(std::vector<ScriptEntry> entries) {
  for (auto& e : entries) {
    if (e.program_id) {
      keyed_[*e.program_id].push_back(std::move(e.response));
    } else {
      shared_.push_back(std::move(e.response));
    }
  }
}

std::unique_ptr<ScriptedProvider> ScriptedProvider::from_file(const std::filesystem::path& path) {
  std::vector<ScriptEntry> entries;
  for (const auto& row : read_jsonl(path)) {
    ScriptEntry e;
    e.response = row.at("response").get<std::string>();
    if (row.contains("program_id")) e.program_id = row["program_id"].get<std::string>();
    entries.push_back(std::move(e));
  }
  return std::make_unique<ScriptedProvider>(std::move(entries));
}

ChatExchange ScriptedProvider::complete(const RequestContext& context, const ChatRequest& request) {
  std::lock_guard lock(mu_);
  std::deque<std::string>* queue = nullptr;
  if (auto it = keyed_.find(context.program_id); it != keyed_.end() && !it->second.empty()) {
    queue = &it->second;
  } else if (!shared_.empty()) {
    queue = &shared_;
  } else {
    throw ProviderError(ProviderError::Kind::ExhaustedTranscript,
                        "scripted responses exhausted for '" + context.program_id + "'");
  }
  std::string text = std::move(queue->front());
  queue->pop_front();
  return exchange_for(request, std::move(text));
}

// ---------------------------------------------------------------------------

void to_json(json& j, const TranscriptEntry& e) {
  j = json{{"program_id", e.program_id},
           {"prompt_kind", to_string(e.prompt_kind)},
           {"prompt_hash", e.prompt_hash},
           {"request", e.request},
           {"response", e.response},
           {"timestamp", e.timestamp}};
}

void from_json(const json& j, TranscriptEntry& e) {
  e.program_id = j.at("program_id").get<std::string>();
  e.prompt_kind = prompt_kind_from_string(j.at("prompt_kind").get<std::string>());
  e.prompt_hash = j.at("prompt_hash").get<std::string>();
  e.request = j.at("request").get<ChatRequest>();
  e.response = j.at("response").get<std::string>();
  e.timestamp = j.value("timestamp", std::string{});
}

std::vector<TranscriptEntry> read_transcript(const std::filesystem::path& path) {
  std::vector<TranscriptEntry> out;
  for (const auto& row : read_jsonl(path)) {
    try {
      out.push_back(row.get<TranscriptEntry>());
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": bad transcript entry: " + e.what());
    }
  }
  return out;
}

ReplayProvider::ReplayProvider(std::vector<TranscriptEntry> entries, bool lenient) : lenient_(lenient) {
  for (auto& e : entries) queues_[e.program_id].push_back(std::move(e));
}

std::unique_ptr<ReplayProvider> ReplayProvider::from_file(const std::filesystem::path& path, bool lenient) {
  return std::make_unique<ReplayProvider>(read_transcript(path), lenient);
}

ChatExchange ReplayProvider::complete(const RequestContext& context, const ChatRequest& request) {
  std::lock_guard lock(mu_);
  auto it = queues_.find(context.program_id);
  if (it == queues_.end() || it->second.empty()) {
    throw ProviderError(ProviderError::Kind::ExhaustedTranscript,
                        "transcript has no more entries for '" + context.program_id + "'");
  }
  TranscriptEntry entry = std::move(it->second.front());
  it->second.pop_front();
  if (entry.prompt_kind != context.kind || entry.prompt_hash != context.prompt_hash) {
    if (!lenient_) {
      throw ProviderError(ProviderError::Kind::Divergence,
                          "request for '" + context.program_id + "' (" + std::string(to_string(context.kind)) +
                              ", " + context.prompt_hash.substr(0, 12) + ") differs from the recording (" +
                              std::string(to_string(entry.prompt_kind)) + ", " + entry.prompt_hash.substr(0, 12) +
                              ")");
    }
    ++divergences_;
  }
  ChatExchange ex = exchange_for(request, std::move(entry.response));
  ex.timestamp = entry.timestamp;
  return ex;
}

std::size_t ReplayProvider::divergences() const {
  std::lock_guard lock(mu_);
  return divergences_;
}

// ---------------------------------------------------------------------------

std::string api_key_from_environment() {
  for (const char* name : {"FUZZFEED_API_KEY", "OPENAI_API_KEY"}) {
    if (const char* v = std::getenv(name); v != nullptr && *v != '\0') return v;
  }
  return {};
}

HttpProvider::HttpProvider(HttpConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, url)) {
    throw std::invalid_argument("base URL must look like http(s)://host[:port][/path]: " + config_.base_url);
  }
  scheme_host_ = m[1].str();
  path_prefix_ = m[2].str();
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (config_.max_retries < 0) throw std::invalid_argument("max_retries must be non-negative");
}

std::string HttpProvider::describe() const { return "http(" + config_.base_url + ", " + config_.model + ")"; }

ChatExchange HttpProvider::complete(const RequestContext& /*context*/, const ChatRequest& request) {
  if (config_.api_key.empty()) {
    throw ProviderError(ProviderError::Kind::Auth, "no API key: set FUZZFEED_API_KEY or OPENAI_API_KEY");
  }
  ChatRequest req = request;
  if (req.model.empty()) req.model = config_.model;
  req.temperature = config_.temperature;

  httplib::Client client(scheme_host_);
  client.set_connection_timeout(std::chrono::seconds(30));
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(std::chrono::seconds(30));
  httplib::Headers headers{{"Authorization", "Bearer " + config_.api_key}};
  const std::string body = json(req).dump();
  const std::string path = path_prefix_ + "/chat/completions";

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.initial_backoff * (1 << (attempt - 1)));
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "network error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw ProviderError(ProviderError::Kind::Auth, "endpoint rejected the API key (HTTP " +
                                                         std::to_string(res->status) + ")");
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProviderError(ProviderError::Kind::Protocol, "unexpected HTTP " + std::to_string(res->status));
    }
    try {
      json reply = json::parse(res->body);
      ChatExchange ex;
      ex.request = req;
      ex.response.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      if (reply.contains("usage")) {
        const auto& u = reply["usage"];
        if (u.contains("prompt_tokens")) ex.response.prompt_tokens = u["prompt_tokens"].get<std::uint64_t>();
        if (u.contains("completion_tokens")) {
          ex.response.completion_tokens = u["completion_tokens"].get<std::uint64_t>();
        }
      }
      ex.timestamp = utc_timestamp();
      return ex;
    } catch (const json::exception& e) {
      throw ProviderError(ProviderError::Kind::Protocol, std::string("malformed completion body: ") + e.what());
    }
  }
  throw ProviderError(ProviderError::Kind::Network,
                      "giving up after " + std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

// ---------------------------------------------------------------------------

RecordingProvider::RecordingProvider(std::shared_ptr<ChatProvider> inner, const std::filesystem::path& path)
    : inner_(std::move(inner)), out_(path, std::ios::app) {
  if (!out_) throw std::runtime_error("cannot open transcript " + path.string());
}

ChatExchange RecordingProvider::complete(const RequestContext& context, const ChatRequest& request) {
  ChatExchange ex = inner_->complete(context, request);
  TranscriptEntry e;
  e.program_id = context.program_id;
  e.prompt_kind = context.kind;
  e.prompt_hash = context.prompt_hash;
  e.request = ex.request;
  e.response = ex.response.text;
  e.timestamp = ex.timestamp;
  std::lock_guard lock(mu_);
  out_ << json(e).dump() << '\n';
  out_.flush();
  return ex;
}

}  // namespace fuzzfeed::llm
