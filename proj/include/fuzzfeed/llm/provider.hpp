#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fuzzfeed/llm/prompts.hpp"
#include "json.hpp"

namespace fuzzfeed::llm {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  std::string model;
  double temperature = 0.0;
};

struct ChatResponse {
  std::string text;
  std::optional<std::uint64_t> prompt_tokens;
  std::optional<std::uint64_t> completion_tokens;
};

struct ChatExchange {
  ChatRequest request;
  ChatResponse response;
  std::string timestamp;  // UTC, ISO 8601
};

void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);
void to_json(nlohmann::json& j, const ChatRequest& r);
void from_json(const nlohmann::json& j, ChatRequest& r);

/// What the orchestrator knows about a request; used for keying and divergence checks.
struct RequestContext {
  std::string program_id;
  PromptKind kind = PromptKind::InitialWp;
  std::string prompt_hash;
  int attempt = 1;
};

/// A single-user-message request for `prompt`.
ChatRequest make_request(std::string prompt, std::string model = {}, double temperature = 0.0);

std::string utc_timestamp();

class ProviderError : public std::runtime_error {
 public:
  enum class Kind { Network, Auth, ExhaustedTranscript, Divergence, Protocol };

  ProviderError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(ProviderError::Kind kind);

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  /// Thread-safe. Throws ProviderError.
  virtual ChatExchange complete(const RequestContext& context, const ChatRequest& request) = 0;
  virtual std::string describe() const = 0;
};

// ---------------------------------------------------------------------------
// Scripted: a fixed list of responses. Entries carrying a program_id are served
// only to that program; the rest form a shared queue used once a program's own
// entries run out.

struct ScriptEntry {
  std::optional<std::string> program_id;
  std::string response;
};

class ScriptedProvider : public ChatProvider {
 public:
  explicit ScriptedProvider(std::vector<ScriptEntry> entries);
  static std::unique_ptr<ScriptedProvider> from_file(const std::filesystem::path& path);

  ChatExchange complete(const RequestContext& context, const ChatRequest& request) override;
  std::string describe() const override { return "scripted"; }

 private:
  std::mutex mu_;
  std::map<std::string, std::deque<std::string>> keyed_;
  std::deque<std::string> shared_;
};

// ---------------------------------------------------------------------------
// Transcripts: one JSON object per line.

struct TranscriptEntry {
  std::string program_id;
  PromptKind prompt_kind = PromptKind::InitialWp;
  std::string prompt_hash;
  ChatRequest request;
  std::string response;
  std::string timestamp;
};

void to_json(nlohmann::json& j, const TranscriptEntry& e);
void from_json(const nlohmann::json& j, TranscriptEntry& e);

std::vector<TranscriptEntry> read_transcript(const std::filesystem::path& path);

/// Serves recorded responses in order, per program id. A prompt hash or kind
/// that differs from the recording is a Divergence unless `lenient`.
class ReplayProvider : public ChatProvider {
 public:
  ReplayProvider(std::vector<TranscriptEntry> entries, bool lenient = false);
  static std::unique_ptr<ReplayProvider> from_file(const std::filesystem::path& path, bool lenient = false);

  ChatExchange complete(const RequestContext& context, const ChatRequest& request) override;
  std::string describe() const override { return "replay"; }

  /// Hash mismatches tolerated in lenient mode.
  std::size_t divergences() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::deque<TranscriptEntry>> queues_;
  bool lenient_;
  std::size_t divergences_ = 0;
};

// ---------------------------------------------------------------------------
// HTTP: any chat-completions compatible endpoint.

struct HttpConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  double temperature = 0.0;
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::seconds timeout{120};
  std::string api_key;
};

/// FUZZFEED_API_KEY, else OPENAI_API_KEY, else empty.
std::string api_key_from_environment();

class HttpProvider : public ChatProvider {
 public:
  explicit HttpProvider(HttpConfig config);

  ChatExchange complete(const RequestContext& context, const ChatRequest& request) override;
  std::string describe() const override;

 private:
  HttpConfig config_;
  std::string scheme_host_;
  std::string path_prefix_;
};

/// Forwards to `inner` and appends each exchange to a transcript file.
class RecordingProvider : public ChatProvider {
 public:
  RecordingProvider(std::shared_ptr<ChatProvider> inner, const std::filesystem::path& path);

  ChatExchange complete(const RequestContext& context, const ChatRequest& request) override;
  std::string describe() const override { return inner_->describe() + "+record"; }

 private:
  std::shared_ptr<ChatProvider> inner_;
  std::mutex mu_;
  std::ofstream out_;
};

}  // namespace fuzzfeed::llm
