#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pmvis {

struct LlmMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct LlmReply {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

/// One completion request. Round/step/purpose are routing metadata for
/// scripted replay; the HTTP client ignores them.
struct LlmRequest {
  std::vector<LlmMessage> messages;
  int round = 0;
  int step = 0;  // 0 = System Agent translation, >= 1 = validation steps
  std::string purpose;  // "system" | "validate" | "nlq"
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual LlmReply complete(const LlmRequest& request) = 0;

  /// Deterministic clients replay byte-identically, so transcripts record a
  /// zero wall clock for them instead of measured time.
  virtual bool deterministic() const { return false; }
};

/// Replays canned replies keyed by (round, step). Token counts are
/// whitespace-token counts. A missing key raises LlmError.
class ScriptedMock : public LlmClient {
 public:
  struct Entry {
    int round = 0;
    int step = 0;
    std::string reply;
  };

  explicit ScriptedMock(std::vector<Entry> entries);

  /// JSON Lines, one {"round", "step", "reply"} object per line.
  static ScriptedMock from_jsonl(const std::string& text);
  static ScriptedMock from_file(const std::filesystem::path& path);

  LlmReply complete(const LlmRequest& request) override;
  bool deterministic() const override { return true; }

 private:
  std::map<std::pair<int, int>, std::string> replies_;
};

/// Chat-completions style HTTP client: POST {model, messages, temperature: 0}
/// to the configured endpoint, Authorization: Bearer <key> when a key is set.
/// Token counts come from the provider's usage fields.
class HttpClient : public LlmClient {
 public:
  HttpClient(std::string url, std::string api_key, std::string model);

  /// Reads PMVIS_LLM_URL / PMVIS_LLM_KEY / PMVIS_LLM_MODEL.
  static HttpClient from_env();

  LlmReply complete(const LlmRequest& request) override;

 private:
  std::string url_, api_key_, model_;
};

/// Whitespace-token count used by deterministic clients.
std::int64_t mock_token_count(const std::vector<LlmMessage>& messages);
std::int64_t mock_token_count(const std::string& text);

}  // namespace pmvis
