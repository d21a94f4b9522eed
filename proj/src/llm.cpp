#include "pmvis/llm.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "pmvis/errors.hpp"
#include "pmvis/text_util.hpp"

namespace pmvis {

std::int64_t mock_token_count(const std::string& text) {
  return static_cast<std::int64_t>(whitespace_tokens(text).size());
}

std::int64_t mock_token_count(const std::vector<LlmMessage>& messages) {
  std::int64_t total = 0;
  for (const auto& m : messages) total += mock_token_count(m.content);
  return total;
}

ScriptedMock::ScriptedMock(std::vector<Entry> entries) {
  for (auto& e : entries) replies_[{e.round, e.step}] = std::move(e.reply);
}

ScriptedMock ScriptedMock::from_jsonl(const std::string& text) {
  std::vector<Entry> entries;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw LlmError("malformed script line: " + std::string(e.what()));
    }
    Entry e;
    e.round = j.at("round").get<int>();
    e.step = j.at("step").get<int>();
    e.reply = j.at("reply").get<std::string>();
    entries.push_back(std::move(e));
  }
  return ScriptedMock(std::move(entries));
}

ScriptedMock ScriptedMock::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LlmError("cannot open script file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

LlmReply ScriptedMock::complete(const LlmRequest& request) {
  auto it = replies_.find({request.round, request.step});
  if (it == replies_.end())
    throw LlmError("no scripted reply for round " +
                   std::to_string(request.round) + " step " +
                   std::to_string(request.step));
  LlmReply reply;
  reply.text = it->second;
  reply.prompt_tokens = mock_token_count(request.messages);
  reply.completion_tokens = mock_token_count(reply.text);
  return reply;
}

HttpClient::HttpClient(std::string url, std::string api_key, std::string model)
    : url_(std::move(url)), api_key_(std::move(api_key)), model_(std::move(model)) {}

HttpClient HttpClient::from_env() {
  const char* url = std::getenv("PMVIS_LLM_URL");
  if (!url || !*url) throw LlmError("PMVIS_LLM_URL is not set");
  const char* key = std::getenv("PMVIS_LLM_KEY");
  const char* model = std::getenv("PMVIS_LLM_MODEL");
  return HttpClient(url, key ? key : "", model ? model : "gpt-4o-mini");
}

LlmReply HttpClient::complete(const LlmRequest& request) {
  // Split scheme://host[:port] from the path.
  auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) throw LlmError("bad endpoint URL: " + url_);
  auto path_start = url_.find('/', scheme_end + 3);
  std::string base = path_start == std::string::npos ? url_ : url_.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);

  nlohmann::json body;
  body["model"] = model_;
  body["messages"] = nlohmann::json::array();
  for (const auto& m : request.messages)
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  body["temperature"] = 0;

  httplib::Client client(base);
  client.set_read_timeout(120, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) throw LlmError("request to " + url_ + " failed: " +
                           httplib::to_string(res.error()));
  if (res->status != 200)
    throw LlmError("endpoint returned HTTP " + std::to_string(res->status) +
                   ": " + res->body);

  try {
    auto j = nlohmann::json::parse(res->body);
    LlmReply reply;
    reply.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage")) {
      reply.prompt_tokens = j["usage"].value("prompt_tokens", 0);
      reply.completion_tokens = j["usage"].value("completion_tokens", 0);
    }
    return reply;
  } catch (const nlohmann::json::exception& e) {
    throw LlmError("malformed completion response: " + std::string(e.what()));
  }
}

}  // namespace pmvis
