#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pmvis/validation.hpp"

namespace pmvis {

struct RoundRecord {
  int round = 0;
  std::string nlq;
  std::string v_gen;
  std::string v_cla;
  std::vector<TraceStep> trace;
  std::vector<Clarification> clarifications;
  std::vector<LlmCallRecord> llm_calls;
  int tool_calls = 0;
  double wall_time_ms = 0.0;
};

/// Audited record of one session: per-round traces, clarifications, token
/// counts, tool-call counts and wall time, plus the invariant checks.
struct SessionTranscript {
  std::string session_id;
  std::string db_id;
  int m = 10;
  bool complete = true;
  std::string error;
  std::vector<RoundRecord> rounds;

  int total_tool_calls() const;
  std::int64_t total_prompt_tokens() const;
  std::int64_t total_completion_tokens() const;
  double total_wall_time_ms() const;
  int total_policy_violations() const;

  nlohmann::ordered_json to_json() const;
  static SessionTranscript from_json(const nlohmann::json& j);
};

/// Replays every trace and checks tool-action precedence: schema/exec/intent
/// only after a passing syntax verdict for the identical candidate string,
/// exec additionally after a passing schema verdict.
bool audit_precedence(const SessionTranscript& t);

/// Total tool invocations bounded by rounds * m, and at most one tool per
/// ReAct step.
bool audit_tool_bound(const SessionTranscript& t);

/// Translates the current status into a candidate VQL via the fixed prompt
/// template. The fenced reply block is canonicalized when parseable and
/// passed through raw otherwise; a reply without a fence raises
/// ExtractionError. `usage`, when given, receives the call's token counts.
std::string system_translate(const DialogueStatus& status, const Database& db,
                             LlmClient& llm, LlmCallRecord* usage = nullptr);

/// Runs one full session: issue, translate, validate, thread history.
/// LLM failures abort with a partial transcript flagged incomplete.
/// The intent matcher stays on its deterministic heuristic unless
/// `llm_intent` hands the judgment to the model.
SessionTranscript run_session(const Trajectory& traj, const Database& db,
                              LlmClient& llm, int m = 10,
                              bool llm_intent = false);

std::vector<SessionTranscript> read_transcripts_jsonl(const std::string& text);
std::string write_transcripts_jsonl(const std::vector<SessionTranscript>& ts);

}  // namespace pmvis
