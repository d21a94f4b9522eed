#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmvis/tools.hpp"

namespace pmvis {

struct PermissionDecision {
  std::string action;
  bool allowed = false;
  std::optional<std::string> blocking_rule;  // "VA2" | "VA3"
};

/// One ReAct step as recorded in the transcript. `verdict_passed` and the
/// candidate fields make the precedence audits replayable.
struct TraceStep {
  int step = 0;
  std::string thought;
  std::string proposed_action;  // what the model asked for
  std::string executed_action;  // what actually ran ("final" terminates)
  bool tool_ran = false;
  bool verdict_passed = false;
  std::string observation;
  std::string candidate_before;
  std::string candidate_after;
  bool policy_violation = false;
  std::optional<std::string> blocking_rule;
};

/// Validation state at step t: the candidate, the dialogue status, and the
/// latest verdict per tool together with the candidate string it was issued
/// for. A verdict is stale — and grants nothing — once the candidate changes.
struct ValidationState {
  std::string candidate;
  DialogueStatus status;
  int step = 0;

  struct Issued {
    bool passed = false;
    std::string for_candidate;
  };
  std::map<ToolId, Issued> last_verdicts;

  void record(ToolId tool, bool passed) {
    last_verdicts[tool] = {passed, candidate};
  }
  bool current_pass(ToolId tool) const {
    auto it = last_verdicts.find(tool);
    return it != last_verdicts.end() && it->second.passed &&
           it->second.for_candidate == candidate;
  }
};

/// The permission predicate. syntax is always allowed; schema/exec/intent
/// need a passing syntax verdict for the current candidate (VA2); exec
/// additionally needs a passing schema verdict (VA3).
PermissionDecision permission(const ValidationState& st, ToolId action);

struct LlmCallRecord {
  std::string purpose;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct Clarification {
  std::string question;
  std::string kind;  // "disambiguation" | "ground_truth_probe"
  std::string answer;
  bool refused = false;
};

struct ValidationOutcome {
  std::string clarified_vql;
  std::vector<TraceStep> trace;
  std::vector<LlmCallRecord> llm_calls;
  std::vector<Clarification> clarifications;
  int tool_calls = 0;
  int policy_violations = 0;
};

using ClarifyFn =
    std::function<std::optional<std::string>(const ClarificationRequest&)>;

/// The bounded ReAct loop. Each step asks the model for a thought plus either
/// an action or a final answer (optionally updating the candidate);
/// permission() gates every action. A blocked proposal is logged as a policy
/// violation and the syntax action runs in its place, so the loop stays
/// bounded and no forbidden tool ever executes. Ends on "Final Answer" or
/// after m steps, returning the current candidate.
ValidationOutcome validate(const std::string& nlq, const std::string& v_gen,
                           const DialogueStatus& status, const Database& db,
                           LlmClient& llm, int m, const ClarifyFn& clarify,
                           LlmClient* intent_llm = nullptr);

}  // namespace pmvis
