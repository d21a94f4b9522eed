#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmvis/dialogue.hpp"
#include "pmvis/executor.hpp"
#include "pmvis/llm.hpp"

namespace pmvis {

enum class ToolId { Syntax, Schema, Exec, Intent };

std::string to_string(ToolId id);
std::optional<ToolId> tool_from_string(const std::string& name);

struct ToolVerdict {
  ToolId tool = ToolId::Syntax;
  bool passed = false;
  std::string diagnostic;  // non-empty whenever passed is false
  std::optional<ResultTable> result;                 // exec only
  std::optional<ClarificationRequest> clarification;  // intent only
};

/// Grammar membership: passed iff the candidate parses.
ToolVerdict tool_syntax(const std::string& candidate);

/// Schema grounding: referenced tables and columns must exist in the catalog.
/// The diagnostic lists each unknown identifier with a nearest-name
/// suggestion (edit distance <= 2, or token containment for names like
/// `address` inside `Street_address`).
ToolVerdict tool_schema(const std::string& candidate, const Database& db);

/// Runs the query. Passed iff execution succeeds and the result is
/// non-empty; the verdict carries the result table. Callers must have
/// established syntax and schema verdicts first — the executor itself raises
/// ContractViolation on ungrounded input.
ToolVerdict tool_exec(const std::string& candidate, const Database& db);

/// Intent matcher. Deterministic heuristic by default: flags (a) a chart
/// keyword in the dialogue contradicting the VISUALIZE clause, (b) a noun
/// phrase fuzzy-matching two or more schema columns none of which the
/// candidate uses, (c) the candidate aggregating a column the request asks
/// for raw ("compare the <col>", "show the <col>"). With an LLM, the
/// judgment is delegated. A flagged verdict carries a ClarificationRequest.
ToolVerdict tool_intent(const std::string& candidate,
                        const DialogueStatus& status, const Database& db,
                        LlmClient* llm = nullptr);

/// Nearest catalog name for a typo, or nullopt when nothing is close.
std::optional<std::string> suggest_name(const std::string& unknown,
                                        const std::vector<std::string>& candidates);

}  // namespace pmvis
