#include "pmvis/validation.hpp"

#include <sstream>

#include "pmvis/errors.hpp"
#include "pmvis/prompts.hpp"
#include "pmvis/text_util.hpp"

namespace pmvis {

PermissionDecision permission(const ValidationState& st, ToolId action) {
  PermissionDecision d;
  d.action = to_string(action);
  if (action == ToolId::Syntax) {
    d.allowed = true;
    return d;
  }
  if (!st.current_pass(ToolId::Syntax)) {
    d.allowed = false;
    d.blocking_rule = "VA2";
    return d;
  }
  if (action == ToolId::Exec && !st.current_pass(ToolId::Schema)) {
    d.allowed = false;
    d.blocking_rule = "VA3";
    return d;
  }
  d.allowed = true;
  return d;
}

namespace {

struct ParsedReply {
  std::string thought;
  std::optional<std::string> final_answer;  // set when the reply finishes
  std::string action_text;                  // raw action token
  std::optional<std::string> updated_candidate;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

ParsedReply parse_reply(const std::string& text) {
  ParsedReply out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string lower = ascii_lower(line);
    auto value_after = [&](std::size_t prefix_len) {
      return trim(line.substr(prefix_len));
    };
    if (lower.rfind("final answer:", 0) == 0) {
      out.final_answer = value_after(13);
    } else if (lower.rfind("thought:", 0) == 0) {
      out.thought = value_after(8);
    } else if (lower.rfind("action:", 0) == 0) {
      out.action_text = value_after(7);
    } else if (lower.rfind("candidate:", 0) == 0) {
      out.updated_candidate = value_after(10);
    }
  }
  // A fenced block after "Final Answer:" carries the VQL when the line is bare.
  if (out.final_answer && out.final_answer->empty()) {
    try {
      out.final_answer = extract_vql_block(text);
    } catch (const ExtractionError&) {
      // keep the empty marker; the loop falls back to the current candidate
    }
  }
  return out;
}

std::string canonical_or_raw(const std::string& vql) {
  try {
    return assemble(parse(vql));
  } catch (const SyntaxError&) {
    return vql;
  }
}

ToolVerdict run_tool(ToolId tool, const ValidationState& st, const Database& db,
                     LlmClient* intent_llm) {
  switch (tool) {
    case ToolId::Syntax: return tool_syntax(st.candidate);
    case ToolId::Schema: return tool_schema(st.candidate, db);
    case ToolId::Exec: return tool_exec(st.candidate, db);
    case ToolId::Intent:
      return tool_intent(st.candidate, st.status, db, intent_llm);
  }
  throw Error("unknown tool");
}

}  // namespace

ValidationOutcome validate(const std::string& nlq, const std::string& v_gen,
                           const DialogueStatus& status, const Database& db,
                           LlmClient& llm, int m, const ClarifyFn& clarify,
                           LlmClient* intent_llm) {
  if (m < 1) throw Error("validation step bound m must be >= 1");

  ValidationState st;
  st.candidate = v_gen;
  st.status = status;

  ValidationOutcome out;
  std::vector<std::string> observations;

  for (int t = 1; t <= m; ++t) {
    st.step = t;
    LlmRequest req;
    req.messages = {
        {"user", build_validation_prompt(nlq, st.candidate, db, observations)}};
    req.round = status.round;
    req.step = t;
    req.purpose = "validate";
    LlmReply reply = llm.complete(req);
    out.llm_calls.push_back({"validate", reply.prompt_tokens, reply.completion_tokens});

    ParsedReply parsed = parse_reply(reply.text);

    TraceStep trace;
    trace.step = t;
    trace.thought = parsed.thought.empty() ? trim(reply.text).substr(0, 200)
                                           : parsed.thought;
    trace.candidate_before = st.candidate;

    if (parsed.final_answer) {
      if (!parsed.final_answer->empty())
        st.candidate = canonical_or_raw(*parsed.final_answer);
      trace.proposed_action = "final";
      trace.executed_action = "final";
      trace.observation = "final answer";
      trace.candidate_after = st.candidate;
      out.trace.push_back(std::move(trace));
      break;
    }

    auto proposed = tool_from_string(trim(parsed.action_text));
    trace.proposed_action =
        parsed.action_text.empty() ? "none" : trim(parsed.action_text);

    ToolId executed = ToolId::Syntax;
    if (proposed) {
      PermissionDecision decision = permission(st, *proposed);
      if (decision.allowed) {
        executed = *proposed;
      } else {
        // Blocked proposal: log the violation and fall back to the
        // highest-priority allowed action instead of failing the session.
        trace.policy_violation = true;
        trace.blocking_rule = decision.blocking_rule;
        ++out.policy_violations;
        executed = ToolId::Syntax;
      }
    }
    // An unparseable action also falls back to syntax, without counting as a
    // policy violation: nothing was proposed that the rules could block.

    // Precedence invariant, asserted independently of permission().
    if (executed != ToolId::Syntax && !st.current_pass(ToolId::Syntax))
      throw std::logic_error("precedence breach: tool before syntax pass");
    if (executed == ToolId::Exec && !st.current_pass(ToolId::Schema))
      throw std::logic_error("precedence breach: exec before schema pass");

    ToolVerdict verdict = run_tool(executed, st, db, intent_llm);
    ++out.tool_calls;
    st.record(executed, verdict.passed);

    trace.executed_action = to_string(executed);
    trace.tool_ran = true;
    trace.verdict_passed = verdict.passed;

    std::string observation = "[" + to_string(executed) + "] " +
                              (verdict.passed ? "pass" : "fail") + ": " +
                              verdict.diagnostic;
    if (verdict.clarification) {
      Clarification record;
      record.question = verdict.clarification->question;
      record.kind = verdict.clarification->kind == ClarificationKind::GroundTruthProbe
                        ? "ground_truth_probe"
                        : "disambiguation";
      auto answer = clarify ? clarify(*verdict.clarification) : std::nullopt;
      if (answer) {
        record.answer = *answer;
        observation += " | clarification: " + verdict.clarification->question +
                       " -> " + *answer;
      } else {
        record.refused = true;
        observation += " | clarification: " + verdict.clarification->question +
                       " -> (refused)";
      }
      out.clarifications.push_back(std::move(record));
    }
    observations.push_back(observation);
    trace.observation = observation;

    if (parsed.updated_candidate && !parsed.updated_candidate->empty() &&
        *parsed.updated_candidate != st.candidate) {
      // The tool above ran on the old candidate; the update lands afterwards
      // and stales every verdict held for the old string.
      st.candidate = *parsed.updated_candidate;
    }
    trace.candidate_after = st.candidate;
    out.trace.push_back(std::move(trace));
  }

  out.clarified_vql = canonical_or_raw(st.candidate);
  return out;
}

}  // namespace pmvis
