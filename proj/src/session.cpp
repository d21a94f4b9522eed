#include "pmvis/session.hpp"

#include <chrono>
#include <sstream>

#include "pmvis/errors.hpp"
#include "pmvis/prompts.hpp"

namespace pmvis {

int SessionTranscript::total_tool_calls() const {
  int n = 0;
  for (const auto& r : rounds) n += r.tool_calls;
  return n;
}

std::int64_t SessionTranscript::total_prompt_tokens() const {
  std::int64_t n = 0;
  for (const auto& r : rounds)
    for (const auto& call : r.llm_calls) n += call.prompt_tokens;
  return n;
}

std::int64_t SessionTranscript::total_completion_tokens() const {
  std::int64_t n = 0;
  for (const auto& r : rounds)
    for (const auto& call : r.llm_calls) n += call.completion_tokens;
  return n;
}

double SessionTranscript::total_wall_time_ms() const {
  double n = 0;
  for (const auto& r : rounds) n += r.wall_time_ms;
  return n;
}

int SessionTranscript::total_policy_violations() const {
  int n = 0;
  for (const auto& r : rounds)
    for (const auto& s : r.trace)
      if (s.policy_violation) ++n;
  return n;
}

bool audit_precedence(const SessionTranscript& t) {
  for (const auto& round : t.rounds) {
    struct Issued {
      bool passed = false;
      std::string for_candidate;
    };
    std::map<std::string, Issued> latest;  // tool name -> verdict
    auto current_pass = [&](const std::string& tool, const std::string& cand) {
      auto it = latest.find(tool);
      return it != latest.end() && it->second.passed &&
             it->second.for_candidate == cand;
    };
    for (const auto& step : round.trace) {
      if (!step.tool_ran) continue;
      const std::string& tool = step.executed_action;
      if (tool == "schema" || tool == "exec" || tool == "intent") {
        if (!current_pass("syntax", step.candidate_before)) return false;
      }
      if (tool == "exec" && !current_pass("schema", step.candidate_before))
        return false;
      latest[tool] = {step.verdict_passed, step.candidate_before};
    }
  }
  return true;
}

bool audit_tool_bound(const SessionTranscript& t) {
  int total = 0;
  for (const auto& round : t.rounds) {
    int per_round = 0;
    for (const auto& step : round.trace)
      if (step.tool_ran) ++per_round;
    if (per_round != round.tool_calls) return false;  // one tool per step
    if (static_cast<int>(round.trace.size()) > t.m) return false;
    total += per_round;
  }
  return total <= static_cast<int>(t.rounds.size()) * t.m;
}

std::string system_translate(const DialogueStatus& status, const Database& db,
                             LlmClient& llm, LlmCallRecord* usage) {
  LlmRequest req;
  req.messages = {{"user", build_system_prompt(status, db)}};
  req.round = status.round;
  req.step = 0;
  req.purpose = "system";
  LlmReply reply = llm.complete(req);
  if (usage) *usage = {"system", reply.prompt_tokens, reply.completion_tokens};
  std::string extracted = extract_vql_block(reply.text);
  try {
    return assemble(parse(extracted));
  } catch (const SyntaxError&) {
    return extracted;  // the Validation Agent will catch this
  }
}

SessionTranscript run_session(const Trajectory& traj, const Database& db,
                              LlmClient& llm, int m, bool llm_intent) {
  if (traj.rounds.empty()) throw Error("trajectory has no rounds");

  SessionTranscript transcript;
  transcript.session_id = traj.session_id;
  transcript.db_id = traj.db_id;
  transcript.m = m;

  DialogueHistory history;
  for (int i = 1; i <= static_cast<int>(traj.rounds.size()); ++i) {
    const std::string gt_vql = traj.rounds[static_cast<std::size_t>(i - 1)].vql;
    RoundRecord record;
    record.round = i;
    const auto started = std::chrono::steady_clock::now();
    try {
      record.nlq = user_issue(traj, i);
      DialogueStatus status = build_status(history, record.nlq);

      LlmCallRecord system_usage;
      record.v_gen = system_translate(status, db, llm, &system_usage);
      record.llm_calls.push_back(system_usage);

      ClarifyFn clarify = [&](const ClarificationRequest& req) {
        return user_clarify(req, history, gt_vql, db);
      };
      ValidationOutcome outcome =
          validate(record.nlq, record.v_gen, status, db, llm, m, clarify,
                   llm_intent ? &llm : nullptr);

      record.v_cla = outcome.clarified_vql;
      record.trace = std::move(outcome.trace);
      record.clarifications = std::move(outcome.clarifications);
      for (const auto& call : outcome.llm_calls) record.llm_calls.push_back(call);
      record.tool_calls = outcome.tool_calls;

      history.append(record.nlq, record.v_cla);
    } catch (const LlmError& e) {
      transcript.complete = false;
      transcript.error = e.what();
      transcript.rounds.push_back(std::move(record));
      break;
    } catch (const ExtractionError& e) {
      transcript.complete = false;
      transcript.error = e.what();
      transcript.rounds.push_back(std::move(record));
      break;
    }
    if (!llm.deterministic()) {
      record.wall_time_ms =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - started)
              .count();
    }
    transcript.rounds.push_back(std::move(record));
  }
  return transcript;
}

namespace {

nlohmann::ordered_json step_to_json(const TraceStep& s) {
  nlohmann::ordered_json j;
  j["step"] = s.step;
  j["thought"] = s.thought;
  j["proposed_action"] = s.proposed_action;
  j["executed_action"] = s.executed_action;
  j["tool_ran"] = s.tool_ran;
  j["verdict_passed"] = s.verdict_passed;
  j["observation"] = s.observation;
  j["candidate_before"] = s.candidate_before;
  j["candidate_after"] = s.candidate_after;
  j["policy_violation"] = s.policy_violation;
  if (s.blocking_rule) j["blocking_rule"] = *s.blocking_rule;
  return j;
}

TraceStep step_from_json(const nlohmann::json& j) {
  TraceStep s;
  s.step = j.at("step").get<int>();
  s.thought = j.at("thought").get<std::string>();
  s.proposed_action = j.at("proposed_action").get<std::string>();
  s.executed_action = j.at("executed_action").get<std::string>();
  s.tool_ran = j.at("tool_ran").get<bool>();
  s.verdict_passed = j.at("verdict_passed").get<bool>();
  s.observation = j.at("observation").get<std::string>();
  s.candidate_before = j.at("candidate_before").get<std::string>();
  s.candidate_after = j.at("candidate_after").get<std::string>();
  s.policy_violation = j.at("policy_violation").get<bool>();
  if (j.contains("blocking_rule"))
    s.blocking_rule = j["blocking_rule"].get<std::string>();
  return s;
}

}  // namespace

nlohmann::ordered_json SessionTranscript::to_json() const {
  nlohmann::ordered_json j;
  j["session_id"] = session_id;
  j["db_id"] = db_id;
  j["m"] = m;
  j["complete"] = complete;
  if (!complete) j["error"] = error;
  j["rounds"] = nlohmann::ordered_json::array();
  for (const auto& r : rounds) {
    nlohmann::ordered_json jr;
    jr["round"] = r.round;
    jr["nlq"] = r.nlq;
    jr["v_gen"] = r.v_gen;
    jr["v_cla"] = r.v_cla;
    jr["tool_calls"] = r.tool_calls;
    jr["wall_time_ms"] = r.wall_time_ms;
    jr["llm_calls"] = nlohmann::ordered_json::array();
    for (const auto& call : r.llm_calls)
      jr["llm_calls"].push_back({{"purpose", call.purpose},
                                 {"prompt_tokens", call.prompt_tokens},
                                 {"completion_tokens", call.completion_tokens}});
    jr["clarifications"] = nlohmann::ordered_json::array();
    for (const auto& c : r.clarifications)
      jr["clarifications"].push_back({{"question", c.question},
                                      {"kind", c.kind},
                                      {"answer", c.answer},
                                      {"refused", c.refused}});
    jr["trace"] = nlohmann::ordered_json::array();
    for (const auto& s : r.trace) jr["trace"].push_back(step_to_json(s));
    j["rounds"].push_back(std::move(jr));
  }
  j["totals"] = {{"rounds", rounds.size()},
                 {"tool_calls", total_tool_calls()},
                 {"prompt_tokens", total_prompt_tokens()},
                 {"completion_tokens", total_completion_tokens()},
                 {"wall_time_ms", total_wall_time_ms()},
                 {"policy_violations", total_policy_violations()},
                 {"precedence_ok", audit_precedence(*this)},
                 {"tool_bound_ok", audit_tool_bound(*this)}};
  return j;
}

SessionTranscript SessionTranscript::from_json(const nlohmann::json& j) {
  SessionTranscript t;
  t.session_id = j.at("session_id").get<std::string>();
  t.db_id = j.at("db_id").get<std::string>();
  t.m = j.at("m").get<int>();
  t.complete = j.at("complete").get<bool>();
  if (j.contains("error")) t.error = j["error"].get<std::string>();
  for (const auto& jr : j.at("rounds")) {
    RoundRecord r;
    r.round = jr.at("round").get<int>();
    r.nlq = jr.at("nlq").get<std::string>();
    r.v_gen = jr.at("v_gen").get<std::string>();
    r.v_cla = jr.at("v_cla").get<std::string>();
    r.tool_calls = jr.at("tool_calls").get<int>();
    r.wall_time_ms = jr.at("wall_time_ms").get<double>();
    for (const auto& jc : jr.at("llm_calls"))
      r.llm_calls.push_back({jc.at("purpose").get<std::string>(),
                             jc.at("prompt_tokens").get<std::int64_t>(),
                             jc.at("completion_tokens").get<std::int64_t>()});
    for (const auto& jc : jr.at("clarifications")) {
      Clarification c;
      c.question = jc.at("question").get<std::string>();
      c.kind = jc.at("kind").get<std::string>();
      c.answer = jc.at("answer").get<std::string>();
      c.refused = jc.at("refused").get<bool>();
      r.clarifications.push_back(std::move(c));
    }
    for (const auto& js : jr.at("trace")) r.trace.push_back(step_from_json(js));
    t.rounds.push_back(std::move(r));
  }
  return t;
}

std::vector<SessionTranscript> read_transcripts_jsonl(const std::string& text) {
  std::vector<SessionTranscript> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(SessionTranscript::from_json(nlohmann::json::parse(line)));
  }
  return out;
}

std::string write_transcripts_jsonl(const std::vector<SessionTranscript>& ts) {
  std::string out;
  for (const auto& t : ts) {
    out += t.to_json().dump();
    out += "\n";
  }
  return out;
}

}  // namespace pmvis
