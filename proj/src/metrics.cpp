#include "pmvis/metrics.hpp"

#include <algorithm>

#include "pmvis/errors.hpp"

namespace pmvis {

namespace {

bool rows_equal(const Row& a, const Row& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

int compare_rows(const Row& a, const Row& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    int cmp = compare_values(a[i], b[i]);
    if (cmp != 0) return cmp;
  }
  return a.size() < b.size() ? -1 : (a.size() > b.size() ? 1 : 0);
}

}  // namespace

bool compare_exec(const ResultTable& pred, const ResultTable& gold) {
  if (pred.columns.size() != gold.columns.size()) return false;
  if (pred.rows.size() != gold.rows.size()) return false;

  if (pred.ordered || gold.ordered) {
    for (std::size_t i = 0; i < pred.rows.size(); ++i)
      if (!rows_equal(pred.rows[i], gold.rows[i])) return false;
    return true;
  }

  std::vector<Row> a = pred.rows, b = gold.rows;
  auto less = [](const Row& x, const Row& y) { return compare_rows(x, y) < 0; };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!rows_equal(a[i], b[i])) return false;
  return true;
}

PairScore score_pair(const std::string& pred, const std::string& gold,
                     const Database& db) {
  ClauseSet gold_cs;
  ResultTable gold_result;
  try {
    gold_cs = parse(gold);
    gold_result = execute(gold_cs, db);
  } catch (const Error& e) {
    throw GoldInvalid("gold VQL invalid: " + std::string(e.what()));
  }

  ClauseSet pred_cs;
  try {
    pred_cs = parse(pred);
  } catch (const SyntaxError&) {
    return PairScore::make(false, false, false, false);
  }

  const VqlComponents gp = components(gold_cs);
  const VqlComponents pp = components(pred_cs);

  bool vis = gp.vis == pp.vis;
  bool axis = gp.axis == pp.axis && gp.axis_distinct == pp.axis_distinct;
  bool data = gp.data == pp.data;

  bool exec = false;
  try {
    exec = compare_exec(execute(pred_cs, db), gold_result);
  } catch (const Error&) {
    exec = false;  // ungrounded or failing predictions score false, not fatal
  }

  return PairScore::make(vis, axis, data, exec);
}

Report aggregate(const std::vector<PairScore>& scores,
                 const std::vector<SessionTranscript>& transcripts) {
  if (scores.empty()) throw Error("aggregate needs at least one score");
  Report r;
  r.n = static_cast<std::int64_t>(scores.size());
  for (const auto& s : scores) {
    r.n_vis += s.vis;
    r.n_axis += s.axis;
    r.n_data += s.data;
    r.n_overall += s.overall;
    r.n_exec += s.exec;
  }
  r.transcripts = static_cast<std::int64_t>(transcripts.size());
  for (const auto& t : transcripts) {
    r.total_rounds += static_cast<std::int64_t>(t.rounds.size());
    r.total_tool_calls += t.total_tool_calls();
    r.total_tokens += t.total_prompt_tokens() + t.total_completion_tokens();
    r.total_wall_ms += t.total_wall_time_ms();
    if (!audit_tool_bound(t)) r.theorem2_ok = false;
  }
  return r;
}

Report merge(const Report& a, const Report& b) {
  Report r;
  r.n = a.n + b.n;
  r.n_vis = a.n_vis + b.n_vis;
  r.n_axis = a.n_axis + b.n_axis;
  r.n_data = a.n_data + b.n_data;
  r.n_overall = a.n_overall + b.n_overall;
  r.n_exec = a.n_exec + b.n_exec;
  r.transcripts = a.transcripts + b.transcripts;
  r.total_rounds = a.total_rounds + b.total_rounds;
  r.total_tool_calls = a.total_tool_calls + b.total_tool_calls;
  r.total_tokens = a.total_tokens + b.total_tokens;
  r.total_wall_ms = a.total_wall_ms + b.total_wall_ms;
  r.theorem2_ok = a.theorem2_ok && b.theorem2_ok;
  return r;
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["vis_acc"] = vis_acc();
  j["axis_acc"] = axis_acc();
  j["data_acc"] = data_acc();
  j["overall_acc"] = overall_acc();
  j["exec_acc"] = exec_acc();
  j["rounds_mean"] = rounds_mean();
  j["tokens_per_round"] = tokens_per_round();
  j["latency_s_per_round"] = latency_s_per_round();
  j["tool_calls_total"] = total_tool_calls;
  j["theorem2_ok"] = theorem2_ok;
  return j;
}

}  // namespace pmvis
