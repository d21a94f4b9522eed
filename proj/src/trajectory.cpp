#include "pmvis/trajectory.hpp"

#include <algorithm>
#include <sstream>

#include "pmvis/errors.hpp"
#include "pmvis/executor.hpp"
#include "pmvis/text_util.hpp"

namespace pmvis {

namespace {

std::string humanize(const Ident& id) {
  std::string out = ascii_lower(id.display);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::string item_phrase(const SelectItem& item) {
  if (item.star) return "all columns";
  if (item.agg) {
    std::string fn = ascii_lower(to_keyword(item.agg->fn));
    if (item.agg->star) return "the " + fn + " of rows";
    std::string col = humanize(item.agg->col.column);
    if (item.agg->fn == AggFn::Count) return "the number of " + col;
    return "the " + fn + " of " + col;
  }
  return humanize(item.col.column);
}

std::string join_phrases(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += (i + 1 == parts.size()) ? " and " : ", ";
    out += parts[i];
  }
  return out;
}

std::string pred_phrase(const PredPtr& pred) {
  // Reuse the canonical rendering; predicates read naturally as-is.
  Clause probe{WhereClause{pred}};
  std::string text = clause_text(probe);
  return text.substr(std::string("WHERE ").size());
}

std::string order_keys_phrase(const OrderByClause& order) {
  std::vector<std::string> parts;
  for (const auto& k : order.keys) {
    if (const auto* col = std::get_if<ColumnRef>(&k.expr)) {
      parts.push_back(humanize(col->column));
    } else {
      SelectItem probe;
      probe.agg = std::get<AggCall>(k.expr);
      parts.push_back(select_item_text(probe));
    }
  }
  return join_phrases(parts);
}

std::string delta_sentence(const Clause& delta) {
  switch (delta.kind()) {
    case ClauseKind::Visualize: {
      const auto& v = std::get<VisualizeClause>(delta.payload);
      return "Render it as a " + ascii_lower(to_keyword(v.chart)) + " chart.";
    }
    case ClauseKind::Join: {
      const auto& j = std::get<JoinClause>(delta.payload);
      Clause probe{j};
      std::string cond = clause_text(probe);
      return "Also bring in the " + humanize(j.table.table) +
             " table, joined on " + cond.substr(cond.find(" ON ") + 4) + ".";
    }
    case ClauseKind::Where: {
      const auto& w = std::get<WhereClause>(delta.payload);
      return "Now only include rows where " + pred_phrase(w.pred) + ".";
    }
    case ClauseKind::GroupBy: {
      const auto& g = std::get<GroupByClause>(delta.payload);
      std::vector<std::string> parts;
      for (const auto& col : g.cols) parts.push_back(humanize(col.column));
      return "Group the results by " + join_phrases(parts) + ".";
    }
    case ClauseKind::Having: {
      const auto& h = std::get<HavingClause>(delta.payload);
      return "Only keep groups where " + pred_phrase(h.pred) + ".";
    }
    case ClauseKind::OrderBy: {
      const auto& o = std::get<OrderByClause>(delta.payload);
      std::string dir = o.keys.front().ascending ? "ascending" : "descending";
      return "Also order the results by " + order_keys_phrase(o) + " in " +
             dir + " order.";
    }
    case ClauseKind::Limit: {
      const auto& l = std::get<LimitClause>(delta.payload);
      if (l.n == 1) return "Show only the first row.";
      return "Show only the first " + std::to_string(l.n) + " rows.";
    }
    case ClauseKind::BinBy: {
      const auto& b = std::get<BinByClause>(delta.payload);
      return "Bin " + humanize(b.col.column) + " by " +
             ascii_lower(to_keyword(b.interval)) + ".";
    }
    default:
      return "Refine the previous request.";
  }
}

std::string base_sentence(const ClauseSet& cs) {
  const std::string table = humanize(cs.from.table.table);
  std::string out;
  if (cs.visualize && cs.select.items.size() == 2) {
    const std::string chart = ascii_lower(to_keyword(cs.visualize->chart));
    out = "Show a " + chart + " of " + item_phrase(cs.select.items[1]) +
          " for each " + item_phrase(cs.select.items[0]) + " from " + table + ".";
  } else {
    std::vector<std::string> parts;
    for (const auto& item : cs.select.items) parts.push_back(item_phrase(item));
    out = "Show " + join_phrases(parts) + " from " + table;
    if (cs.visualize)
      out += " as a " + ascii_lower(to_keyword(cs.visualize->chart)) + " chart";
    out += ".";
  }
  // A first round that kept extra clauses states them too.
  for (const auto& ref : cs.all_clauses()) {
    switch (ref.kind) {
      case ClauseKind::Visualize:
      case ClauseKind::Select:
      case ClauseKind::From:
        break;
      default:
        out += " " + delta_sentence(cs.get(ref));
    }
  }
  return out;
}

std::string llm_nlq(const std::optional<Clause>& delta, const ClauseSet& round_set,
                    const std::vector<std::pair<std::string, std::string>>& history,
                    LlmClient& llm) {
  std::ostringstream prompt;
  prompt << "You simulate a database user who refines a visualization request "
            "one step at a time. Reply with the user's next utterance only.\n\n";
  if (!history.empty()) {
    prompt << "Dialogue so far:\n";
    for (std::size_t i = 0; i < history.size(); ++i)
      prompt << "Round " << (i + 1) << " user: " << history[i].first
             << "\nRound " << (i + 1) << " query: " << history[i].second << "\n";
    prompt << "\n";
  }
  if (delta) {
    prompt << "The next request adds exactly this clause: "
           << clause_text(*delta) << "\n";
  } else {
    prompt << "The first request corresponds to this query: "
           << assemble(round_set) << "\n";
  }
  LlmRequest req;
  req.messages = {{"user", prompt.str()}};
  req.round = static_cast<int>(history.size()) + 1;
  req.step = 0;
  req.purpose = "nlq";
  return llm.complete(req).text;
}

}  // namespace

std::string synthesize_nlq(
    const std::optional<Clause>& delta, const ClauseSet& round_set,
    const std::vector<std::pair<std::string, std::string>>& history,
    LlmClient* llm) {
  if (llm) return llm_nlq(delta, round_set, history, *llm);
  if (!delta) return base_sentence(round_set);
  return delta_sentence(*delta);
}

Trajectory generate_trajectory(const std::string& vql, const Database& db,
                               std::uint64_t seed, const TrajectoryConfig& cfg) {
  ClauseSet source;
  try {
    source = parse(vql);
  } catch (const SyntaxError& e) {
    throw SourceInvalid(std::string("source does not parse: ") + e.what());
  }
  try {
    if (!non_empty(source, db))
      throw SourceInvalid("source executes to an empty result");
  } catch (const SourceInvalid&) {
    throw;
  } catch (const Error& e) {
    throw SourceInvalid(std::string("source does not execute: ") + e.what());
  }

  std::mt19937_64 rng(seed);
  std::vector<ClauseSet> sets_rev{source};
  std::vector<Clause> removed_rev;
  while (static_cast<int>(sets_rev.size()) < cfg.max_rounds) {
    const ClauseSet& current = sets_rev.back();
    if (optional_clauses(current, cfg.policy).empty()) break;
    auto step = random_mask(current, db, rng, SIZE_MAX, cfg.policy);
    if (!step) break;  // Exhausted: every remaining mask is rejected
    removed_rev.push_back(std::move(step->removed));
    sets_rev.push_back(std::move(step->remaining));
  }

  if (static_cast<int>(sets_rev.size()) < cfg.min_rounds)
    throw TooShort(static_cast<int>(sets_rev.size()), cfg.min_rounds);

  Trajectory traj;
  traj.db_id = db.id();
  traj.seed = seed;
  traj.session_id = db.id() + "-" + std::to_string(seed);

  std::vector<std::pair<std::string, std::string>> history;
  const std::size_t n = sets_rev.size();
  for (std::size_t i = 0; i < n; ++i) {
    const ClauseSet& cs = sets_rev[n - 1 - i];
    std::optional<Clause> delta;
    if (i > 0) delta = removed_rev[n - 1 - i];
    TrajectoryRound round;
    round.clause_set = cs;
    round.vql = assemble(cs);
    round.nlq = synthesize_nlq(delta, cs, history, cfg.llm);
    history.emplace_back(round.nlq, round.vql);
    traj.rounds.push_back(std::move(round));
  }
  return traj;
}

nlohmann::ordered_json trajectory_to_json(const Trajectory& t) {
  nlohmann::ordered_json j;
  j["session_id"] = t.session_id;
  j["db_id"] = t.db_id;
  j["seed"] = t.seed;
  j["rounds"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < t.rounds.size(); ++i)
    j["rounds"].push_back({{"round", i + 1},
                           {"nlq", t.rounds[i].nlq},
                           {"vql", t.rounds[i].vql}});
  return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  Trajectory t;
  t.session_id = j.at("session_id").get<std::string>();
  t.db_id = j.at("db_id").get<std::string>();
  t.seed = j.value("seed", std::uint64_t{0});
  for (const auto& jr : j.at("rounds")) {
    TrajectoryRound round;
    round.nlq = jr.at("nlq").get<std::string>();
    round.vql = jr.at("vql").get<std::string>();
    round.clause_set = parse(round.vql);
    t.rounds.push_back(std::move(round));
  }
  return t;
}

std::vector<Trajectory> read_trajectories_jsonl(const std::string& text) {
  std::vector<Trajectory> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(trajectory_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

std::string write_trajectories_jsonl(const std::vector<Trajectory>& ts) {
  std::string out;
  for (const auto& t : ts) {
    out += trajectory_to_json(t).dump();
    out += "\n";
  }
  return out;
}

}  // namespace pmvis
