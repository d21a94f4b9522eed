// Acceptance suite: one line per criterion, non-zero exit on any failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pmvis/chart.hpp"
#include "pmvis/errors.hpp"
#include "pmvis/metrics.hpp"
#include "pmvis/session.hpp"
#include "pmvis/text_util.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/query_gen.hpp"

using namespace pmvis;
using namespace pmvis::testing;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok,
            const std::string& detail) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << criterion << ": "
            << name << " — " << detail << "\n";
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("missing fixture: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Database> fixture_dbs() {
  std::vector<Database> dbs;
  dbs.push_back(load_fixture_db("building"));
  dbs.push_back(load_fixture_db("concerts"));
  dbs.push_back(load_fixture_db("products"));
  return dbs;
}

const Database& db_by_id(const std::vector<Database>& dbs, const std::string& id) {
  for (const auto& db : dbs)
    if (db.id() == id) return db;
  throw Error("no fixture db " + id);
}

// --- criterion 1: parser round trip ----------------------------------------

void criterion1() {
  auto start = std::chrono::steady_clock::now();
  std::istringstream in(slurp(fixture_dir() / "corpus" / "roundtrip_vqls.txt"));
  std::string line;
  int total = 0, good = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++total;
    try {
      ClauseSet cs = parse(line);
      std::string canonical = assemble(cs);
      if (parse(canonical) == cs && assemble(parse(canonical)) == canonical)
        ++good;
    } catch (const Error&) {
    }
  }
  double elapsed = seconds_since(start);
  report(1, "parser round-trip", total >= 50 && good == total && elapsed < 1.0,
         std::to_string(good) + "/" + std::to_string(total) +
             " fixed points in " + std::to_string(elapsed) + "s");
}

// --- criterion 2: executor oracle equivalence --------------------------------

void criterion2() {
  auto start = std::chrono::steady_clock::now();
  auto dbs = fixture_dbs();
  std::mt19937_64 rng(20250801);
  int matched = 0;
  const int total = 1000;
  for (int i = 0; i < total; ++i) {
    const Database& db = dbs[static_cast<std::size_t>(i) % dbs.size()];
    ClauseSet cs = random_query(db, rng);
    ResultTable engine = execute(cs, db);
    OracleResult expected = oracle_execute(cs, db);
    if (expected.ordered == engine.ordered && oracle_matches(expected, engine))
      ++matched;
    else
      std::cerr << "  oracle mismatch: " << assemble(cs) << "\n";
  }
  double elapsed = seconds_since(start);
  report(2, "executor oracle equivalence",
         matched == total && elapsed < 30.0,
         std::to_string(matched) + "/" + std::to_string(total) + " in " +
             std::to_string(elapsed) + "s");
}

// --- criterion 3: masking soundness -----------------------------------------

bool recheck_rules(const ClauseSet& cs, const Database& db, bool expect_chart) {
  // MC1: the core is intact.
  if (cs.select.items.empty()) return false;
  if (expect_chart && !cs.visualize) return false;
  // MC2: prerequisites survive.
  std::set<ClauseKind> kinds;
  for (const auto& ref : cs.all_clauses()) kinds.insert(ref.kind);
  for (const auto& ref : cs.all_clauses())
    for (ClauseKind need : prerequisites(cs.get(ref)))
      if (!kinds.count(need)) return false;
  // MC3: references stay bound.
  try {
    for (const auto& col : referenced_columns(cs))
      if (!bound_columns(cs, db).count(col)) return false;
  } catch (const Error&) {
    return false;
  }
  // VF1 + VF2.
  try {
    ResultTable r = execute(cs, db);
    if (cs.visualize && !is_renderable(cs, r).ok) return false;
    if (r.rows.empty()) return false;
  } catch (const Error&) {
    return false;
  }
  return true;
}

void criterion3() {
  auto dbs = fixture_dbs();
  std::vector<std::pair<std::string, std::string>> sources;
  std::istringstream in(slurp(fixture_dir() / "corpus" / "mask_sources.txt"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    sources.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }

  int trajectories = 0, violations = 0;
  std::uint64_t seed = 0;
  while (trajectories < 1000) {
    const auto& [db_id, vql] = sources[trajectories % sources.size()];
    const Database& db = db_by_id(dbs, db_id);
    TrajectoryConfig cfg;
    cfg.max_rounds = 8;
    Trajectory traj;
    try {
      traj = generate_trajectory(vql, db, seed++, cfg);
    } catch (const TooShort&) {
      continue;
    }
    ++trajectories;
    bool chart = traj.rounds.back().clause_set.visualize.has_value();
    for (std::size_t i = 0; i < traj.rounds.size(); ++i) {
      const ClauseSet& cs = traj.rounds[i].clause_set;
      if (!recheck_rules(cs, db, chart)) ++violations;
      if (i > 0) {
        const ClauseSet& prev = traj.rounds[i - 1].clause_set;
        bool grows = prev.clause_count() + 1 == cs.clause_count();
        for (const auto& ref : prev.all_clauses())
          grows = grows && cs.contains(ref) && prev.get(ref) == cs.get(ref);
        if (!grows) ++violations;
      }
    }
    if (traj.rounds.back().vql != assemble(parse(vql))) ++violations;
  }
  report(3, "masking soundness over 1000 trajectories", violations == 0,
         std::to_string(violations) + " violations");
}

// --- criterion 4: precedence fuzz -------------------------------------------

struct FuzzTally {
  long steps = 0;
  long forbidden_executions = 0;
  long policy_violations_logged = 0;
  long policy_violations_expected = 0;
  long contract_escapes = 0;
};

void replay_trace(const std::vector<TraceStep>& trace, FuzzTally& tally) {
  // Independent re-derivation of what should have been blocked.
  std::map<std::string, std::pair<bool, std::string>> latest;  // tool -> (passed, cand)
  auto pass_for = [&](const std::string& tool, const std::string& cand) {
    auto it = latest.find(tool);
    return it != latest.end() && it->second.first && it->second.second == cand;
  };
  for (const auto& step : trace) {
    ++tally.steps;
    if (step.executed_action == "final") continue;
    const std::string& proposed = step.proposed_action;
    bool expect_block = false;
    if (proposed == "schema" || proposed == "exec" || proposed == "intent") {
      if (!pass_for("syntax", step.candidate_before)) expect_block = true;
      if (proposed == "exec" && !expect_block &&
          !pass_for("schema", step.candidate_before))
        expect_block = true;
    }
    if (expect_block) ++tally.policy_violations_expected;
    if (step.policy_violation) ++tally.policy_violations_logged;

    if (step.tool_ran) {
      const std::string& tool = step.executed_action;
      if (tool == "schema" || tool == "exec" || tool == "intent") {
        if (!pass_for("syntax", step.candidate_before))
          ++tally.forbidden_executions;
        if (tool == "exec" && !pass_for("schema", step.candidate_before))
          ++tally.forbidden_executions;
      }
      latest[tool] = {step.verdict_passed, step.candidate_before};
    }
  }
}

void criterion4() {
  Database db = load_fixture_db("building");
  DialogueHistory h;
  DialogueStatus status = build_status(h, "show the floors per address");

  const char* candidates[] = {
      "VISUALIZE BAR SELECT Street_address, Floors FROM building",
      "SELECT Address FROM building",          // schema-breaking
      "SELECT FROM WHERE",                     // unparseable
      "SELECT Street_address FROM building WHERE Floors > 999",  // empty
      "SELECT ghost FROM ghost_table",
      // grounded but semantically broken: forward join reference
      "SELECT b.Street_address FROM building AS b "
      "JOIN building AS c ON b.Floors = d.Floors "
      "JOIN building AS d ON c.Floors = d.Floors",
  };
  const char* actions[] = {"exec", "schema", "intent", "exec", "syntax"};

  FuzzTally tally;
  std::mt19937_64 rng(0xFEEDFACE);
  while (tally.steps < 10000) {
    std::vector<ScriptedMock::Entry> entries;
    for (int t = 1; t <= 10; ++t) {
      std::string reply = std::string("Thought: fuzz\nAction: ") +
                          actions[rng() % 5];
      if (rng() % 4 == 0)
        reply += std::string("\nCandidate: ") + candidates[rng() % 6];
      entries.push_back({1, t, reply});
    }
    ScriptedMock mock(std::move(entries));
    try {
      ValidationOutcome out =
          validate("q", candidates[rng() % 6], status, db, mock, 10, nullptr);
      replay_trace(out.trace, tally);
      long logged = 0;
      for (const auto& s : out.trace)
        if (s.policy_violation) ++logged;
      if (logged != out.policy_violations) ++tally.contract_escapes;
    } catch (const ContractViolation&) {
      ++tally.contract_escapes;
    }
  }
  bool ok = tally.forbidden_executions == 0 && tally.contract_escapes == 0 &&
            tally.policy_violations_logged == tally.policy_violations_expected;
  report(4, "precedence fuzz over 10000 ReAct steps", ok,
         std::to_string(tally.steps) + " steps, " +
             std::to_string(tally.forbidden_executions) + " forbidden, " +
             std::to_string(tally.policy_violations_logged) + "/" +
             std::to_string(tally.policy_violations_expected) +
             " violations logged/expected, " +
             std::to_string(tally.contract_escapes) + " contract escapes");
}

// --- criterion 5: tool-call bound -------------------------------------------

void criterion5() {
  Database db = load_fixture_db("building");
  Trajectory traj;
  traj.session_id = "worst";
  traj.db_id = "building";
  std::vector<ScriptedMock::Entry> entries;
  for (int r = 1; r <= 5; ++r) {
    TrajectoryRound round;
    round.nlq = "round " + std::to_string(r);
    round.vql = "VISUALIZE BAR SELECT Street_address, Floors FROM building";
    round.clause_set = parse(round.vql);
    traj.rounds.push_back(round);
    entries.push_back({r, 0, "```VQL\nVISUALIZE BAR SELECT Street_address, "
                             "Floors FROM building\n```"});
    for (int t = 1; t <= 10; ++t)
      entries.push_back({r, t, "Thought: poll\nAction: syntax"});
  }
  ScriptedMock mock(std::move(entries));
  SessionTranscript worst = run_session(traj, db, mock, 10);

  bool ok = worst.total_tool_calls() == 50 && audit_tool_bound(worst);

  // And the bound holds across ordinary scripted sessions too.
  ScriptedMock golden = ScriptedMock::from_file(fixture_dir() / "golden" /
                                                "golden_script.jsonl");
  auto ts = read_trajectories_jsonl(
      slurp(fixture_dir() / "golden" / "golden_traj.jsonl"));
  SessionTranscript g = run_session(ts[0], db, golden, 10);
  ok = ok && audit_tool_bound(g) &&
       g.total_tool_calls() <= static_cast<int>(g.rounds.size()) * 10;

  report(5, "tool calls bounded by n*m", ok,
         "worst case 5x10 = " + std::to_string(worst.total_tool_calls()) +
             " calls, golden " + std::to_string(g.total_tool_calls()));
}

// --- criterion 6: user-agent audits -----------------------------------------

void criterion6() {
  Database building = load_fixture_db("building");
  const std::string gt = golden_building_vql();

  // 50 ground-truth probes, phrased around the AskGT lexicon.
  const char* lead[] = {"Please ", "Could you ", "Now ", "Just ", ""};
  const char* probes[] = {"give me the exact VQL",
                          "share the ground truth",
                          "paste the exact SQL you expect",
                          "reveal the answer query",
                          "type out the exact vql, thanks"};
  int refusals = 0, probe_count = 0;
  for (const char* a : lead)
    for (const char* b : probes) {
      for (int i = 0; i < 2; ++i) {
        std::string question = std::string(a) + b + (i ? "?" : ".");
        auto req = ClarificationRequest::make(1, question);
        ++probe_count;
        if (req.kind == ClarificationKind::GroundTruthProbe &&
            !user_clarify(req, DialogueHistory{}, gt, building).has_value())
          ++refusals;
      }
    }

  // Disambiguation replies across every fixture column: Sat holds, Leak never
  // fires.
  int leaks = 0, unsat = 0, disambiguations = 0;
  for (const auto& db : fixture_dbs()) {
    for (const auto& table : db.tables()) {
      std::string gold = "SELECT ";
      gold += table.columns[0].name;
      if (table.columns.size() > 1) gold += ", " + table.columns[1].name;
      gold += " FROM " + table.name;
      const std::string canonical = assemble(parse(gold));
      for (const auto& col : table.columns) {
        std::string facet = ascii_lower(col.name);
        for (auto& ch : facet)
          if (ch == '_') ch = ' ';
        auto req = ClarificationRequest::make(
            1, "Which column did you mean by '" + facet + "'?", "column", facet);
        auto answer = user_clarify(req, DialogueHistory{}, gold, db);
        ++disambiguations;
        if (!answer) {
          ++unsat;
          continue;
        }
        if (ascii_lower(*answer).find(facet) == std::string::npos) ++unsat;
        if (leaks_ground_truth(*answer, canonical)) ++leaks;
      }
    }
  }

  // 1000 sessions: serialized histories never contain a tool diagnostic.
  auto traj = read_trajectories_jsonl(
      slurp(fixture_dir() / "golden" / "golden_traj.jsonl"))[0];
  int history_hits = 0;
  for (int i = 0; i < 1000; ++i) {
    ScriptedMock mock = ScriptedMock::from_file(fixture_dir() / "golden" /
                                                "golden_script.jsonl");
    SessionTranscript t = run_session(traj, building, mock, 10);
    DialogueHistory h;
    for (const auto& round : t.rounds) h.append(round.nlq, round.v_cla);
    const std::string serialized = h.to_json().dump();
    for (const auto& round : t.rounds)
      for (const auto& step : round.trace) {
        if (step.observation.empty() || step.executed_action == "final") continue;
        if (serialized.find(step.observation) != std::string::npos)
          ++history_hits;
      }
  }

  bool ok = probe_count == 50 && refusals == 50 && leaks == 0 && unsat == 0 &&
            history_hits == 0;
  report(6, "user-agent audits", ok,
         std::to_string(refusals) + "/" + std::to_string(probe_count) +
             " probes refused, " + std::to_string(leaks) + " leaks over " +
             std::to_string(disambiguations) + " replies, " +
             std::to_string(history_hits) + " history hits");
}

// --- criterion 7: golden case study -----------------------------------------

void criterion7() {
  Database db = load_fixture_db("building");
  auto traj = read_trajectories_jsonl(
      slurp(fixture_dir() / "golden" / "golden_traj.jsonl"))[0];
  ScriptedMock mock = ScriptedMock::from_file(fixture_dir() / "golden" /
                                              "golden_script.jsonl");
  SessionTranscript t = run_session(traj, db, mock, 10);

  bool repaired =
      t.complete && t.rounds.size() == 2 &&
      t.rounds[1].v_gen.find("Address") != std::string::npos &&
      t.rounds[1].v_gen.find("COUNT(Floors)") != std::string::npos &&
      t.rounds[1].v_cla == golden_building_vql();

  bool scored = true;
  for (std::size_t i = 0; i < traj.rounds.size(); ++i) {
    PairScore s = score_pair(t.rounds[i].v_cla, traj.rounds[i].vql, db);
    scored = scored && s.vis && s.axis && s.data && s.overall && s.exec;
  }
  report(7, "golden case study repair", repaired && scored,
         "final = " + t.rounds[1].v_cla);
}

// --- criterion 8: metric reflexivity ----------------------------------------

void criterion8() {
  auto dbs = fixture_dbs();
  std::istringstream in(slurp(fixture_dir() / "corpus" / "mask_sources.txt"));
  std::string line;
  std::vector<PairScore> scores;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    const Database& db = db_by_id(dbs, line.substr(0, tab));
    Trajectory traj;
    try {
      traj = generate_trajectory(line.substr(tab + 1), db, 99);
    } catch (const TooShort&) {
      continue;
    }
    for (const auto& round : traj.rounds)
      scores.push_back(score_pair(round.vql, round.vql, db));
  }
  Report r = aggregate(scores, {});
  bool ok = r.n > 0 && r.vis_acc() == 1.0 && r.axis_acc() == 1.0 &&
            r.data_acc() == 1.0 && r.overall_acc() == 1.0 && r.exec_acc() == 1.0;
  report(8, "metric reflexivity", ok,
         "all five ratios 1.0 over " + std::to_string(r.n) + " self-pairs");
}

// --- criterion 9: cost report sanity ----------------------------------------

void criterion9() {
  auto dbs = fixture_dbs();
  std::istringstream in(slurp(fixture_dir() / "corpus" / "cost_sources.txt"));
  std::string line;
  std::vector<std::pair<std::string, std::string>> sources;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    sources.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }

  long total_rounds = 0;
  int sessions = 0;
  for (const auto& [db_id, vql] : sources) {
    const Database& db = db_by_id(dbs, db_id);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Trajectory traj = generate_trajectory(vql, db, seed);
      total_rounds += static_cast<long>(traj.rounds.size());
      ++sessions;
    }
  }
  double mean = static_cast<double>(total_rounds) / sessions;
  bool ok = sessions == 200 && mean >= 3.2 && mean <= 4.2;
  report(9, "cost report sanity", ok,
         std::to_string(sessions) + " sessions, mean rounds " +
             std::to_string(mean) + " (target 3.7 +/- 0.5)");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  if (failures) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all acceptance criteria passed\n";
  return 0;
}
