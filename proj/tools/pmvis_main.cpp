#include <atomic>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pmvis/chart.hpp"
#include "pmvis/errors.hpp"
#include "pmvis/metrics.hpp"
#include "pmvis/session.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pmvis::Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pmvis::Error("cannot write " + path);
  out << content;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; exceptions rethrow.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed = true;
        error = e.what();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<unsigned>(jobs, static_cast<unsigned>(n)); ++t)
    pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed) throw pmvis::Error(error);
}

int cmd_parse(const std::string& vql) {
  pmvis::ClauseSet cs;
  try {
    cs = pmvis::parse(vql);
  } catch (const pmvis::SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  }
  for (const auto& ref : cs.all_clauses())
    std::cout << pmvis::clause_text(cs.get(ref)) << "\n";
  return kOk;
}

int cmd_exec(const std::string& db_dir, const std::string& vql) {
  pmvis::Database db = pmvis::load_database(db_dir);
  pmvis::ClauseSet cs;
  try {
    cs = pmvis::parse(vql);
  } catch (const pmvis::SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  }
  pmvis::ResultTable result = pmvis::execute(cs, db);
  std::string out;
  for (std::size_t i = 0; i < result.columns.size(); ++i) {
    if (i) out += ",";
    out += pmvis::csv_escape(result.columns[i].label);
  }
  out += "\r\n";
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += pmvis::csv_escape(row[i].to_display());
    }
    out += "\r\n";
  }
  std::cout << out;
  return kOk;
}

int cmd_chart(const std::string& db_dir, const std::string& vql,
              const std::string& output) {
  pmvis::Database db = pmvis::load_database(db_dir);
  pmvis::ClauseSet cs;
  try {
    cs = pmvis::parse(vql);
  } catch (const pmvis::SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  }
  pmvis::ResultTable result = pmvis::execute(cs, db);
  pmvis::ChartDocument doc = pmvis::emit_chart_spec(cs, result);
  write_output(output, doc.to_json().dump(2) + "\n");
  return kOk;
}

int cmd_gen(const std::string& db_dir, const std::string& vql_file,
            std::uint64_t seed, int min_rounds, int max_rounds, bool use_llm,
            bool maskable_visualize, bool keep_short, const std::string& output) {
  pmvis::Database db = pmvis::load_database(db_dir);

  std::unique_ptr<pmvis::HttpClient> llm;
  if (use_llm) llm = std::make_unique<pmvis::HttpClient>(pmvis::HttpClient::from_env());

  pmvis::TrajectoryConfig cfg;
  cfg.min_rounds = min_rounds;
  cfg.max_rounds = max_rounds;
  cfg.policy.maskable_visualize = maskable_visualize;
  cfg.llm = llm.get();

  std::vector<pmvis::Trajectory> trajectories;
  std::istringstream in(read_file(vql_file));
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const std::uint64_t line_seed = seed + index;
    try {
      pmvis::Trajectory traj;
      try {
        traj = pmvis::generate_trajectory(line, db, line_seed, cfg);
      } catch (const pmvis::TooShort& e) {
        if (!keep_short) {
          std::cerr << "skip line " << index << ": " << e.what() << "\n";
          ++index;
          continue;
        }
        pmvis::TrajectoryConfig relaxed = cfg;
        relaxed.min_rounds = 1;
        traj = pmvis::generate_trajectory(line, db, line_seed, relaxed);
      }
      traj.session_id = db.id() + "-" + std::to_string(index);
      trajectories.push_back(std::move(traj));
    } catch (const pmvis::SourceInvalid& e) {
      std::cerr << "skip line " << index << ": " << e.what() << "\n";
    }
    ++index;
  }
  write_output(output, pmvis::write_trajectories_jsonl(trajectories));
  return kOk;
}

int cmd_run(const std::string& db_root, const std::string& sessions_file,
            const std::string& script_file, const std::string& llm_url, int m,
            bool llm_intent, unsigned jobs, const std::string& output) {
  auto trajectories = pmvis::read_trajectories_jsonl(read_file(sessions_file));

  std::map<std::string, pmvis::Database> dbs;
  for (const auto& traj : trajectories)
    if (!dbs.count(traj.db_id))
      dbs.emplace(traj.db_id,
                  pmvis::load_database(std::filesystem::path(db_root) / traj.db_id));

  std::optional<pmvis::ScriptedMock> script_template;
  if (!script_file.empty())
    script_template = pmvis::ScriptedMock::from_file(script_file);

  std::vector<pmvis::SessionTranscript> transcripts(trajectories.size());
  parallel_for(trajectories.size(), jobs, [&](std::size_t i) {
    const auto& traj = trajectories[i];
    const pmvis::Database& db = dbs.at(traj.db_id);
    // One client handle per session; clients are never shared across threads.
    if (script_template) {
      pmvis::ScriptedMock client = *script_template;
      transcripts[i] = pmvis::run_session(traj, db, client, m, llm_intent);
    } else {
      const char* key = std::getenv("PMVIS_LLM_KEY");
      const char* model = std::getenv("PMVIS_LLM_MODEL");
      pmvis::HttpClient client(llm_url, key ? key : "",
                               model ? model : "gpt-4o-mini");
      transcripts[i] = pmvis::run_session(traj, db, client, m, llm_intent);
    }
  });

  write_output(output, pmvis::write_transcripts_jsonl(transcripts));
  return kOk;
}

int cmd_eval(const std::string& transcripts_file, const std::string& gold_file,
             const std::string& db_root, unsigned jobs) {
  auto transcripts = pmvis::read_transcripts_jsonl(read_file(transcripts_file));
  auto gold = pmvis::read_trajectories_jsonl(read_file(gold_file));

  std::map<std::string, const pmvis::SessionTranscript*> by_id;
  for (const auto& t : transcripts) by_id[t.session_id] = &t;

  std::map<std::string, pmvis::Database> dbs;
  for (const auto& traj : gold)
    if (!dbs.count(traj.db_id))
      dbs.emplace(traj.db_id,
                  pmvis::load_database(std::filesystem::path(db_root) / traj.db_id));

  std::vector<std::vector<pmvis::PairScore>> shards(gold.size());
  parallel_for(gold.size(), jobs, [&](std::size_t i) {
    const auto& traj = gold[i];
    const pmvis::Database& db = dbs.at(traj.db_id);
    const pmvis::SessionTranscript* transcript = nullptr;
    if (auto it = by_id.find(traj.session_id); it != by_id.end())
      transcript = it->second;
    for (std::size_t r = 0; r < traj.rounds.size(); ++r) {
      std::string pred;
      if (transcript && r < transcript->rounds.size())
        pred = transcript->rounds[r].v_cla;
      shards[i].push_back(pmvis::score_pair(pred, traj.rounds[r].vql, db));
    }
  });

  std::vector<pmvis::PairScore> scores;
  for (const auto& shard : shards)
    scores.insert(scores.end(), shard.begin(), shard.end());

  pmvis::Report report = pmvis::aggregate(scores, transcripts);
  std::cout << report.to_json().dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"progressive multi-turn text-to-visualization toolkit"};
  app.require_subcommand(1);

  std::string vql, db_dir, output;
  auto* parse_cmd = app.add_subcommand("parse", "decompose a VQL into clauses");
  parse_cmd->add_option("vql", vql, "VQL text")->required();

  auto* exec_cmd = app.add_subcommand("exec", "run a VQL and print CSV");
  exec_cmd->add_option("--db", db_dir, "database directory")->required();
  exec_cmd->add_option("vql", vql, "VQL text")->required();

  auto* chart_cmd = app.add_subcommand("chart", "emit a chart document");
  chart_cmd->add_option("--db", db_dir, "database directory")->required();
  chart_cmd->add_option("vql", vql, "VQL text")->required();
  chart_cmd->add_option("-o,--output", output, "output file (stdout default)");

  std::string vql_file;
  std::uint64_t seed = 0;
  int min_rounds = 2, max_rounds = 6;
  bool use_llm = false, maskable_visualize = false, keep_short = false;
  auto* gen_cmd = app.add_subcommand("gen", "generate refinement trajectories");
  gen_cmd->add_option("--db", db_dir, "database directory")->required();
  gen_cmd->add_option("--vql-file", vql_file, "source VQLs, one per line")->required();
  gen_cmd->add_option("--seed", seed, "base RNG seed")->required();
  gen_cmd->add_option("--min-rounds", min_rounds, "minimum rounds per session");
  gen_cmd->add_option("--max-rounds", max_rounds, "maximum rounds per session");
  gen_cmd->add_flag("--llm", use_llm, "synthesize NLQs with the configured LLM");
  gen_cmd->add_flag("--maskable-visualize", maskable_visualize,
                    "allow masking the VISUALIZE clause");
  gen_cmd->add_flag("--keep-short", keep_short,
                    "keep sessions shorter than --min-rounds instead of skipping");
  gen_cmd->add_option("-o,--output", output, "output file (stdout default)");

  std::string db_root, sessions_file, script_file, llm_url;
  int m = 10;
  bool llm_intent = false;
  unsigned jobs = 1;
  auto* run_cmd = app.add_subcommand("run", "run agent sessions over trajectories");
  run_cmd->add_option("--db-root", db_root, "directory of database directories")->required();
  run_cmd->add_option("--sessions", sessions_file, "trajectory JSONL")->required();
  run_cmd->add_option("--script", script_file, "scripted mock replies JSONL");
  run_cmd->add_option("--llm-url", llm_url, "chat-completions endpoint");
  run_cmd->add_option("-m", m, "maximum ReAct steps per round");
  run_cmd->add_flag("--llm-intent", llm_intent,
                    "delegate the intent matcher to the LLM");
  run_cmd->add_option("--jobs", jobs, "parallel sessions");
  run_cmd->add_option("-o,--output", output, "output file (stdout default)");

  std::string transcripts_file, gold_file;
  auto* eval_cmd = app.add_subcommand("eval", "score transcripts against gold");
  eval_cmd->add_option("--transcripts", transcripts_file, "transcript JSONL")->required();
  eval_cmd->add_option("--gold", gold_file, "gold trajectory JSONL")->required();
  eval_cmd->add_option("--db-root", db_root, "directory of database directories")->required();
  eval_cmd->add_option("--jobs", jobs, "parallel sessions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (parse_cmd->parsed()) return cmd_parse(vql);
    if (exec_cmd->parsed()) return cmd_exec(db_dir, vql);
    if (chart_cmd->parsed()) return cmd_chart(db_dir, vql, output);
    if (gen_cmd->parsed())
      return cmd_gen(db_dir, vql_file, seed, min_rounds, max_rounds, use_llm,
                     maskable_visualize, keep_short, output);
    if (run_cmd->parsed()) {
      if (script_file.empty() == llm_url.empty()) {
        const char* env_url = std::getenv("PMVIS_LLM_URL");
        if (script_file.empty() && env_url && *env_url) {
          llm_url = env_url;
        } else {
          std::cerr << "run needs exactly one of --script or --llm-url\n";
          return kUsageError;
        }
      }
      return cmd_run(db_root, sessions_file, script_file, llm_url, m,
                     llm_intent, jobs, output);
    }
    if (eval_cmd->parsed()) return cmd_eval(transcripts_file, gold_file, db_root, jobs);
  } catch (const pmvis::SyntaxError& e) {
    std::cerr << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
