#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmvis/executor.hpp"
#include "pmvis/session.hpp"

namespace pmvis {

/// Per-pair verdicts. overall is always vis && axis && data.
struct PairScore {
  bool vis = false;
  bool axis = false;
  bool data = false;
  bool overall = false;
  bool exec = false;

  static PairScore make(bool vis, bool axis, bool data, bool exec) {
    return {vis, axis, data, vis && axis && data, exec};
  }
};

/// Result-table equality for execution accuracy. Column labels are ignored
/// and column counts must match. When either side is ordered the rows compare
/// as sequences, otherwise as multisets; Integer 5 equals Real 5.0.
bool compare_exec(const ResultTable& pred, const ResultTable& gold);

/// Scores a prediction against a gold VQL. The gold must parse and execute
/// (GoldInvalid otherwise). A prediction that fails to parse, ground, or
/// execute scores false — evaluation is total over arbitrary predictions.
PairScore score_pair(const std::string& pred, const std::string& gold,
                     const Database& db);

/// Aggregated accuracies plus cost accounting. Raw sums are kept so shard
/// reports merge exactly.
struct Report {
  std::int64_t n = 0;
  std::int64_t n_vis = 0, n_axis = 0, n_data = 0, n_overall = 0, n_exec = 0;

  std::int64_t transcripts = 0;
  std::int64_t total_rounds = 0;
  std::int64_t total_tool_calls = 0;
  std::int64_t total_tokens = 0;
  double total_wall_ms = 0.0;
  bool theorem2_ok = true;  // every transcript passed the tool-bound audit

  double vis_acc() const { return n ? double(n_vis) / double(n) : 0.0; }
  double axis_acc() const { return n ? double(n_axis) / double(n) : 0.0; }
  double data_acc() const { return n ? double(n_data) / double(n) : 0.0; }
  double overall_acc() const { return n ? double(n_overall) / double(n) : 0.0; }
  double exec_acc() const { return n ? double(n_exec) / double(n) : 0.0; }
  double rounds_mean() const {
    return transcripts ? double(total_rounds) / double(transcripts) : 0.0;
  }
  double tokens_per_round() const {
    return total_rounds ? double(total_tokens) / double(total_rounds) : 0.0;
  }
  double latency_s_per_round() const {
    return total_rounds ? (total_wall_ms / 1000.0) / double(total_rounds) : 0.0;
  }

  nlohmann::ordered_json to_json() const;
};

Report aggregate(const std::vector<PairScore>& scores,
                 const std::vector<SessionTranscript>& transcripts);

/// Shard merge: aggregate(a ++ b) == merge(aggregate(a), aggregate(b)).
Report merge(const Report& a, const Report& b);

}  // namespace pmvis
