#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pmvis/database.hpp"
#include "pmvis/trajectory.hpp"

namespace pmvis {

/// User-visible dialogue history. By construction it stores nothing but NLQs
/// and finalized clarified VQLs: append() is the only way in, so tool calls,
/// diagnostics and reasoning traces can never be recorded.
class DialogueHistory {
 public:
  struct Entry {
    std::string nlq;
    std::string clarified_vql;
  };

  void append(std::string nlq, std::string clarified_vql) {
    entries_.push_back({std::move(nlq), std::move(clarified_vql)});
  }

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  nlohmann::ordered_json to_json() const;

 private:
  std::vector<Entry> entries_;
};

/// What the System Agent sees at round i: the history plus the new NLQ.
struct DialogueStatus {
  DialogueHistory history;
  std::string current_nlq;
  int round = 1;  // = |history| + 1
};

DialogueStatus build_status(const DialogueHistory& h, const std::string& q);

enum class ClarificationKind { Disambiguation, GroundTruthProbe };

struct ClarificationRequest {
  int round = 0;
  std::string question;
  ClarificationKind kind = ClarificationKind::Disambiguation;
  std::string topic;  // "chart" | "column" | "aggregate" | ""
  std::string facet;  // the ambiguous fragment the question is about

  /// kind is derived from the question text, never set by hand.
  static ClarificationRequest make(int round, std::string question,
                                   std::string topic = "",
                                   std::string facet = "");
};

/// AskGT detector: does the question try to extract ground-truth executable
/// content? Keyword lexicon over the lowercased question.
bool is_ground_truth_probe(const std::string& question);

/// Leak detector: true when the reply contains any contiguous run of three
/// or more whitespace tokens from the canonical ground-truth VQL.
bool leaks_ground_truth(const std::string& reply,
                        const std::string& canonical_gt);

/// The issuance mapping: the i-th NLQ of the trajectory, 1-based.
std::string user_issue(const Trajectory& traj, int i);

/// Answers a clarification request from the ground truth without leaking it.
/// Ground-truth probes are refused (nullopt). Disambiguation answers name the
/// requested facet and are filtered through the leak detector; an answer that
/// cannot be made leak-free degrades to a refusal.
std::optional<std::string> user_clarify(const ClarificationRequest& req,
                                        const DialogueHistory& h,
                                        const std::string& gt_vql,
                                        const Database& db);

}  // namespace pmvis
