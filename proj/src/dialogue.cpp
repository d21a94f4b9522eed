#include "pmvis/dialogue.hpp"

#include <algorithm>

#include "pmvis/errors.hpp"
#include "pmvis/text_util.hpp"
#include "pmvis/vql.hpp"

namespace pmvis {

nlohmann::ordered_json DialogueHistory::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& e : entries_)
    j.push_back({{"nlq", e.nlq}, {"clarified_vql", e.clarified_vql}});
  return j;
}

DialogueStatus build_status(const DialogueHistory& h, const std::string& q) {
  DialogueStatus s;
  s.history = h;
  s.current_nlq = q;
  s.round = static_cast<int>(h.size()) + 1;
  return s;
}

bool is_ground_truth_probe(const std::string& question) {
  static const char* kLexicon[] = {"exact vql", "ground truth", "exact sql",
                                   "the answer query"};
  const std::string q = ascii_lower(question);
  for (const char* phrase : kLexicon)
    if (q.find(phrase) != std::string::npos) return true;
  return false;
}

bool leaks_ground_truth(const std::string& reply,
                        const std::string& canonical_gt) {
  return contains_token_run(whitespace_tokens(reply),
                            whitespace_tokens(canonical_gt), 3);
}

ClarificationRequest ClarificationRequest::make(int round, std::string question,
                                                std::string topic,
                                                std::string facet) {
  ClarificationRequest req;
  req.round = round;
  req.kind = is_ground_truth_probe(question)
                 ? ClarificationKind::GroundTruthProbe
                 : ClarificationKind::Disambiguation;
  req.question = std::move(question);
  req.topic = std::move(topic);
  req.facet = std::move(facet);
  return req;
}

std::string user_issue(const Trajectory& traj, int i) {
  if (i < 1 || i > static_cast<int>(traj.rounds.size()))
    throw IndexOutOfRange("round " + std::to_string(i) + " outside 1.." +
                          std::to_string(traj.rounds.size()));
  return traj.rounds[static_cast<std::size_t>(i - 1)].nlq;
}

namespace {

std::string humanize(const std::string& name) {
  std::string out = ascii_lower(name);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

/// The ground-truth column that best matches the ambiguous facet: prefer a
/// humanized name containing the facet, then smallest edit distance.
std::optional<std::string> resolve_column_facet(const ClauseSet& gt,
                                                const std::string& facet) {
  std::set<std::string> cols;
  for (const auto& qualified : referenced_columns(gt)) {
    auto dot = qualified.find('.');
    cols.insert(qualified.substr(dot + 1));
  }
  if (cols.empty()) return std::nullopt;
  const std::string want = ascii_lower(facet);
  std::optional<std::string> best;
  std::size_t best_score = SIZE_MAX;
  for (const auto& col : cols) {
    const std::string human = humanize(col);
    std::size_t score = human.find(want) != std::string::npos
                            ? 0
                            : edit_distance(human, want);
    if (score < best_score) {
      best_score = score;
      best = col;
    }
  }
  return best;
}

}  // namespace

std::optional<std::string> user_clarify(const ClarificationRequest& req,
                                        const DialogueHistory& /*history*/,
                                        const std::string& gt_vql,
                                        const Database& /*db*/) {
  if (req.kind == ClarificationKind::GroundTruthProbe) return std::nullopt;

  ClauseSet gt;
  std::string canonical;
  try {
    gt = parse(gt_vql);
    canonical = assemble(gt);
  } catch (const SyntaxError&) {
    return std::nullopt;  // cannot consult an unparseable ground truth safely
  }

  std::string answer;
  if (req.topic == "chart") {
    if (gt.visualize)
      answer = "I want a " + ascii_lower(to_keyword(gt.visualize->chart)) +
               " chart.";
    else
      answer = "No chart is needed, just the data.";
  } else if (req.topic == "column") {
    auto col = resolve_column_facet(gt, req.facet);
    if (col)
      answer = "I meant the " + humanize(*col) + " field.";
    else
      answer = "I meant " + req.facet + ".";
  } else if (req.topic == "aggregate") {
    bool aggregated = false;
    std::string fn;
    for (const auto& item : gt.select.items) {
      if (!item.agg || item.agg->star) continue;
      if (humanize(item.agg->col.column.display) == humanize(req.facet) ||
          item.agg->col.column.key == ascii_lower(req.facet)) {
        aggregated = true;
        fn = ascii_lower(to_keyword(item.agg->fn));
      }
    }
    if (aggregated)
      answer = "Please aggregate " + humanize(req.facet) + " with " + fn + ".";
    else
      answer = "Show the raw " + humanize(req.facet) + " values, not an aggregate.";
  } else {
    answer = "I meant " + (req.facet.empty() ? "what I asked before" : req.facet) + ".";
  }

  // Sat: the reply must mention the facet the question names.
  if (!req.facet.empty() &&
      ascii_lower(answer).find(ascii_lower(req.facet)) == std::string::npos)
    answer += " (that is what I called '" + req.facet + "')";

  if (!leaks_ground_truth(answer, canonical)) return answer;
  std::string fallback = "I meant " + req.facet + ".";
  if (!req.facet.empty() && !leaks_ground_truth(fallback, canonical))
    return fallback;
  return std::nullopt;
}

}  // namespace pmvis
