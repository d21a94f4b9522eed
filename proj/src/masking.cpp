#include "pmvis/masking.hpp"

#include <algorithm>

#include "pmvis/chart.hpp"
#include "pmvis/errors.hpp"
#include "pmvis/executor.hpp"

namespace pmvis {

std::string to_string(MaskRule r) {
  switch (r) {
    case MaskRule::MC1: return "MC1";
    case MaskRule::MC2: return "MC2";
    case MaskRule::MC3: return "MC3";
    case MaskRule::VF1: return "VF1";
    case MaskRule::VF2: return "VF2";
  }
  return "?";
}

MaskVerdict check_mask(const ClauseSet& cs, const ClauseRef& target,
                       const Database& db, const MaskPolicy& policy) {
  // MC1: core preservation.
  if (target.kind == ClauseKind::Select || target.kind == ClauseKind::From ||
      (target.kind == ClauseKind::Visualize && !policy.maskable_visualize))
    return {false, MaskRule::MC1,
            "core clause " + to_keyword(target.kind) + " is not maskable"};

  const ClauseSet remaining = cs.without(target);

  // MC2: prerequisite keywords survive.
  const auto remaining_refs = remaining.all_clauses();
  std::set<ClauseKind> kinds;
  for (const auto& ref : remaining_refs) kinds.insert(ref.kind);
  for (const auto& ref : remaining_refs) {
    for (ClauseKind need : prerequisites(remaining.get(ref))) {
      if (!kinds.count(need))
        return {false, MaskRule::MC2,
                to_keyword(ref.kind) + " requires " + to_keyword(need) +
                    ", which the mask removes"};
    }
  }

  // MC3: no referenced column loses its binding.
  try {
    const auto cols = referenced_columns(remaining);
    const auto bound = bound_columns(remaining, db);
    for (const auto& col : cols) {
      if (!bound.count(col))
        return {false, MaskRule::MC3,
                "column " + col + " stays referenced but loses its binding"};
    }
  } catch (const Error& e) {
    return {false, MaskRule::MC3, e.what()};
  }

  // VF1/VF2 need the execution result. A remainder that stops executing
  // (e.g. GROUP BY removed under an aggregated SELECT) fails the
  // feasibility gate as VF2.
  ResultTable result;
  try {
    result = execute(remaining, db);
  } catch (const Error& e) {
    return {false, MaskRule::VF2, std::string("not executable: ") + e.what()};
  }

  if (remaining.visualize) {
    RenderVerdict verdict = is_renderable(remaining, result);
    if (!verdict.ok) return {false, MaskRule::VF1, verdict.diagnostic};
  }

  if (result.rows.empty()) return {false, MaskRule::VF2, "empty result table"};

  return {true, std::nullopt, "mask accepted"};
}

std::optional<MaskStep> random_mask(const ClauseSet& cs, const Database& db,
                                    std::mt19937_64& rng,
                                    std::size_t max_attempts,
                                    const MaskPolicy& policy) {
  std::vector<ClauseRef> candidates = optional_clauses(cs, policy);
  if (candidates.empty())
    throw Error("random_mask requires a non-empty optional clause set");

  std::size_t attempts = std::min(max_attempts, candidates.size());
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    // rng() % n instead of uniform_int_distribution: the draw must be
    // reproducible across standard libraries for seeded corpora.
    std::size_t pick = static_cast<std::size_t>(rng() % candidates.size());
    ClauseRef ref = candidates[pick];
    MaskVerdict verdict = check_mask(cs, ref, db, policy);
    if (verdict.accepted) return MaskStep{cs.without(ref), cs.get(ref)};
    candidates.erase(candidates.begin() + static_cast<long>(pick));
  }
  return std::nullopt;
}

}  // namespace pmvis
