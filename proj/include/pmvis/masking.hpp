#pragma once

#include <optional>
#include <random>
#include <string>

#include "pmvis/database.hpp"
#include "pmvis/vql.hpp"

namespace pmvis {

enum class MaskRule { MC1, MC2, MC3, VF1, VF2 };

std::string to_string(MaskRule r);

/// Outcome of testing one candidate mask. A rejection names the first rule
/// broken in the order MC1, MC2, MC3, VF1, VF2.
struct MaskVerdict {
  bool accepted = false;
  std::optional<MaskRule> violated_rule;
  std::string diagnostic;
};

/// Evaluates the masking rules on cs \ {target}:
///   MC1  core clauses (SELECT, FROM, and VISUALIZE unless configured
///        maskable) are never removed
///   MC2  every remaining clause keeps its prerequisites
///   MC3  columns referenced by the remainder stay bound by FROM/JOIN
///   VF1  the remainder still renders when VISUALIZE survives
///   VF2  the remainder executes to a non-empty result (a remainder that no
///        longer executes at all also fails here)
MaskVerdict check_mask(const ClauseSet& cs, const ClauseRef& target,
                       const Database& db, const MaskPolicy& policy = {});

struct MaskStep {
  ClauseSet remaining;
  Clause removed;
};

/// Removes one optional clause chosen uniformly among the not-yet-tried
/// candidates, rejection-sampling without replacement until a mask passes
/// check_mask. Returns nullopt (Exhausted) when every candidate is rejected;
/// attempts never exceed min(max_attempts, |optional clauses|).
std::optional<MaskStep> random_mask(const ClauseSet& cs, const Database& db,
                                    std::mt19937_64& rng,
                                    std::size_t max_attempts = SIZE_MAX,
                                    const MaskPolicy& policy = {});

}  // namespace pmvis
