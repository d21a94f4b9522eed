#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pmvis/llm.hpp"
#include "pmvis/masking.hpp"

namespace pmvis {

struct TrajectoryRound {
  std::string nlq;
  std::string vql;  // canonical text
  ClauseSet clause_set;
};

/// One benchmark session: a strictly growing chain of clause sets, each round
/// adding exactly one clause, ending at the source VQL.
struct Trajectory {
  std::string session_id;
  std::string db_id;
  std::uint64_t seed = 0;
  std::vector<TrajectoryRound> rounds;
};

struct TrajectoryConfig {
  int min_rounds = 2;
  int max_rounds = 6;
  MaskPolicy policy;
  LlmClient* llm = nullptr;  // nullptr = deterministic NLQ templates
};

/// Builds the reverse masking chain from a source VQL and emits it forward,
/// simplest round first. The source must parse, be schema-grounded, and
/// execute to a non-empty result (SourceInvalid otherwise); chains shorter
/// than min_rounds raise TooShort.
Trajectory generate_trajectory(const std::string& vql, const Database& db,
                               std::uint64_t seed,
                               const TrajectoryConfig& cfg = {});

/// NLQ for one round. Without a delta (first round) a base request is built
/// from the whole clause set; with a delta, a follow-up sentence keyed by the
/// delta's kind. In LLM mode the dialogue history and the clause delta are
/// embedded in a prompt and the reply is returned verbatim.
std::string synthesize_nlq(
    const std::optional<Clause>& delta, const ClauseSet& round_set,
    const std::vector<std::pair<std::string, std::string>>& history,
    LlmClient* llm = nullptr);

nlohmann::ordered_json trajectory_to_json(const Trajectory& t);
/// Re-parses each round's VQL to restore clause sets.
Trajectory trajectory_from_json(const nlohmann::json& j);

std::vector<Trajectory> read_trajectories_jsonl(const std::string& text);
std::string write_trajectories_jsonl(const std::vector<Trajectory>& ts);

}  // namespace pmvis
