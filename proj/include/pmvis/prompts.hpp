#pragma once

#include <string>
#include <vector>

#include "pmvis/database.hpp"
#include "pmvis/dialogue.hpp"

namespace pmvis {

/// Schema block injected into prompts; deterministic catalog order.
std::string render_schema(const Database& db);

std::string vql_format_guidelines();

/// The System Agent prompt. The skeleton is fixed: "### Task",
/// "### Database Schemas:", "### Please follow the VQL Format Guidelines",
/// "### Natural Language Question" with numbered "## Round {i}" blocks, and
/// "### Output" demanding a fenced block opened by ```VQL.
std::string build_system_prompt(const DialogueStatus& status, const Database& db);

/// Validation Agent prompt for one ReAct step: the NLQ, the current
/// candidate, the schema, and the observation log so far.
std::string build_validation_prompt(const std::string& nlq,
                                    const std::string& candidate,
                                    const Database& db,
                                    const std::vector<std::string>& observations);

/// Extracts the contents of the first fenced block opened by ```VQL (the
/// language tag is matched case-insensitively, a bare ``` fence is accepted
/// as fallback). Raises ExtractionError when no fence is found.
std::string extract_vql_block(const std::string& reply);

}  // namespace pmvis
