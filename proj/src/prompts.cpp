#include "pmvis/prompts.hpp"

#include <sstream>

#include "pmvis/errors.hpp"
#include "pmvis/text_util.hpp"

namespace pmvis {

std::string render_schema(const Database& db) {
  std::ostringstream out;
  out << "Database: " << db.id() << "\n";
  for (const auto& t : db.tables()) {
    out << "Table " << t.name << " (";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out << ", ";
      out << t.columns[i].name << " " << to_string(t.columns[i].declared_type);
    }
    out << ")\n";
  }
  for (const auto& fk : db.foreign_keys())
    out << "Foreign key: " << fk.from_table << "." << fk.from_column << " -> "
        << fk.to_table << "." << fk.to_column << "\n";
  return out.str();
}

std::string vql_format_guidelines() {
  return
      "VQL is SQL with a leading chart clause:\n"
      "VISUALIZE <BAR|PIE|LINE|SCATTER> SELECT <columns> FROM <table> "
      "[JOIN <table> ON <col> = <col>] [WHERE <condition>] "
      "[GROUP BY <columns>] [HAVING <condition>] "
      "[ORDER BY <keys> [ASC|DESC]] [LIMIT <n>] [BIN <column> BY <interval>]\n"
      "Use uppercase keywords and reference only tables and columns from the "
      "schema. Select exactly the columns to plot: x first, then y.";
}

std::string build_system_prompt(const DialogueStatus& status, const Database& db) {
  std::ostringstream out;
  out << "### Task\n";
  out << "# Given a Natural Language Question and conversation context, "
         "generate VQL based on their corresponding Database Schemas.\n";
  out << "\n### Database Schemas:\n";
  out << render_schema(db);
  out << "\n### Please follow the VQL Format Guidelines\n";
  out << vql_format_guidelines() << "\n";
  out << "\n### Natural Language Question\n";
  int round = 1;
  for (const auto& entry : status.history.entries()) {
    out << "## Round " << round << "\n";
    out << "# User: " << entry.nlq << "\n";
    out << "# System: " << entry.clarified_vql << "\n";
    ++round;
  }
  out << "## Round " << round << "\n";
  out << "# User: " << status.current_nlq << "\n";
  out << "# System: [Output VQL]\n";
  out << "\n### Output\n";
  out << "Generate only the VQL, no explanation. Format your response as:\n";
  out << "```VQL\n[Your VQL query here]\n```\n";
  return out.str();
}

std::string build_validation_prompt(const std::string& nlq,
                                    const std::string& candidate,
                                    const Database& db,
                                    const std::vector<std::string>& observations) {
  std::ostringstream out;
  out << "You validate and repair a VQL candidate with tools.\n";
  out << "Tools: syntax (grammar check), schema (table/column grounding), "
         "exec (run the query), intent (match against the request).\n";
  out << "Rules: repair syntax before anything else; run schema before exec.\n";
  out << "Reply with lines:\n";
  out << "Thought: <your reasoning>\n";
  out << "Action: <syntax|schema|exec|intent>\n";
  out << "Candidate: <updated VQL, only when you change it>\n";
  out << "or finish with:\n";
  out << "Final Answer: <the validated VQL>\n";
  out << "\nSchema:\n" << render_schema(db);
  out << "\nRequest: " << nlq << "\n";
  out << "Candidate: " << candidate << "\n";
  if (!observations.empty()) {
    out << "\nObservations so far:\n";
    for (const auto& obs : observations) out << "- " << obs << "\n";
  }
  return out.str();
}

std::string extract_vql_block(const std::string& reply) {
  const std::string lower = ascii_lower(reply);
  std::size_t open = lower.find("```vql");
  std::size_t content_start;
  if (open != std::string::npos) {
    content_start = open + 6;
  } else {
    open = reply.find("```");
    if (open == std::string::npos)
      throw ExtractionError("no fenced VQL block in reply");
    content_start = open + 3;
  }
  if (content_start < reply.size() && reply[content_start] == '\n')
    ++content_start;
  std::size_t close = reply.find("```", content_start);
  std::string body = close == std::string::npos
                         ? reply.substr(content_start)
                         : reply.substr(content_start, close - content_start);
  // Trim surrounding whitespace.
  std::size_t b = body.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) throw ExtractionError("fenced VQL block is empty");
  std::size_t e = body.find_last_not_of(" \t\r\n");
  return body.substr(b, e - b + 1);
}

}  // namespace pmvis
