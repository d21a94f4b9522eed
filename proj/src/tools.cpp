#include "pmvis/tools.hpp"

#include <algorithm>
#include <sstream>

#include "pmvis/errors.hpp"
#include "pmvis/text_util.hpp"

namespace pmvis {

std::string to_string(ToolId id) {
  switch (id) {
    case ToolId::Syntax: return "syntax";
    case ToolId::Schema: return "schema";
    case ToolId::Exec: return "exec";
    case ToolId::Intent: return "intent";
  }
  return "?";
}

std::optional<ToolId> tool_from_string(const std::string& name) {
  const std::string n = ascii_lower(name);
  if (n == "syntax") return ToolId::Syntax;
  if (n == "schema") return ToolId::Schema;
  if (n == "exec") return ToolId::Exec;
  if (n == "intent") return ToolId::Intent;
  return std::nullopt;
}

std::optional<std::string> suggest_name(const std::string& unknown,
                                        const std::vector<std::string>& candidates) {
  const std::string want = ascii_lower(unknown);
  std::optional<std::string> best;
  std::size_t best_dist = SIZE_MAX;
  for (const auto& cand : candidates) {
    const std::string have = ascii_lower(cand);
    std::size_t dist = edit_distance(want, have);
    bool contained = want.size() >= 3 && have.find(want) != std::string::npos;
    if (dist > 2 && !contained) continue;
    if (contained) dist = std::min<std::size_t>(dist, 2);  // rank with typos
    if (dist < best_dist || (dist == best_dist && best && have < ascii_lower(*best))) {
      best_dist = dist;
      best = cand;
    }
  }
  return best;
}

ToolVerdict tool_syntax(const std::string& candidate) {
  ToolVerdict v;
  v.tool = ToolId::Syntax;
  try {
    parse(candidate);
    v.passed = true;
    v.diagnostic = "query parses";
  } catch (const SyntaxError& e) {
    v.passed = false;
    v.diagnostic = e.what();
  }
  return v;
}

ToolVerdict tool_schema(const std::string& candidate, const Database& db) {
  ToolVerdict v;
  v.tool = ToolId::Schema;
  ClauseSet cs;
  try {
    cs = parse(candidate);
  } catch (const SyntaxError& e) {
    v.passed = false;
    v.diagnostic = std::string("candidate does not parse: ") + e.what();
    return v;
  }

  std::vector<std::string> problems;

  const auto tables = table_names(db);
  std::vector<std::string> table_pool(tables.begin(), tables.end());
  for (const auto& ref : cs.table_refs()) {
    if (tables.count(ref.table.key)) continue;
    std::string msg = "no such table: " + ref.table.display;
    if (auto hint = suggest_name(ref.table.key, table_pool))
      msg += " (did you mean " + *hint + "?)";
    problems.push_back(std::move(msg));
  }

  std::vector<std::string> column_pool;
  for (const auto& t : db.tables())
    for (const auto& col : t.columns) column_pool.push_back(col.name);

  try {
    const auto catalog = column_names(db);
    std::set<std::string> reported;
    for (const auto& col : referenced_columns(cs)) {
      if (catalog.count(col)) continue;
      auto dot = col.find('.');
      std::string bare = col.substr(dot + 1);
      if (!reported.insert(bare).second) continue;
      // Report the casing the candidate actually used.
      for (const auto& ref : column_references(cs))
        if (ref.column.key == bare) {
          bare = ref.column.display;
          break;
        }
      std::string msg = "no such column: " + bare;
      if (auto hint = suggest_name(bare, column_pool))
        msg += " (did you mean " + *hint + "?)";
      problems.push_back(std::move(msg));
    }
  } catch (const AmbiguousColumn& e) {
    problems.push_back(e.what());
  }

  if (problems.empty()) {
    v.passed = true;
    v.diagnostic = "all tables and columns are grounded";
  } else {
    v.passed = false;
    std::ostringstream out;
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i) out << "; ";
      out << problems[i];
    }
    v.diagnostic = out.str();
  }
  return v;
}

ToolVerdict tool_exec(const std::string& candidate, const Database& db) {
  ToolVerdict v;
  v.tool = ToolId::Exec;
  ClauseSet cs = parse(candidate);  // gate guarantees this succeeds
  try {
    ResultTable result = execute(cs, db);
    if (result.rows.empty()) {
      v.passed = false;
      v.diagnostic = "empty result";
    } else {
      v.passed = true;
      v.diagnostic = "returned " + std::to_string(result.rows.size()) + " rows";
    }
    v.result = std::move(result);
  } catch (const ExecutionError& e) {
    v.passed = false;
    v.diagnostic = e.what();
  }
  return v;
}

namespace {

std::string humanize(const std::string& name) {
  std::string out = ascii_lower(name);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::vector<std::string> status_nlqs(const DialogueStatus& status) {
  std::vector<std::string> out;
  for (const auto& e : status.history.entries()) out.push_back(e.nlq);
  out.push_back(status.current_nlq);
  return out;
}

std::optional<ChartType> chart_from_word(const std::string& word) {
  if (word == "bar") return ChartType::Bar;
  if (word == "pie") return ChartType::Pie;
  if (word == "line") return ChartType::Line;
  if (word == "scatter") return ChartType::Scatter;
  return std::nullopt;
}

std::string strip_punct(const std::string& token) {
  std::size_t b = 0, e = token.size();
  while (b < e && !std::isalnum(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !std::isalnum(static_cast<unsigned char>(token[e - 1]))) --e;
  return token.substr(b, e - b);
}

/// Rule (a): the last chart keyword mentioned anywhere in the dialogue.
std::optional<ChartType> requested_chart(const std::vector<std::string>& nlqs) {
  std::optional<ChartType> last;
  for (const auto& nlq : nlqs)
    for (const auto& raw : whitespace_tokens(ascii_lower(nlq)))
      if (auto chart = chart_from_word(strip_punct(raw))) last = chart;
  return last;
}

bool phrase_matches_column(const std::string& phrase, const std::string& column) {
  const std::string human = humanize(column);
  if (human == phrase) return true;
  if (edit_distance(human, phrase) <= 2) return true;
  if (phrase.size() >= 3) {
    // Token-boundary containment: "address" inside "street address".
    auto pos = human.find(phrase);
    while (pos != std::string::npos) {
      bool left_ok = pos == 0 || human[pos - 1] == ' ';
      std::size_t end = pos + phrase.size();
      bool right_ok = end == human.size() || human[end] == ' ';
      if (left_ok && right_ok) return true;
      pos = human.find(phrase, pos + 1);
    }
  }
  return false;
}

/// Phrase following a lexicon trigger, cut at the next boundary word.
std::optional<std::string> phrase_after(const std::string& text,
                                        const std::string& trigger) {
  auto pos = text.find(trigger);
  if (pos == std::string::npos) return std::nullopt;
  std::string rest = text.substr(pos + trigger.size());
  static const char* kBoundaries[] = {" using", " for ",   " with", " ordered",
                                      " order", " sorted", " in a", ",",
                                      ".",      "?",       " and "};
  std::size_t cut = rest.size();
  for (const char* b : kBoundaries) {
    auto p = rest.find(b);
    if (p != std::string::npos) cut = std::min(cut, p);
  }
  std::string phrase = rest.substr(0, cut);
  std::size_t begin = phrase.find_first_not_of(' ');
  if (begin == std::string::npos) return std::nullopt;
  std::size_t end = phrase.find_last_not_of(' ');
  return phrase.substr(begin, end - begin + 1);
}

ToolVerdict llm_intent(const std::string& candidate, const DialogueStatus& status,
                       const Database& db, LlmClient& llm) {
  std::ostringstream prompt;
  prompt << "Decide whether the candidate VQL is ambiguous or mismatched "
            "against the user's requests. Reply 'OK' or 'AMBIGUOUS: "
            "<clarifying question>'.\n";
  prompt << "Requests:\n";
  for (const auto& nlq : status_nlqs(status)) prompt << "- " << nlq << "\n";
  prompt << "Candidate: " << candidate << "\n";
  prompt << "Schema:\n";
  for (const auto& t : db.tables()) prompt << t.name << "\n";
  LlmRequest req;
  req.messages = {{"user", prompt.str()}};
  req.round = status.round;
  req.step = 0;
  req.purpose = "intent";
  LlmReply reply = llm.complete(req);
  ToolVerdict v;
  v.tool = ToolId::Intent;
  const std::string lower = ascii_lower(reply.text);
  if (lower.rfind("ambiguous", 0) == 0) {
    v.passed = false;
    auto colon = reply.text.find(':');
    std::string question = colon == std::string::npos
                               ? "Could you clarify your request?"
                               : reply.text.substr(colon + 1);
    v.diagnostic = "intent flagged by model";
    v.clarification = ClarificationRequest::make(status.round, question);
  } else {
    v.passed = true;
    v.diagnostic = "intent matches";
  }
  return v;
}

}  // namespace

ToolVerdict tool_intent(const std::string& candidate,
                        const DialogueStatus& status, const Database& db,
                        LlmClient* llm) {
  if (llm) return llm_intent(candidate, status, db, *llm);

  ToolVerdict v;
  v.tool = ToolId::Intent;

  ClauseSet cs;
  try {
    cs = parse(candidate);
  } catch (const SyntaxError& e) {
    v.passed = false;
    v.diagnostic = std::string("candidate does not parse: ") + e.what();
    return v;
  }

  const auto nlqs = status_nlqs(status);

  // (a) chart keyword vs VISUALIZE clause.
  if (auto wanted = requested_chart(nlqs)) {
    std::optional<ChartType> drawn;
    if (cs.visualize) drawn = cs.visualize->chart;
    if (!drawn || *drawn != *wanted) {
      const std::string want_word = ascii_lower(to_keyword(*wanted));
      const std::string have =
          drawn ? ascii_lower(to_keyword(*drawn)) : std::string("no chart");
      v.passed = false;
      v.diagnostic = "chart type mismatch: the request mentions a " +
                     want_word + " chart but the candidate draws " + have;
      v.clarification = ClarificationRequest::make(
          status.round,
          "The request mentions a " + want_word +
              " chart but the current query draws " + have +
              ". Which chart type did you intend?",
          "chart", want_word);
      return v;
    }
  }

  // (b) a noun phrase matching several schema columns, none in the candidate.
  std::set<std::string> used;
  try {
    for (const auto& qualified : referenced_columns(cs)) {
      auto dot = qualified.find('.');
      used.insert(qualified.substr(dot + 1));
    }
  } catch (const AmbiguousColumn&) {
    // unresolvable candidate references are the schema tool's business
  }
  std::vector<std::string> all_columns;
  for (const auto& t : db.tables())
    for (const auto& col : t.columns) all_columns.push_back(col.key());

  for (const auto& nlq : nlqs) {
    const auto tokens = whitespace_tokens(ascii_lower(nlq));
    std::vector<std::string> phrases;
    for (const auto& raw : tokens) {
      std::string tok = strip_punct(raw);
      if (tok.size() >= 3) phrases.push_back(tok);
    }
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      std::string a = strip_punct(tokens[i]), b = strip_punct(tokens[i + 1]);
      if (a.size() >= 2 && b.size() >= 2) phrases.push_back(a + " " + b);
    }
    for (const auto& phrase : phrases) {
      std::set<std::string> matches;
      for (const auto& col : all_columns)
        if (phrase_matches_column(phrase, col)) matches.insert(col);
      if (matches.size() < 2) continue;
      bool any_used = false;
      for (const auto& col : matches)
        if (used.count(col)) any_used = true;
      if (any_used) continue;
      v.passed = false;
      v.diagnostic = "'" + phrase + "' matches " +
                     std::to_string(matches.size()) +
                     " schema columns and the candidate uses none of them";
      v.clarification = ClarificationRequest::make(
          status.round, "Which column did you mean by '" + phrase + "'?",
          "column", phrase);
      return v;
    }
  }

  // (c) candidate aggregates a column the request asks for raw.
  for (const auto& nlq : nlqs) {
    const std::string lower = ascii_lower(nlq);
    for (const char* trigger : {"compare the ", "show the "}) {
      auto phrase = phrase_after(lower, trigger);
      if (!phrase) continue;
      for (const auto& item : cs.select.items) {
        if (!item.agg || item.agg->star) continue;
        const std::string col = humanize(item.agg->col.column.display);
        if (phrase->find(col) == std::string::npos) continue;
        v.passed = false;
        v.diagnostic = "the candidate aggregates " + col +
                       " which the request asks for raw ('" + trigger +
                       *phrase + "')";
        v.clarification = ClarificationRequest::make(
            status.round,
            "Should " + col + " be aggregated, or shown as raw values?",
            "aggregate", col);
        return v;
      }
    }
  }

  v.passed = true;
  v.diagnostic = "intent matches";
  return v;
}

}  // namespace pmvis
