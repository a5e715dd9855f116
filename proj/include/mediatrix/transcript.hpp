#pragma once

// Machine-readable record of a mediation run, and its JSON and text forms.
//
// JSON layout (schema_version 1):
//   { "schema_version": 1, "scenario_name": str,
//     "outcome": { "status": "success"|"failure", "rounds": int, "reason": str,
//                  "transfers": [str], "final_ownership": { agent: [resource] } },
//     "rounds": [ { "round": int,
//                   "disclosures": [ { "agent": str, "items": [str], "resources": [str] } ],
//                   "revision": { "added": [str], "removed": [str] },
//                   "solution": null | SolutionRecord,
//                   "proposals": [ ProposalRecord ],
//                   "negotiation": null | NegotiationRecord,
//                   "messages": [ { "kind", "sender", "receiver", "content" } ],
//                   "note": str } ] }
// SolutionRecord  = { "transfers": [str], "plans": { agent: label }, "arguments": [ArgumentRecord] }
// ArgumentRecord  = { "conclusion": str, "support": [label], "steps": [str] }
// ProposalRecord  = { "agent", "accepted": bool, "told": [str], "attack": str,
//                     "counter": str, "explanation": [str] }
// NegotiationRecord = { "rejecting": str, "excluded": [str], "repaired": bool,
//                       "solution": null | SolutionRecord, "proposals": [ProposalRecord],
//                       "explanations": { agent: [str] } }

#include <json.hpp>

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mediatrix {

inline constexpr int kTranscriptSchemaVersion = 1;

struct ArgumentRecord {
  std::string conclusion;
  std::vector<std::string> support;
  std::vector<std::string> steps;

  bool operator==(const ArgumentRecord&) const = default;
};

struct SolutionRecord {
  std::vector<std::string> transfers;
  std::map<std::string, std::string> plans;
  std::vector<ArgumentRecord> arguments;

  bool operator==(const SolutionRecord&) const = default;
};

struct ProposalRecord {
  std::string agent;
  bool accepted = true;
  std::vector<std::string> told;
  std::string attack;   // "rebut" / "undercut" / ""
  std::string counter;  // counter-argument conclusion
  std::vector<std::string> explanation;

  bool operator==(const ProposalRecord&) const = default;
};

struct NegotiationRecord {
  std::string rejecting;
  std::vector<std::string> excluded;
  bool repaired = false;
  std::optional<SolutionRecord> solution;
  std::vector<ProposalRecord> proposals;
  std::map<std::string, std::vector<std::string>> explanations;

  bool operator==(const NegotiationRecord&) const = default;
};

struct MessageRecord {
  std::string kind;
  std::string sender;
  std::string receiver;
  std::string content;

  bool operator==(const MessageRecord&) const = default;
};

struct DisclosureRecord {
  std::string agent;
  std::vector<std::string> items;
  std::vector<std::string> resources;

  bool operator==(const DisclosureRecord&) const = default;
};

struct RevisionRecord {
  std::vector<std::string> added;
  std::vector<std::string> removed;

  bool operator==(const RevisionRecord&) const = default;
};

struct RoundRecord {
  int number = 0;
  std::vector<DisclosureRecord> disclosures;
  RevisionRecord revision;
  std::optional<SolutionRecord> solution;
  std::vector<ProposalRecord> proposals;
  std::optional<NegotiationRecord> negotiation;
  std::vector<MessageRecord> messages;
  std::string note;

  bool operator==(const RoundRecord&) const = default;
};

struct OutcomeRecord {
  std::string status = "failure";
  int rounds = 0;
  std::string reason;
  std::vector<std::string> transfers;
  std::map<std::string, std::vector<std::string>> final_ownership;

  bool operator==(const OutcomeRecord&) const = default;
};

struct Transcript {
  int schema_version = kTranscriptSchemaVersion;
  std::string scenario_name;
  OutcomeRecord outcome;
  std::vector<RoundRecord> rounds;

  bool operator==(const Transcript&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ArgumentRecord, conclusion, support, steps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SolutionRecord, transfers, plans, arguments)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ProposalRecord, agent, accepted, told, attack, counter, explanation)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MessageRecord, kind, sender, receiver, content)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DisclosureRecord, agent, items, resources)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RevisionRecord, added, removed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OutcomeRecord, status, rounds, reason, transfers, final_ownership)

namespace detail {

template <typename T>
std::optional<T> optional_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const NegotiationRecord& n) {
  j = nlohmann::json{{"rejecting", n.rejecting},
                     {"excluded", n.excluded},
                     {"repaired", n.repaired},
                     {"solution", n.solution ? nlohmann::json(*n.solution) : nlohmann::json(nullptr)},
                     {"proposals", n.proposals},
                     {"explanations", n.explanations}};
}

inline void from_json(const nlohmann::json& j, NegotiationRecord& n) {
  j.at("rejecting").get_to(n.rejecting);
  j.at("excluded").get_to(n.excluded);
  j.at("repaired").get_to(n.repaired);
  n.solution = detail::optional_from<SolutionRecord>(j, "solution");
  j.at("proposals").get_to(n.proposals);
  j.at("explanations").get_to(n.explanations);
}

inline void to_json(nlohmann::json& j, const RoundRecord& r) {
  j = nlohmann::json{{"round", r.number},
                     {"disclosures", r.disclosures},
                     {"revision", r.revision},
                     {"solution", r.solution ? nlohmann::json(*r.solution) : nlohmann::json(nullptr)},
                     {"proposals", r.proposals},
                     {"negotiation", r.negotiation ? nlohmann::json(*r.negotiation) : nlohmann::json(nullptr)},
                     {"messages", r.messages},
                     {"note", r.note}};
}

inline void from_json(const nlohmann::json& j, RoundRecord& r) {
  j.at("round").get_to(r.number);
  j.at("disclosures").get_to(r.disclosures);
  j.at("revision").get_to(r.revision);
  r.solution = detail::optional_from<SolutionRecord>(j, "solution");
  j.at("proposals").get_to(r.proposals);
  r.negotiation = detail::optional_from<NegotiationRecord>(j, "negotiation");
  j.at("messages").get_to(r.messages);
  j.at("note").get_to(r.note);
}

inline void to_json(nlohmann::json& j, const Transcript& t) {
  j = nlohmann::json{{"schema_version", t.schema_version},
                     {"scenario_name", t.scenario_name},
                     {"outcome", t.outcome},
                     {"rounds", t.rounds}};
}

inline void from_json(const nlohmann::json& j, Transcript& t) {
  j.at("schema_version").get_to(t.schema_version);
  j.at("scenario_name").get_to(t.scenario_name);
  j.at("outcome").get_to(t.outcome);
  j.at("rounds").get_to(t.rounds);
}

enum class Format { Text, Json };
enum class Verbosity { Quiet, Normal, Trace };

namespace detail {

inline void write_solution(std::ostringstream& os, const SolutionRecord& s, Verbosity v, const std::string& indent) {
  os << indent << "solution:\n";
  for (const auto& [agent, label] : s.plans) os << indent << "  plan " << agent << " via " << label << "\n";
  for (const auto& a : s.arguments) {
    os << indent << "  argument " << a.conclusion << " support {";
    for (std::size_t i = 0; i < a.support.size(); ++i) os << (i ? ", " : "") << a.support[i];
    os << "}\n";
    if (v == Verbosity::Trace)
      for (const auto& st : a.steps) os << indent << "    step " << st << "\n";
  }
  for (const auto& t : s.transfers) os << indent << "  transfer " << t << "\n";
}

inline void write_proposal(std::ostringstream& os, const ProposalRecord& p, Verbosity v, const std::string& indent) {
  os << indent << "propose " << p.agent << ": " << (p.accepted ? "accept" : "reject") << "\n";
  if (v == Verbosity::Trace)
    for (const auto& t : p.told) os << indent << "  told " << t << "\n";
  if (!p.accepted) {
    os << indent << "  " << p.attack << " " << p.counter << "\n";
    for (const auto& e : p.explanation) os << indent << "  because " << e << "\n";
  }
}

}  // namespace detail

inline std::string to_text(const Transcript& t, Verbosity v = Verbosity::Normal) {
  std::ostringstream os;
  os << "scenario " << t.scenario_name << "\n";
  if (v != Verbosity::Quiet) {
    for (const auto& r : t.rounds) {
      os << "round " << r.number << "\n";
      for (const auto& d : r.disclosures) {
        for (const auto& i : d.items) os << "  " << d.agent << " discloses " << i << "\n";
        for (const auto& res : d.resources) os << "  " << d.agent << " declares resource " << res << "\n";
      }
      for (const auto& a : r.revision.added) os << "  mediator adds " << a << "\n";
      for (const auto& a : r.revision.removed) os << "  mediator drops " << a << "\n";
      if (r.solution)
        detail::write_solution(os, *r.solution, v, "  ");
      else
        os << "  no solution\n";
      for (const auto& p : r.proposals) detail::write_proposal(os, p, v, "  ");
      if (r.negotiation) {
        const auto& n = *r.negotiation;
        os << "  negotiate after rejection by " << n.rejecting << "\n";
        for (const auto& e : n.excluded) os << "    exclude " << e << "\n";
        if (n.solution) detail::write_solution(os, *n.solution, v, "    ");
        for (const auto& p : n.proposals) detail::write_proposal(os, p, v, "    ");
        os << "    " << (n.repaired ? "repaired" : "not repaired") << "\n";
        if (v == Verbosity::Trace)
          for (const auto& [agent, items] : n.explanations)
            for (const auto& e : items) os << "    explanation " << agent << " " << e << "\n";
      }
      for (const auto& m : r.messages)
        os << "  " << m.kind << " " << m.sender << " -> " << m.receiver << ": " << m.content << "\n";
      if (!r.note.empty()) os << "  " << r.note << "\n";
    }
  }
  os << "outcome " << t.outcome.status << " after " << t.outcome.rounds << " round(s): " << t.outcome.reason << "\n";
  for (const auto& tr : t.outcome.transfers) os << "transfer " << tr << "\n";
  for (const auto& [agent, items] : t.outcome.final_ownership) {
    os << "owns " << agent << " {";
    for (std::size_t i = 0; i < items.size(); ++i) os << (i ? ", " : "") << items[i];
    os << "}\n";
  }
  return os.str();
}

inline std::string to_json_text(const Transcript& t) { return nlohmann::json(t).dump(2) + "\n"; }

inline std::string serialize_transcript(const Transcript& t, Format f, Verbosity v = Verbosity::Normal) {
  return f == Format::Json ? to_json_text(t) : to_text(t, v);
}

inline Transcript parse_transcript_json(const std::string& text) {
  return nlohmann::json::parse(text).get<Transcript>();
}

}  // namespace mediatrix
