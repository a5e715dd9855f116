#pragma once

// The mediator: base revision, joint solution search, proposals, the
// single-repair negotiation and the round loop.

#include "mediatrix/agent.hpp"
#include "mediatrix/argument.hpp"
#include "mediatrix/engine.hpp"
#include "mediatrix/error.hpp"
#include "mediatrix/logic.hpp"
#include "mediatrix/theory.hpp"
#include "mediatrix/transcript.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mediatrix {

struct MediatorState {
  std::string id = "mu";
  Theory theory;
  std::vector<Resource> resources;
  bool generous = false;
  std::string prefix = "M.";
  std::set<Bridge> bridges{Bridge::Advice, Bridge::EnablingAdvice, Bridge::AcceptRequest};
  std::map<std::string, std::string> origin;  // own label -> label at the source

  // Rules with free variables and the principles; kept for later cases.
  Theory general_theory() const {
    Theory t;
    for (const auto& r : theory.items)
      if (!variables(r).empty()) t.items.push_back(r);
    t.principles = theory.principles;
    return t;
  }

  Theory case_theory() const {
    Theory t;
    for (const auto& r : theory.items)
      if (variables(r).empty()) t.items.push_back(r);
    return t;
  }
};

// --- revision ----------------------------------------------------------------

struct Revision {
  Theory result;
  std::vector<Rule> added;
  std::vector<Rule> removed;

  bool changed() const { return !added.empty() || !removed.empty(); }
};

// Newest wins: a stored fact contradicted by an incoming one is dropped.
inline Revision revise_with_delta(const Theory& gamma, const Theory& incoming) {
  for (std::size_t i = 0; i < incoming.items.size(); ++i)
    for (std::size_t j = i + 1; j < incoming.items.size(); ++j) {
      const Rule& a = incoming.items[i];
      const Rule& b = incoming.items[j];
      if (a.is_fact() && b.is_fact() && complementary(a.head, b.head))
        throw IncoherentInput("incoming knowledge holds " + to_string(a.head) + " and its complement");
    }

  Revision rev;
  rev.result = gamma;
  for (const auto& in : incoming.items) {
    if (!in.is_fact()) continue;
    auto& items = rev.result.items;
    for (auto it = items.begin(); it != items.end();) {
      if (it->is_fact() && complementary(it->head, in.head)) {
        rev.removed.push_back(*it);
        it = items.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (const auto& in : incoming.items)
    if (rev.result.add(in)) rev.added.push_back(in);
  for (const auto& p : incoming.principles) {
    if (rev.result.principle_label(p.principle)) continue;
    rev.result.add_principle(p.principle, p.label);
    rev.added.push_back(Rule::fact(p.label, Literal::atom(std::string(name_of(p.principle)), {})));
  }
  return rev;
}

inline Theory revise(const Theory& gamma, const Theory& incoming) { return revise_with_delta(gamma, incoming).result; }

inline Theory revise(const Theory& gamma, const std::vector<Rule>& incoming) {
  Theory t;
  t.items = incoming;
  return revise(gamma, t);
}

// Variables renamed by first occurrence, so rules differing only in variable
// names compare equal.
inline Rule canonical_rule(const Rule& r) {
  Substitution s;
  std::size_t n = 0;
  auto visit = [&](const Term& t) {
    if (t.is_variable() && s.resolve(t) == t) s.bind(t.name, Term::variable("%v" + std::to_string(n++)));
  };
  auto visit_lit = [&](const Literal& l) {
    if (l.is_modal()) visit(l.owner);
    for (const auto& a : l.args) visit(a);
  };
  visit_lit(r.head);
  for (const auto& l : r.body) visit_lit(l);
  for (const auto& l : r.absent) visit_lit(l);
  for (const auto& d : r.distinct) {
    visit(d.lhs);
    visit(d.rhs);
  }
  return apply(s, r);
}

// Renames incoming knowledge into the mediator's label space, facts before
// rules, dropping anything whose content is already known.
inline Theory relabel(MediatorState& m, const Theory& gamma, const Theory& incoming) {
  std::size_t next = 1;
  auto bump = [&](const std::string& label) {
    if (label.rfind(m.prefix, 0) != 0) return;
    const std::string rest = label.substr(m.prefix.size());
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](char c) { return c >= '0' && c <= '9'; })) return;
    next = std::max(next, static_cast<std::size_t>(std::stoul(rest)) + 1);
  };
  for (const auto& r : gamma.items) bump(r.label);
  for (const auto& [own, src] : m.origin) bump(own);

  Theory out;
  std::vector<Rule> seen;
  for (const auto& r : gamma.items) seen.push_back(canonical_rule(r));
  auto take = [&](const Rule& r) {
    Rule key = canonical_rule(r);
    if (std::any_of(seen.begin(), seen.end(), [&](const Rule& x) { return x.same_content(key); })) return;
    seen.push_back(std::move(key));
    Rule copy = r;
    copy.label = m.prefix + std::to_string(next++);
    copy.sources.clear();
    m.origin[copy.label] = r.label;
    out.items.push_back(std::move(copy));
  };
  for (const auto& r : incoming.items)
    if (r.is_fact()) take(r);
  for (const auto& r : incoming.items)
    if (!r.is_fact()) take(r);
  out.principles = incoming.principles;
  return out;
}

// --- solution search ---------------------------------------------------------

struct Goal {
  std::string agent;
  Literal goal;  // plain atom, e.g. can(alpha, hang_picture)

  bool operator==(const Goal&) const = default;
};

struct SearchSpace {
  std::vector<std::string> parties;  // the negotiating agents, sorted
  std::string mediator;
  bool generous = false;
  std::vector<Goal> goals;
  Ownership ownership;
  std::set<Transfer> excluded;
};

inline bool is_have(const Literal& l) {
  return !l.is_modal() && !l.negated && l.predicate == "have" && l.args.size() == 2 && l.is_ground();
}

inline bool is_give_intention(const Literal& l) {
  return l.modality == Modality::Intention && !l.negated && l.predicate == "give" && l.args.size() == 3 &&
         l.is_ground() && l.owner.is_constant();
}

inline Literal transfer_intention(const Transfer& t, const std::string& who) {
  return t.action().tagged(Modality::Intention, Term::constant(who));
}

// Goals, ownership and exclusions as recorded in gamma.
inline SearchSpace search_space(const Theory& gamma, std::vector<std::string> parties, const std::string& mediator,
                                bool generous, const std::vector<Resource>& mediator_resources = {}) {
  SearchSpace s;
  std::sort(parties.begin(), parties.end());
  s.parties = parties;
  s.mediator = mediator;
  s.generous = generous;
  for (const auto& r : gamma.items) {
    if (!r.is_fact()) continue;
    const Literal& h = r.head;
    if (is_have(h)) s.ownership[h.args[0].name].insert(h.args[1].name);
    if (h.modality == Modality::Intention && h.owner.is_constant() && h.is_ground() &&
        std::find(parties.begin(), parties.end(), h.owner.name) != parties.end()) {
      if (!h.negated && h.predicate != "give") s.goals.push_back({h.owner.name, h.inner()});
      if (h.negated && h.predicate == "give" && h.args.size() == 3 && h.args[1] == h.owner)
        s.excluded.insert({h.args[0].name, h.args[1].name, h.args[2].name});
    }
  }
  for (const auto& res : mediator_resources) s.ownership[mediator].insert(res.name);
  std::stable_sort(s.goals.begin(), s.goals.end(), [](const Goal& a, const Goal& b) { return a.agent < b.agent; });
  return s;
}

struct Assignment {
  std::string agent;
  Plan plan;
};

struct Solution {
  std::vector<Argument> arguments;
  std::vector<Assignment> plans;
  std::vector<Transfer> transfers;
  CompileContext context;

  std::vector<Literal> conclusions() const {
    std::vector<Literal> out;
    for (const auto& a : arguments) out.push_back(a.conclusion);
    return out;
  }
};

namespace detail {

struct Candidate {
  std::size_t goal = 0;
  Rule rule;  // instantiated
  std::string label;
  std::vector<std::pair<std::string, std::string>> holds;  // have(owner, resource) preconditions
  std::size_t unmet = 0;
};

inline void groundings(const std::vector<std::string>& vars, std::size_t i, Substitution& s,
                       const std::set<std::string>& domain, const std::function<void(const Substitution&)>& k) {
  if (i == vars.size()) {
    k(s);
    return;
  }
  for (const auto& c : domain) {
    Substitution next = s;
    next.bind(vars[i], Term::constant(c));
    groundings(vars, i + 1, next, domain, k);
  }
}

inline std::vector<Candidate> candidates(const Theory& gamma, const SearchSpace& space, std::size_t gi,
                                         const FactBase& fixpoint, const std::set<std::string>& domain) {
  const Literal& goal = space.goals[gi].goal;
  std::vector<Candidate> out;
  for (const auto& r : gamma.items) {
    if (r.is_fact() || r.head.is_modal() || r.head.negated) continue;
    auto u = unify(r.head, goal);
    if (!u) continue;
    Rule base = apply(*u, r);
    auto open_set = variables(base);
    std::vector<std::string> open(open_set.begin(), open_set.end());
    Substitution s;
    groundings(open, 0, s, domain, [&](const Substitution& g) {
      Rule inst = apply(g, base);
      for (const auto& d : inst.distinct)
        if (d.lhs == d.rhs) return;
      for (const auto& a : inst.absent)
        if (fixpoint.contains(a)) return;
      Candidate c;
      c.goal = gi;
      c.label = r.label;
      for (const auto& b : inst.body) {
        if (is_have(b)) {
          c.holds.emplace_back(b.args[0].name, b.args[1].name);
          auto it = space.ownership.find(b.args[0].name);
          if (it == space.ownership.end() || !it->second.count(b.args[1].name)) ++c.unmet;
        } else if (!fixpoint.contains(b)) {
          return;
        }
      }
      c.rule = std::move(inst);
      for (const auto& o : out)
        if (o.label == c.label && o.rule.same_content(c.rule)) return;
      out.push_back(std::move(c));
    });
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.unmet != b.unmet) return a.unmet < b.unmet;
    return label_less(a.label, b.label);
  });
  return out;
}

}  // namespace detail

// Depth-first over plan choices per goal (agents by id, unique-choice order)
// and then donors per missing resource (by id). The first assignment for
// which every transfer is argued for from gamma is returned.
inline std::optional<Solution> create_solution(const Theory& gamma, const SearchSpace& space,
                                               std::size_t depth = kDefaultProofDepth) {
  if (space.goals.empty()) return std::nullopt;
  const Program plain = compile(gamma);
  const FactBase fixpoint = forward_chain(plain, ChainOptions{false});

  std::vector<std::vector<detail::Candidate>> options;
  for (std::size_t i = 0; i < space.goals.size(); ++i) {
    options.push_back(detail::candidates(gamma, space, i, fixpoint, plain.domain));
    if (options.back().empty()) return std::nullopt;
  }

  std::vector<std::string> donors = space.parties;
  donors.push_back(space.mediator);
  std::sort(donors.begin(), donors.end());
  donors.erase(std::unique(donors.begin(), donors.end()), donors.end());
  auto is_party = [&](const std::string& x) {
    return std::find(space.parties.begin(), space.parties.end(), x) != space.parties.end();
  };
  auto owns = [&](const Ownership& w, const std::string& who, const std::string& what) {
    auto it = w.find(who);
    return it != w.end() && it->second.count(what) > 0;
  };

  std::vector<std::size_t> pick(space.goals.size(), 0);
  std::optional<Solution> found;

  auto build = [&](const std::vector<Transfer>& transfers) -> bool {
    CompileContext ctx;
    if (space.generous) ctx.generous = space.mediator;
    std::set<std::string> chosen, dropped;
    for (std::size_t i = 0; i < options.size(); ++i)
      for (std::size_t j = 0; j < options[i].size(); ++j) (j == pick[i] ? chosen : dropped).insert(options[i][j].label);
    for (const auto& l : dropped)
      if (!chosen.count(l)) ctx.excluded.insert(l);

    Solution sol;
    sol.context = ctx;
    sol.transfers = transfers;
    for (const auto& t : transfers) {
      std::optional<Argument> arg;
      try {
        arg = construct_argument(gamma, transfer_intention(t, t.receiver), ctx, depth);
      } catch (const DepthExceeded&) {
        return false;
      }
      if (!arg) return false;
      sol.arguments.push_back(std::move(*arg));
    }
    for (std::size_t i = 0; i < options.size(); ++i) {
      const auto& c = options[i][pick[i]];
      Plan p;
      p.goal = space.goals[i].goal;
      p.rule = c.rule;
      p.rule.label = c.label;
      p.selected = true;
      for (const auto& [who, what] : c.holds)
        if (!owns(space.ownership, who, what))
          p.unmet.push_back(Literal::atom("have", {Term::constant(who), Term::constant(what)}));
      for (const auto& t : transfers)
        if (t.receiver == space.goals[i].agent &&
            std::find(c.holds.begin(), c.holds.end(), std::make_pair(t.receiver, t.resource)) != c.holds.end())
          p.transfers.push_back(t);
      sol.plans.push_back({space.goals[i].agent, std::move(p)});
    }
    found = std::move(sol);
    return true;
  };

  auto assign = [&]() -> bool {
    std::map<std::string, std::set<std::string>> keep;
    std::vector<Transfer> needs;
    for (std::size_t i = 0; i < options.size(); ++i) {
      const auto& c = options[i][pick[i]];
      const std::string& agent = space.goals[i].agent;
      for (const auto& [who, what] : c.holds) {
        keep[who].insert(what);
        if (who == agent && is_party(who) && !owns(space.ownership, who, what)) {
          Transfer t{"", who, what};
          if (std::find(needs.begin(), needs.end(), t) == needs.end()) needs.push_back(t);
        }
      }
    }
    std::vector<Transfer> chosen;
    std::set<std::string> moved;
    std::function<bool(std::size_t)> donate = [&](std::size_t k) -> bool {
      if (k == needs.size()) {
        Ownership world = space.ownership;
        for (const auto& t : chosen) world = execute_give(world, t);
        for (std::size_t i = 0; i < options.size(); ++i)
          for (const auto& [who, what] : options[i][pick[i]].holds)
            if (!owns(world, who, what)) return false;
        return build(chosen);
      }
      const Transfer& need = needs[k];
      if (moved.count(need.resource)) return false;
      for (const auto& d : donors) {
        if (d == need.receiver || !owns(space.ownership, d, need.resource)) continue;
        if (d == space.mediator && !is_party(d) && !space.generous) continue;
        if (is_party(d) && keep[d].count(need.resource)) continue;
        Transfer t{d, need.receiver, need.resource};
        if (space.excluded.count(t)) continue;
        chosen.push_back(t);
        moved.insert(t.resource);
        if (donate(k + 1)) return true;
        chosen.pop_back();
        moved.erase(t.resource);
      }
      return false;
    };
    return donate(0);
  };

  std::function<bool(std::size_t)> choose = [&](std::size_t i) -> bool {
    if (i == options.size()) return assign();
    for (std::size_t j = 0; j < options[i].size(); ++j) {
      pick[i] = j;
      if (choose(i + 1)) return true;
    }
    return false;
  };
  choose(0);
  return found;
}

inline std::optional<Solution> create_solution(const Theory& gamma, const std::vector<std::string>& parties,
                                               const MediatorState& m, const std::set<Transfer>& excluded = {},
                                               std::size_t depth = kDefaultProofDepth) {
  SearchSpace space = search_space(gamma, parties, m.id, m.generous, m.resources);
  space.excluded.insert(excluded.begin(), excluded.end());
  return create_solution(gamma, space, depth);
}

// Unicity and feasibility of a solution, replayed from the given ownership.
inline bool check_solution(const Solution& s, const Ownership& start) {
  Ownership world = start;
  std::set<std::string> moved;
  for (const auto& t : s.transfers) {
    if (!moved.insert(t.resource).second) return false;
    try {
      world = execute_give(world, t);
    } catch (const NotOwner&) {
      return false;
    }
  }
  for (const auto& [agent, plan] : s.plans) {
    Theory t;
    for (const auto& [who, what] : world)
      for (const auto& r : what)
        t.items.push_back(Rule::fact("own:" + who + ":" + r, Literal::atom("have", {Term::constant(who), Term::constant(r)})));
    Rule r = plan.rule;
    std::erase_if(r.body, [](const Literal& l) { return !is_have(l); });
    r.absent.clear();
    t.items.push_back(r);
    if (!forward_chain(compile(t), ChainOptions{false}).contains(plan.goal)) return false;
  }
  return true;
}

// --- proposals ---------------------------------------------------------------

struct ProposalResult {
  std::string agent;
  bool accepted = true;
  Theory explanation;
  std::vector<Argument> told;
  std::vector<Decision> decisions;
  std::vector<Message> messages;
};

inline std::optional<Transfer> transfer_of(const Literal& l) {
  if (l.predicate != "give" || l.args.size() != 3 || !l.is_ground()) return std::nullopt;
  return Transfer{l.args[0].name, l.args[1].name, l.args[2].name};
}

// Tells the agent the arguments that concern it: first those for what it is
// to receive, which it adopts as it accepts them, then those for what it is to
// give away.
inline ProposalResult propose(const MediatorState& m, const Theory& gamma, const AgentState& agent,
                              const Solution& s, std::size_t depth = kDefaultProofDepth) {
  ProposalResult res;
  res.agent = agent.id;
  AgentState working = agent;

  auto offer = [&](const Argument& arg, bool adopt_on_accept) {
    res.told.push_back(arg);
    res.messages.push_back({Message::Kind::Tell, m.id, agent.id, arg.conclusion, arg.support, std::nullopt, 0.0});
    Decision d = evaluate(working, arg, depth);
    if (d.accepted()) {
      if (adopt_on_accept) {
        Theory told = arg.support;
        told.add(Rule::fact("R.3:" + to_string(arg.conclusion), arg.conclusion));
        adopt(working, told);
      }
    } else {
      res.accepted = false;
      res.explanation = res.explanation.merged(d.explanation);
    }
    res.decisions.push_back(std::move(d));
  };

  for (const auto& a : s.arguments)
    if (a.conclusion.owner == Term::constant(agent.id)) offer(a, true);
  for (std::size_t i = 0; i < s.transfers.size(); ++i) {
    const Transfer& t = s.transfers[i];
    if (t.giver != agent.id) continue;
    std::optional<Argument> commitment;
    try {
      commitment = construct_argument(gamma, transfer_intention(t, t.giver), s.context, depth);
    } catch (const DepthExceeded&) {
      commitment.reset();
    }
    if (commitment)
      offer(*commitment, false);
    else if (i < s.arguments.size())
      offer(s.arguments[i], false);
  }
  Message reply{res.accepted ? Message::Kind::Accept : Message::Kind::Reject, agent.id, m.id, {}, res.explanation,
                std::nullopt, 0.0};
  for (const auto& d : res.decisions)
    if (!d.accepted()) {
      reply.decision = d;
      break;
    }
  res.messages.push_back(std::move(reply));
  return res;
}

// --- negotiation -------------------------------------------------------------

struct NegotiationResult {
  std::string rejecting;
  std::optional<Solution> solution;
  std::vector<Transfer> excluded;
  std::vector<ProposalResult> proposals;
  std::map<std::string, Theory> explanations;
  Theory gamma;  // working theory after adding the counter-argument support
};

// One repair: learn the rejecting agent's counter-argument, drop the attacked
// transfers, search again and re-propose to both.
inline NegotiationResult negotiate(MediatorState& m, const Theory& gamma, const AgentState& a, const AgentState& b,
                                   const Solution& s, const ProposalResult& pa, const ProposalResult& pb,
                                   std::size_t depth = kDefaultProofDepth) {
  if (pa.accepted == pb.accepted) throw std::invalid_argument("negotiate needs exactly one rejection");
  const ProposalResult& rejected = pa.accepted ? pb : pa;

  NegotiationResult out;
  out.rejecting = rejected.agent;
  out.explanations[pa.agent] = pa.explanation;
  out.explanations[pb.agent] = pb.explanation;
  out.gamma = revise(gamma, relabel(m, gamma, rejected.explanation));

  std::set<Transfer> excluded;
  for (const auto& d : rejected.decisions) {
    if (d.accepted() || !d.counter) continue;
    auto t = transfer_of(d.counter->target.conclusion);
    if (t && std::find(s.transfers.begin(), s.transfers.end(), *t) != s.transfers.end()) excluded.insert(*t);
  }
  out.excluded.assign(excluded.begin(), excluded.end());

  out.solution = create_solution(out.gamma, {a.id, b.id}, m, excluded, depth);
  if (!out.solution) {
    // The agent that accepted explains why it still needs what was excluded.
    const AgentState& acceptor = pa.accepted ? a : b;
    Theory why;
    for (const auto& t : excluded) {
      if (t.receiver != acceptor.id) continue;
      const Literal need =
          Literal::atom("have", {Term::constant(t.receiver), Term::constant(t.resource)})
              .tagged(Modality::Intention, Term::constant(acceptor.id));
      std::optional<Argument> arg;
      try {
        arg = construct_argument(reasoning_theory(acceptor), need, plan_context(acceptor), depth);
      } catch (const DepthExceeded&) {
        arg.reset();
      }
      if (arg) why = why.merged(arg->support);
    }
    out.explanations[acceptor.id] = out.explanations[acceptor.id].merged(why);
    return out;
  }

  ProposalResult ra = propose(m, out.gamma, a, *out.solution, depth);
  ProposalResult rb = propose(m, out.gamma, b, *out.solution, depth);
  out.explanations[a.id] = out.explanations[a.id].merged(ra.explanation);
  out.explanations[b.id] = out.explanations[b.id].merged(rb.explanation);
  const bool ok = ra.accepted && rb.accepted;
  out.proposals = {std::move(ra), std::move(rb)};
  if (!ok) out.solution.reset();
  return out;
}

// --- the round loop ----------------------------------------------------------

struct MediationConfig {
  int max_rounds = 64;
  int stall_threshold = 1;
  std::size_t proof_depth = kDefaultProofDepth;
};

enum class Status { Success, Failure };

inline std::string_view name_of(Status s) { return s == Status::Success ? "success" : "failure"; }

struct Outcome {
  Status status = Status::Failure;
  int rounds = 0;
  std::string reason;
  std::optional<Solution> solution;
  Transcript transcript;
  std::vector<AgentState> agents;  // after execution, in declaration order
  MediatorState mediator;
  Ownership final_ownership;
};

namespace detail {

inline std::vector<std::string> describe(const Theory& t) {
  std::vector<std::string> out;
  for (const auto& r : t.items) out.push_back(r.label + " " + to_string(r));
  for (const auto& p : t.principles) out.push_back(p.label + " " + std::string(name_of(p.principle)));
  return out;
}

inline ArgumentRecord record(const Argument& a) {
  ArgumentRecord r;
  r.conclusion = to_string(a.conclusion);
  r.support = labels_in_order(a.support);
  for (const auto& s : a.proof.steps) r.steps.push_back(s.rule + ": " + to_string(s.derived));
  return r;
}

inline SolutionRecord record(const Solution& s) {
  SolutionRecord r;
  for (const auto& t : s.transfers) r.transfers.push_back(to_string(t));
  for (const auto& [agent, plan] : s.plans) {
    auto& slot = r.plans[agent];
    slot += (slot.empty() ? "" : ",") + plan.rule.label;
  }
  for (const auto& a : s.arguments) r.arguments.push_back(record(a));
  return r;
}

inline ProposalRecord record(const ProposalResult& p) {
  ProposalRecord r;
  r.agent = p.agent;
  r.accepted = p.accepted;
  for (const auto& a : p.told) r.told.push_back(to_string(a.conclusion));
  for (const auto& d : p.decisions)
    if (!d.accepted() && d.counter) {
      r.attack = std::string(name_of(d.counter->kind));
      r.counter = to_string(d.counter->attacker.conclusion);
      break;
    }
  r.explanation = describe(p.explanation);
  return r;
}

inline MessageRecord record(const Message& m) {
  return {std::string(name_of(m.kind)), m.sender, m.receiver, m.content.predicate.empty() ? "" : to_string(m.content)};
}

inline Ownership ownership_of(const std::vector<const AgentState*>& states) {
  Ownership w;
  for (const auto* a : states) {
    auto& slot = w[a->id];
    for (const auto& r : a->resources) slot.insert(r.name);
  }
  return w;
}

}  // namespace detail

// Carries out an accepted solution: the mediator tells each receiver the
// intention it should hold (and, with enabling advice, the support behind it),
// receivers ask, owners give. Returns the message log.
inline std::vector<Message> execute_solution(std::vector<AgentState*> parties, AgentState& mediator_agent,
                                             const Solution& s, std::size_t depth = kDefaultProofDepth) {
  std::vector<Message> log;
  std::vector<Message> pending;
  for (const auto& a : s.arguments) {
    if (!a.conclusion.owner.is_constant() || !mediator_agent.bridges.count(Bridge::Advice)) continue;
    Theory enabling;
    if (mediator_agent.bridges.count(Bridge::EnablingAdvice)) enabling = a.support;
    Message m{Message::Kind::Tell, mediator_agent.id, a.conclusion.owner.name, a.conclusion, enabling, std::nullopt,
              0.0};
    pending.push_back(m);
  }
  std::vector<AgentState*> everyone = parties;
  everyone.push_back(&mediator_agent);
  for (int step = 0; step < 16 && !pending.empty(); ++step) {
    log.insert(log.end(), pending.begin(), pending.end());
    std::vector<Message> next;
    for (AgentState* a : everyone) {
      std::vector<Message> inbox;
      for (const auto& m : pending)
        if (m.receiver == a->id) inbox.push_back(m);
      auto [after, out] = bridge_step(*a, inbox, depth);
      *a = std::move(after);
      next.insert(next.end(), out.begin(), out.end());
    }
    pending = std::move(next);
  }
  return log;
}

inline Outcome mediate(AgentState alpha, AgentState beta, MediatorState m, const MediationConfig& config = {},
                       const std::string& name = "") {
  const std::size_t depth = config.proof_depth;
  Outcome out;
  out.transcript.scenario_name = name;
  Theory gamma = m.theory;
  for (const auto& res : m.resources) {
    Theory own;
    own.items.push_back(Rule::fact("res:" + m.id + ":" + res.name,
                                   Literal::atom("have", {Term::constant(m.id), Term::constant(res.name)})));
    gamma = revise(gamma, relabel(m, gamma, own));
  }
  const std::vector<std::string> parties{alpha.id, beta.id};
  int stall = 0;

  auto finish = [&](Status st, int rounds, std::string reason) -> Outcome& {
    out.status = st;
    out.rounds = rounds;
    out.reason = std::move(reason);
    m.theory = gamma;
    out.mediator = m;
    out.agents = {alpha, beta};
    AgentState mu;
    mu.id = m.id;
    mu.resources = m.resources;
    out.final_ownership = detail::ownership_of({&alpha, &beta, &mu});
    auto& rec = out.transcript.outcome;
    rec.status = std::string(name_of(st));
    rec.rounds = rounds;
    rec.reason = out.reason;
    rec.transfers.clear();
    if (out.solution)
      for (const auto& t : out.solution->transfers) rec.transfers.push_back(to_string(t));
    for (const auto& [who, what] : out.final_ownership) rec.final_ownership[who] = {what.begin(), what.end()};
    return out;
  };

  auto negate = [](const Solution& s) {
    Theory t;
    for (const auto& a : s.arguments) t.items.push_back(Rule::fact("not:" + to_string(a.conclusion), complement(a.conclusion)));
    return t;
  };

  for (int round = 1;; ++round) {
    if (round > config.max_rounds) return finish(Status::Failure, round - 1, "round limit exceeded");
    RoundRecord rr;
    rr.number = round;

    Theory incoming;
    for (AgentState* a : {&alpha, &beta}) {
      auto [after, pkg] = disclose(*a, round);
      *a = std::move(after);
      DisclosureRecord dr;
      dr.agent = a->id;
      for (const auto& r : pkg.items) {
        dr.items.push_back(r.label + " " + to_string(r));
        incoming.items.push_back(r);
      }
      for (const auto& r : pkg.resources) dr.resources.push_back(r.name);
      rr.disclosures.push_back(std::move(dr));
    }
    Revision rev = revise_with_delta(gamma, relabel(m, gamma, incoming));
    gamma = rev.result;
    for (const auto& r : rev.added) rr.revision.added.push_back(r.label + " " + to_string(r));
    for (const auto& r : rev.removed) rr.revision.removed.push_back(r.label + " " + to_string(r));

    std::optional<Solution> sol = create_solution(gamma, parties, m, {}, depth);
    if (!sol) {
      if (rev.changed()) {
        stall = 0;
      } else if (++stall >= config.stall_threshold) {
        rr.note = "missing new knowledge and no solution";
        out.transcript.rounds.push_back(std::move(rr));
        return finish(Status::Failure, round, "missing new knowledge and no solution");
      }
      out.transcript.rounds.push_back(std::move(rr));
      continue;
    }
    stall = 0;
    rr.solution = detail::record(*sol);

    ProposalResult pa = propose(m, gamma, alpha, *sol, depth);
    ProposalResult pb = propose(m, gamma, beta, *sol, depth);
    rr.proposals = {detail::record(pa), detail::record(pb)};

    std::optional<Solution> agreed;
    if (pa.accepted && pb.accepted) {
      agreed = std::move(sol);
    } else if (!pa.accepted && !pb.accepted) {
      Theory learned = negate(*sol).merged(pa.explanation).merged(pb.explanation);
      gamma = revise(gamma, relabel(m, gamma, learned));
      rr.note = "both agents rejected";
    } else {
      NegotiationResult n = negotiate(m, gamma, alpha, beta, *sol, pa, pb, depth);
      NegotiationRecord nr;
      nr.rejecting = n.rejecting;
      for (const auto& t : n.excluded) nr.excluded.push_back(to_string(t));
      nr.repaired = n.solution.has_value();
      for (const auto& p : n.proposals) nr.proposals.push_back(detail::record(p));
      for (const auto& [who, t] : n.explanations) nr.explanations[who] = detail::describe(t);
      if (n.solution) {
        nr.solution = detail::record(*n.solution);
        gamma = n.gamma;
        agreed = std::move(n.solution);
      } else {
        Theory learned = negate(*sol);
        for (const auto& p : n.proposals)
          if (!p.accepted) learned = learned.merged(p.explanation);
        for (const auto& [who, t] : n.explanations) learned = learned.merged(t);
        gamma = revise(n.gamma, relabel(m, n.gamma, learned));
        rr.note = "negotiation failed";
      }
      rr.negotiation = std::move(nr);
    }

    if (agreed) {
      out.solution = agreed;
      AgentState mu;
      mu.id = m.id;
      mu.unit(Unit::B) = gamma;
      mu.resources = m.resources;
      sort_resources(mu.resources);
      mu.explicit_release = true;
      mu.generous = m.generous;
      mu.bridges.clear();
      for (Bridge b : {Bridge::Advice, Bridge::EnablingAdvice, Bridge::AcceptRequest})
        if (m.bridges.count(b)) mu.bridges.insert(b);
      for (const auto& msg : execute_solution({&alpha, &beta}, mu, *agreed, depth)) rr.messages.push_back(detail::record(msg));
      m.resources = mu.resources;
      out.transcript.rounds.push_back(std::move(rr));
      auto& res = finish(Status::Success, round, "both agents accept");
      for (const auto& t : agreed->transfers) {
        auto it = res.final_ownership.find(t.receiver);
        if (it == res.final_ownership.end() || !it->second.count(t.resource)) {
          res.transcript.rounds.back().note = "transfer not carried out: " + to_string(t);
          break;
        }
      }
      return res;
    }
    out.transcript.rounds.push_back(std::move(rr));
  }
}

}  // namespace mediatrix
