#pragma once

// Strongly realist BDI agents: B/D/I/C unit theories, the bridge rules that
// connect them to each other and to the message channel, valued resources,
// planning under reduction / parsimony / unique choice, and disclosure.

#include "mediatrix/argument.hpp"
#include "mediatrix/engine.hpp"
#include "mediatrix/error.hpp"
#include "mediatrix/logic.hpp"
#include "mediatrix/theory.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mediatrix {

enum class Unit { B, D, I, C };

inline std::string_view name_of(Unit u) {
  switch (u) {
    case Unit::B: return "bel";
    case Unit::D: return "des";
    case Unit::I: return "int";
    case Unit::C: return "com";
  }
  return "";
}

enum class Strategy { Cautious, Eager };

inline std::string_view name_of(Strategy s) { return s == Strategy::Eager ? "eager" : "cautious"; }

struct Resource {
  std::string name;
  double value = 0.0;  // importance to the owner, in [0, 1]

  bool operator==(const Resource&) const = default;
};

inline void sort_resources(std::vector<Resource>& rs) {
  std::stable_sort(rs.begin(), rs.end(), [](const Resource& a, const Resource& b) {
    return a.value != b.value ? a.value < b.value : a.name < b.name;
  });
}

// Built-in bridge rules, enabled per scenario by label.
enum class Bridge {
  Advice,          // R.1 mediator tells an agent about its intentions
  EnablingAdvice,  // R.2 mediator tells an enabling rule
  Trust,           // R.3 told beliefs are adopted
  Request,         // R.4 an intention to receive turns into an ask
  AcceptRequest,   // R.5 an ask for something not intended to be kept is granted
};

inline constexpr std::array<std::pair<Bridge, std::string_view>, 5> kBridgeLabels{{
    {Bridge::Advice, "R.1"},
    {Bridge::EnablingAdvice, "R.2"},
    {Bridge::Trust, "R.3"},
    {Bridge::Request, "R.4"},
    {Bridge::AcceptRequest, "R.5"},
}};

inline std::string_view label_of(Bridge b) {
  for (const auto& [k, v] : kBridgeLabels)
    if (k == b) return v;
  return "";
}

inline std::optional<Bridge> bridge_labeled(std::string_view label) {
  for (const auto& [k, v] : kBridgeLabels)
    if (v == label) return k;
  return std::nullopt;
}

struct Transfer {
  std::string giver;
  std::string receiver;
  std::string resource;

  Literal action() const {
    return Literal::atom("give", {Term::constant(giver), Term::constant(receiver), Term::constant(resource)});
  }

  auto operator<=>(const Transfer&) const = default;
  bool operator==(const Transfer&) const = default;
};

inline std::string to_string(const Transfer& t) { return to_string(t.action()); }

using Ownership = std::map<std::string, std::set<std::string>>;

inline Ownership execute_give(Ownership world, const Transfer& t) {
  auto it = world.find(t.giver);
  if (it == world.end() || !it->second.count(t.resource))
    throw NotOwner(t.giver + " does not own " + t.resource);
  it->second.erase(t.resource);
  world[t.receiver].insert(t.resource);
  return world;
}

struct Message {
  enum class Kind { Tell, Ask, Give, Accept, Reject };

  Kind kind = Kind::Tell;
  std::string sender;
  std::string receiver;
  Literal content;             // told belief, or the give(...) action
  Theory support;              // what a Tell discloses alongside its content
  std::optional<Decision> decision;  // Reject only
  double value = 0.0;          // Give only: importance carried to the receiver
};

inline std::string_view name_of(Message::Kind k) {
  switch (k) {
    case Message::Kind::Tell: return "tell";
    case Message::Kind::Ask: return "ask";
    case Message::Kind::Give: return "give";
    case Message::Kind::Accept: return "accept";
    case Message::Kind::Reject: return "reject";
  }
  return "";
}

struct AgentState {
  std::string id;
  std::map<Unit, Theory> units{{Unit::B, {}}, {Unit::D, {}}, {Unit::I, {}}, {Unit::C, {}}};
  std::vector<Resource> resources;  // ascending by value, then name
  Strategy strategy = Strategy::Eager;
  std::set<std::string> disclosed;  // item labels and "resource:<name>"
  std::vector<Literal> asked;       // requests already sent
  std::set<Bridge> bridges{Bridge::Advice, Bridge::EnablingAdvice, Bridge::Trust, Bridge::Request,
                           Bridge::AcceptRequest};
  // When set, an ask is only granted if not keeping the item is derivable
  // (generosity); otherwise it is enough that keeping is not derivable.
  bool explicit_release = false;
  bool generous = false;

  Theory& unit(Unit u) { return units[u]; }
  const Theory& unit(Unit u) const { return units.at(u); }

  bool owns(std::string_view r) const {
    return std::any_of(resources.begin(), resources.end(), [&](const Resource& x) { return x.name == r; });
  }

  // Positive intention facts that are not transfers: the agent's goals.
  std::vector<Rule> goals() const {
    std::vector<Rule> out;
    for (const auto& r : unit(Unit::I).items)
      if (r.is_fact() && !r.head.negated && !r.head.is_modal() && r.head.predicate != "give" &&
          r.head.predicate != "does")
        out.push_back(r);
    return out;
  }
};

namespace detail {

inline bool bridge_derived(std::string_view label) {
  for (std::string_view suf : {"/D", "/B", "/I", "/C"})
    if (label.size() > suf.size() && label.substr(label.size() - suf.size()) == suf) return true;
  return false;
}

inline Literal done_give(const Transfer& t) {
  return Literal::atom("done", {Term::constant("give"), Term::constant(t.giver), Term::constant(t.receiver),
                                Term::constant(t.resource)});
}

inline void erase_fact(Theory& t, const Literal& l) {
  std::erase_if(t.items, [&](const Rule& r) { return r.is_fact() && r.head == l; });
}

}  // namespace detail

// The agent's beliefs with its own D and I facts quoted in as attitudes, so
// that B-level rules can reason about what it desires and intends.
inline Theory reasoning_theory(const AgentState& a) {
  Theory t = a.unit(Unit::B);
  const Term me = Term::constant(a.id);
  for (const auto& r : a.unit(Unit::I).items)
    if (r.is_fact()) t.add(Rule::fact(r.label, r.head.tagged(Modality::Intention, me)));
  for (const auto& r : a.unit(Unit::D).items)
    if (r.is_fact()) t.add(Rule::fact(r.label, r.head.tagged(Modality::Desire, me)));
  return t;
}

struct Plan {
  Literal goal;
  Rule rule;
  std::vector<Literal> unmet;
  std::vector<Transfer> transfers;
  std::size_t promised = 0;  // transfers the agent already intends to receive
  bool selected = false;

  std::size_t residual() const { return unmet.size() - promised; }
};

// Every known way to reach `goal`, the unique-choice pick marked selected.
inline std::vector<Plan> plan(const AgentState& a, const Literal& goal) {
  const Theory view = reasoning_theory(a);
  const Term me = Term::constant(a.id);
  const FactBase facts = forward_chain(compile(view), ChainOptions{false});

  if (facts.contains(complement(goal.tagged(Modality::Intention, me)))) return {};
  for (const auto& r : a.unit(Unit::I).items)
    if (r.is_fact() && r.head == complement(goal)) return {};

  std::vector<Plan> plans;
  for (const auto& r : a.unit(Unit::B).items) {
    if (r.is_fact() || r.head.is_modal() || r.head.negated) continue;
    auto u = unify(r.head, goal);
    if (!u) continue;
    Plan p;
    p.goal = goal;
    p.rule = r;
    for (const auto& b0 : r.body) {
      Literal b = apply(*u, b0);
      if (b.is_ground() ? facts.contains(b) : false) continue;
      if (!b.is_ground()) {
        bool matched = false;
        for (const auto& f : facts.literals())
          if (auto m = unify(b, f, *u)) {
            *u = *m;
            matched = true;
            break;
          }
        if (matched) continue;
      }
      p.unmet.push_back(b);
      if (b.is_modal() || b.negated || b.predicate != "have" || b.args.size() != 2 || b.args[0] != me ||
          !b.args[1].is_constant())
        continue;
      const std::string& res = b.args[1].name;
      std::optional<Transfer> t;
      for (const auto& i : a.unit(Unit::I).items) {
        const Literal& h = i.head;
        if (i.is_fact() && !h.negated && !h.is_modal() && h.predicate == "give" && h.args.size() == 3 &&
            h.args[1] == me && h.args[2].name == res && h.args[0] != me) {
          t = Transfer{h.args[0].name, a.id, res};
          ++p.promised;
          break;
        }
      }
      if (!t)
        for (const auto& f : facts.literals())
          if (!f.is_modal() && !f.negated && f.predicate == "have" && f.args.size() == 2 && f.args[1].name == res &&
              f.args[0] != me) {
            t = Transfer{f.args[0].name, a.id, res};
            break;
          }
      if (t) p.transfers.push_back(*t);
    }
    plans.push_back(std::move(p));
  }

  if (!plans.empty()) {
    auto best = std::min_element(plans.begin(), plans.end(), [](const Plan& x, const Plan& y) {
      if (x.residual() != y.residual()) return x.residual() < y.residual();
      if (x.transfers.size() != y.transfers.size()) return x.transfers.size() < y.transfers.size();
      return label_less(x.rule.label, y.rule.label);
    });
    best->selected = true;
  }
  return plans;
}

// Reading of the agent's theory under its current plan choices.
inline CompileContext plan_context(const AgentState& a) {
  CompileContext ctx;
  if (a.generous) ctx.generous = a.id;
  std::set<std::string> chosen, dropped;
  for (const auto& g : a.goals()) {
    for (const auto& p : plan(a, g.head)) (p.selected ? chosen : dropped).insert(p.rule.label);
  }
  for (const auto& l : dropped)
    if (!chosen.count(l)) ctx.excluded.insert(l);
  return ctx;
}

// Folds told knowledge into the agent: its own quoted attitudes go back to
// their unit, everything else is a belief.
inline void adopt(AgentState& a, const Theory& told) {
  const Term me = Term::constant(a.id);
  const Theory view = reasoning_theory(a);
  for (const auto& r : told.items) {
    if (view.find_content(r)) continue;
    if (r.is_fact() && r.head.modality == Modality::Intention && r.head.owner == me) {
      Literal inner = r.head.inner();
      inner.negated = r.head.negated;
      a.unit(Unit::I).add(Rule::fact(r.label, inner));
    } else if (r.is_fact() && r.head.modality == Modality::Desire && r.head.owner == me) {
      Literal inner = r.head.inner();
      inner.negated = r.head.negated;
      a.unit(Unit::D).add(Rule::fact(r.label, inner));
    } else {
      a.unit(Unit::B).add(r);
    }
  }
  for (const auto& p : told.principles) a.unit(Unit::B).add_principle(p.principle, p.label);
}

inline Decision evaluate(const AgentState& a, const Argument& proposed, std::size_t depth = kDefaultProofDepth) {
  AgentState working = a;
  adopt(working, proposed.support);
  return evaluate(reasoning_theory(working), plan_context(working), proposed, depth);
}

// Closes the units under the strong-realism bridges and the C/I action
// bridges. Throws RealismViolation on a complementary pair in any unit.
inline void apply_realism(AgentState& a) {
  const Term me = Term::constant(a.id);
  for (bool changed = true; changed;) {
    changed = false;
    auto push = [&](Unit u, Rule r) {
      if (a.unit(u).add(std::move(r))) changed = true;
    };
    for (const auto& r : std::vector<Rule>(a.unit(Unit::I).items)) {
      if (!r.is_fact()) continue;
      if (!r.head.negated) push(Unit::D, Rule::fact(r.label + "/D", r.head));
      if (!r.head.negated && r.head.predicate == "does") push(Unit::C, Rule::fact(r.label + "/C", r.head));
    }
    for (const auto& r : std::vector<Rule>(a.unit(Unit::D).items)) {
      if (!r.is_fact()) continue;
      if (r.head.negated)
        push(Unit::I, Rule::fact(r.label + "/I", r.head));
      else
        push(Unit::B, Rule::fact(r.label + "/B", r.head.tagged(Modality::Desire, me)));
    }
    for (const auto& r : std::vector<Rule>(a.unit(Unit::B).items)) {
      if (!r.is_fact()) continue;
      const Literal& h = r.head;
      if (h.negated && h.modality == Modality::Desire && h.owner == me) {
        Literal inner = h.inner();
        inner.negated = true;
        push(Unit::D, Rule::fact(r.label + "/D", inner));
      }
    }
    for (const auto& r : std::vector<Rule>(a.unit(Unit::C).items))
      if (r.is_fact() && !r.head.negated && r.head.predicate == "done") push(Unit::B, Rule::fact(r.label + "/B", r.head));
  }
  for (auto& [u, t] : a.units) {
    for (const auto& r : t.items)
      if (r.is_fact() && !r.head.negated)
        for (const auto& s : t.items)
          if (s.is_fact() && complementary(r.head, s.head))
            throw RealismViolation(a.id + " " + std::string(name_of(u)) + " unit holds " + to_string(r.head) +
                                   " and its complement");
  }
}

inline bool strong_realism_holds(const AgentState& a) {
  const Term me = Term::constant(a.id);
  for (const auto& r : a.unit(Unit::I).items) {
    if (!r.is_fact() || r.head.negated) continue;
    bool found = false;
    for (const auto& d : a.unit(Unit::D).items)
      if (d.is_fact() && d.head == r.head) found = true;
    if (!found) return false;
  }
  for (const auto& r : a.unit(Unit::D).items) {
    if (!r.is_fact() || r.head.negated) continue;
    Literal quoted = r.head.tagged(Modality::Desire, me);
    bool found = false;
    for (const auto& b : a.unit(Unit::B).items)
      if (b.is_fact() && b.head == quoted) found = true;
    if (!found) return false;
  }
  return true;
}

// Moves `t.resource` between agent states (either may be absent) and updates
// beliefs and communication records.
inline void transfer_resource(AgentState& giver, const Transfer& t) {
  auto it = std::find_if(giver.resources.begin(), giver.resources.end(),
                         [&](const Resource& r) { return r.name == t.resource; });
  if (it == giver.resources.end()) throw NotOwner(giver.id + " does not own " + t.resource);
  giver.resources.erase(it);
  const Term me = Term::constant(giver.id);
  detail::erase_fact(giver.unit(Unit::B), Literal::atom("have", {me, Term::constant(t.resource)}));
  giver.unit(Unit::B).add(Rule::fact("give:" + to_string(t), Literal::atom("have", {Term::constant(t.receiver), Term::constant(t.resource)})));
  giver.unit(Unit::C).add(Rule::fact("done:" + to_string(t), detail::done_give(t)));
}

inline void receive_resource(AgentState& receiver, const Transfer& t, double value) {
  const Term me = Term::constant(receiver.id);
  const Literal held = Literal::atom("have", {me, Term::constant(t.resource)});
  if (!receiver.owns(t.resource)) {
    receiver.resources.push_back({t.resource, value});
    sort_resources(receiver.resources);
  }
  detail::erase_fact(receiver.unit(Unit::B), Literal::atom("have", {Term::constant(t.giver), Term::constant(t.resource)}));
  detail::erase_fact(receiver.unit(Unit::B), complement(held));
  receiver.unit(Unit::B).add(Rule::fact("got:" + to_string(t), held));
  receiver.unit(Unit::C).add(Rule::fact("done:" + to_string(t), detail::done_give(t)));
}

// One synchronous step: consume the inbox, close under the bridges, emit.
inline std::pair<AgentState, std::vector<Message>> bridge_step(AgentState a, const std::vector<Message>& inbox,
                                                               std::size_t depth = kDefaultProofDepth) {
  std::vector<Message> out;
  std::vector<Message> asks;
  const Term me = Term::constant(a.id);

  for (const auto& m : inbox) {
    if (m.receiver != a.id) continue;
    switch (m.kind) {
      case Message::Kind::Tell:
        if (a.bridges.count(Bridge::Trust)) {
          Theory told = m.support;
          told.add(Rule::fact("R.3:" + to_string(m.content), m.content));
          adopt(a, told);
        }
        break;
      case Message::Kind::Give: {
        Transfer t{m.sender, a.id, m.content.args.size() == 3 ? m.content.args[2].name : ""};
        receive_resource(a, t, m.value);
        break;
      }
      case Message::Kind::Ask:
        asks.push_back(m);
        break;
      case Message::Kind::Accept:
      case Message::Kind::Reject:
        break;
    }
  }
  apply_realism(a);

  for (const auto& m : asks) {
    const Literal& want = m.content;
    if (want.predicate != "give" || want.args.size() != 3 || want.args[0] != me) continue;
    Transfer t{a.id, want.args[1].name, want.args[2].name};
    if (!a.bridges.count(Bridge::AcceptRequest)) continue;
    Message reply{Message::Kind::Reject, a.id, t.receiver, want, {}, std::nullopt, 0.0};
    if (!a.owns(t.resource)) {
      out.push_back(reply);
      continue;
    }
    const CompileContext ctx = plan_context(a);
    const Program prog = compile(reasoning_theory(a), ctx);
    const Literal keep = Literal::atom("have", {me, Term::constant(t.resource)}).tagged(Modality::Intention, me);
    bool keeping = Prover(prog, depth).prove_quiet(keep).has_value();
    bool release = !keeping && (!a.explicit_release || Prover(prog, depth).prove_quiet(complement(keep)).has_value());
    if (!release) {
      Decision d;
      d.verdict = Decision::Verdict::Reject;
      auto refusal = construct_argument(reasoning_theory(a), complement(want.tagged(Modality::Intention, me)), ctx, depth);
      if (refusal) {
        Argument request;
        request.conclusion = want.tagged(Modality::Intention, me);
        d.explanation = refusal->support;
        d.counter = Attack{Attack::Kind::Rebut, *refusal, request, request.conclusion};
      }
      reply.decision = std::move(d);
      out.push_back(reply);
      continue;
    }
    a.unit(Unit::I).add(Rule::fact("R.5:" + to_string(want), want));
    double value = 0.0;
    for (const auto& r : a.resources)
      if (r.name == t.resource) value = r.value;
    transfer_resource(a, t);
    out.push_back({Message::Kind::Give, a.id, t.receiver, want, {}, std::nullopt, value});
  }

  if (a.bridges.count(Bridge::Request)) {
    for (const auto& r : a.unit(Unit::I).items) {
      const Literal& h = r.head;
      if (!r.is_fact() || h.negated || h.is_modal() || h.predicate != "give" || h.args.size() != 3) continue;
      if (h.args[1] != me || h.args[0] == me || a.owns(h.args[2].name)) continue;
      if (std::find(a.asked.begin(), a.asked.end(), h) != a.asked.end()) continue;
      a.asked.push_back(h);
      out.push_back({Message::Kind::Ask, a.id, h.args[0].name, h, {}, std::nullopt, 0.0});
    }
  }

  apply_realism(a);
  return {std::move(a), std::move(out)};
}

struct KnowledgePackage {
  std::string from;
  std::vector<Rule> items;           // in the receiver's belief form
  std::vector<Resource> resources;   // newly declared, ascending by value

  bool empty() const { return items.empty() && resources.empty(); }
};

namespace detail {

inline std::optional<std::string> resource_of(const AgentState& a, const Rule& r) {
  const Literal& h = r.head;
  if (!r.is_fact() || h.is_modal() || h.negated || h.predicate != "have" || h.args.size() != 2) return std::nullopt;
  if (h.args[0] != Term::constant(a.id) || !a.owns(h.args[1].name)) return std::nullopt;
  return h.args[1].name;
}

inline void add_symbols(const Literal& l, std::set<std::string>& out) {
  out.insert("pred:" + l.predicate);
  add_constants(l, out);
}

// Predicates and constants reachable from the goals through known rules.
inline std::set<std::string> plan_closure(const AgentState& a) {
  std::set<std::string> out;
  std::vector<Literal> frontier;
  for (const auto& g : a.goals()) frontier.push_back(g.head);
  std::set<Literal> seen;
  while (!frontier.empty()) {
    Literal g = frontier.back();
    frontier.pop_back();
    if (!seen.insert(g).second) continue;
    add_symbols(g, out);
    for (const auto& r : a.unit(Unit::B).items) {
      if (r.is_fact() || r.head.predicate != g.predicate) continue;
      add_symbols(r.head, out);
      for (const auto& b : r.body) frontier.push_back(b);
    }
  }
  return out;
}

inline bool relevant(const Rule& r, const std::set<std::string>& closure) {
  std::set<std::string> mine;
  add_symbols(r.head, mine);
  for (const auto& b : r.body) add_symbols(b, mine);
  for (const auto& s : mine)
    if (closure.count(s)) return true;
  return false;
}

}  // namespace detail

// What the agent tells the mediator in round `round`. Goals come first; then
// eager agents release everything, cautious ones the relevant beliefs plus
// their least important undisclosed resource.
inline std::pair<AgentState, KnowledgePackage> disclose(AgentState a, int round) {
  KnowledgePackage pkg;
  pkg.from = a.id;
  const Term me = Term::constant(a.id);

  auto release = [&](const Rule& r, const Literal& as) {
    if (a.disclosed.count(r.label)) return;
    a.disclosed.insert(r.label);
    pkg.items.push_back(Rule::fact(r.label, as));
    if (!r.is_fact()) pkg.items.back() = r;
  };
  auto declare = [&](const Resource& res) {
    const std::string key = "resource:" + res.name;
    if (a.disclosed.count(key)) return;
    a.disclosed.insert(key);
    pkg.resources.push_back(res);
    const Literal held = Literal::atom("have", {me, Term::constant(res.name)});
    for (const auto& r : a.unit(Unit::B).items)
      if (r.is_fact() && r.head == held) {
        release(r, r.head);
        return;
      }
    if (!a.disclosed.count("res:" + a.id + ":" + res.name)) {
      a.disclosed.insert("res:" + a.id + ":" + res.name);
      pkg.items.push_back(Rule::fact("res:" + a.id + ":" + res.name, held));
    }
  };

  for (const auto& g : a.unit(Unit::I).items)
    if (g.is_fact() && !detail::bridge_derived(g.label)) release(g, g.head.tagged(Modality::Intention, me));
  if (round <= 1) return {std::move(a), std::move(pkg)};

  const auto& beliefs = a.unit(Unit::B).items;
  if (a.strategy == Strategy::Eager) {
    for (const auto& r : beliefs) {
      if (detail::bridge_derived(r.label)) continue;
      if (auto res = detail::resource_of(a, r)) {
        for (const auto& x : a.resources)
          if (x.name == *res) declare(x);
      } else {
        release(r, r.head);
      }
    }
    for (const auto& x : a.resources) declare(x);
    return {std::move(a), std::move(pkg)};
  }

  const auto closure = detail::plan_closure(a);
  bool any_belief = false;
  for (const auto& r : beliefs) {
    if (detail::bridge_derived(r.label) || detail::resource_of(a, r) || a.disclosed.count(r.label)) continue;
    if (!detail::relevant(r, closure)) continue;
    release(r, r.head);
    any_belief = true;
  }
  bool any_resource = false;
  for (const auto& x : a.resources)
    if (!a.disclosed.count("resource:" + x.name)) {
      declare(x);
      any_resource = true;
      break;
    }
  if (!any_belief && !any_resource) {
    for (const auto& r : beliefs)
      if (!detail::bridge_derived(r.label) && !detail::resource_of(a, r) && !a.disclosed.count(r.label)) {
        release(r, r.head);
        break;
      }
  }
  return {std::move(a), std::move(pkg)};
}

}  // namespace mediatrix
