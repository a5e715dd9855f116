#pragma once

// Brute-force solution enumerator: every plan assignment times every set of
// transfers, checked directly against ownership. Used to certify the joint
// search on small scenarios.

#include "mediatrix/agent.hpp"
#include "mediatrix/engine.hpp"
#include "mediatrix/logic.hpp"
#include "mediatrix/mediator.hpp"
#include "mediatrix/scenario.hpp"
#include "mediatrix/theory.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace mediatrix {

struct OracleProblem {
  std::vector<std::string> parties;
  std::string mediator;
  bool generous = false;
  std::vector<std::pair<std::string, Literal>> goals;
  std::map<std::string, std::set<std::string>> owner;  // agent -> resources
  std::set<std::tuple<std::string, std::string, std::string>> forbidden;
};

struct OracleResult {
  bool feasible = false;
  std::vector<Transfer> transfers;
  std::vector<std::string> plans;
  std::size_t assignments = 0;
};

namespace detail {

struct OraclePlan {
  std::string label;
  std::vector<std::pair<std::string, std::string>> needs;  // (owner, resource)
};

inline OracleProblem oracle_problem(const Theory& gamma, const std::vector<std::string>& parties,
                                    const std::string& mediator, bool generous,
                                    const std::vector<Resource>& mediator_resources) {
  OracleProblem p;
  p.parties = parties;
  std::sort(p.parties.begin(), p.parties.end());
  p.mediator = mediator;
  p.generous = generous;
  auto party = [&](const Term& t) {
    return t.is_constant() && std::count(p.parties.begin(), p.parties.end(), t.name) > 0;
  };
  for (const auto& r : gamma.items) {
    if (!r.body.empty() || !r.absent.empty() || !r.distinct.empty()) continue;
    const Literal& h = r.head;
    if (h.modality == Modality::Plain && !h.negated && h.predicate == "have" && h.args.size() == 2 &&
        h.args[0].is_constant() && h.args[1].is_constant())
      p.owner[h.args[0].name].insert(h.args[1].name);
    if (h.modality != Modality::Intention || !party(h.owner)) continue;
    bool ground = std::all_of(h.args.begin(), h.args.end(), [](const Term& t) { return t.is_constant(); });
    if (!ground) continue;
    if (!h.negated && h.predicate != "give") p.goals.emplace_back(h.owner.name, h.inner());
    if (h.negated && h.predicate == "give" && h.args.size() == 3 && h.args[1] == h.owner)
      p.forbidden.insert({h.args[0].name, h.args[1].name, h.args[2].name});
  }
  for (const auto& r : mediator_resources) p.owner[mediator].insert(r.name);
  std::stable_sort(p.goals.begin(), p.goals.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return p;
}

inline std::set<std::string> constants_of(const Theory& gamma) {
  std::set<std::string> out;
  auto lit = [&](const Literal& l) {
    if (l.is_modal() && l.owner.is_constant()) out.insert(l.owner.name);
    for (const auto& t : l.args)
      if (t.is_constant()) out.insert(t.name);
  };
  for (const auto& r : gamma.items) {
    lit(r.head);
    for (const auto& b : r.body) lit(b);
    for (const auto& b : r.absent) lit(b);
  }
  return out;
}

inline std::vector<OraclePlan> oracle_plans(const Theory& gamma, const Literal& goal, const FactBase& facts,
                                            const std::set<std::string>& consts) {
  std::vector<OraclePlan> out;
  const std::vector<std::string> pool(consts.begin(), consts.end());
  for (const auto& r : gamma.items) {
    if (r.is_fact() || r.head.modality != Modality::Plain || r.head.negated) continue;
    auto u = unify(r.head, goal);
    if (!u) continue;
    auto vs = variables(apply(*u, r));
    std::vector<std::string> open(vs.begin(), vs.end());
    std::vector<std::size_t> idx(open.size(), 0);
    // odometer over pool^open
    while (true) {
      Substitution s = *u;
      for (std::size_t i = 0; i < open.size(); ++i) s.bind(open[i], Term::constant(pool.empty() ? "" : pool[idx[i]]));
      Rule g = apply(s, r);
      bool ok = !pool.empty() || open.empty();
      for (const auto& d : g.distinct) ok = ok && d.lhs != d.rhs;
      for (const auto& a : g.absent) ok = ok && !facts.contains(a);
      OraclePlan plan;
      plan.label = r.label;
      for (const auto& b : g.body) {
        if (!ok) break;
        if (b.modality == Modality::Plain && !b.negated && b.predicate == "have" && b.args.size() == 2)
          plan.needs.emplace_back(b.args[0].name, b.args[1].name);
        else
          ok = facts.contains(b);
      }
      if (ok) out.push_back(std::move(plan));
      std::size_t k = 0;
      while (k < open.size() && ++idx[k] == pool.size()) idx[k++] = 0;
      if (k == open.size()) break;
    }
  }
  return out;
}

}  // namespace detail

// Whether `transfers` with the given plans (one per goal, as have-needs)
// is an admissible outcome of mediation.
inline bool oracle_admissible(const OracleProblem& p,
                              const std::vector<std::vector<std::pair<std::string, std::string>>>& needs,
                              const std::vector<Transfer>& transfers) {
  std::set<std::string> used;
  auto world = p.owner;
  auto holds = [](const std::map<std::string, std::set<std::string>>& w, const std::string& a, const std::string& r) {
    auto it = w.find(a);
    return it != w.end() && it->second.count(r) > 0;
  };
  for (const auto& t : transfers) {
    if (!used.insert(t.resource).second) return false;
    if (t.giver == t.receiver || !holds(p.owner, t.giver, t.resource)) return false;
    if (!std::count(p.parties.begin(), p.parties.end(), t.receiver)) return false;
    const bool giver_party = std::count(p.parties.begin(), p.parties.end(), t.giver) > 0;
    if (!giver_party && (t.giver != p.mediator || !p.generous)) return false;
    if (p.forbidden.count({t.giver, t.receiver, t.resource})) return false;
    bool justified = false;
    for (std::size_t g = 0; g < p.goals.size(); ++g) {
      for (const auto& [who, what] : needs[g]) {
        if (giver_party && who == t.giver && what == t.resource) return false;
        if (p.goals[g].first == t.receiver && who == t.receiver && what == t.resource) justified = true;
      }
    }
    if (!justified || holds(p.owner, t.receiver, t.resource)) return false;
    world[t.giver].erase(t.resource);
    world[t.receiver].insert(t.resource);
  }
  for (const auto& n : needs)
    for (const auto& [who, what] : n)
      if (!holds(world, who, what)) return false;
  return true;
}

inline OracleResult enumerate_solutions(const Theory& gamma, const OracleProblem& p, std::size_t max_transfers = 6) {
  OracleResult res;
  if (p.goals.empty()) return res;
  const FactBase facts = forward_chain(compile(gamma), ChainOptions{false});
  const auto consts = detail::constants_of(gamma);

  std::vector<std::vector<detail::OraclePlan>> options;
  for (const auto& [agent, goal] : p.goals) {
    options.push_back(detail::oracle_plans(gamma, goal, facts, consts));
    if (options.back().empty()) return res;
  }

  std::vector<Transfer> moves;
  std::vector<std::string> givers = p.parties;
  givers.push_back(p.mediator);
  for (const auto& g : givers) {
    auto it = p.owner.find(g);
    if (it == p.owner.end()) continue;
    for (const auto& r : it->second)
      for (const auto& recv : p.parties)
        if (recv != g) moves.push_back({g, recv, r});
  }

  std::vector<std::size_t> pick(options.size(), 0);
  while (true) {
    std::vector<std::vector<std::pair<std::string, std::string>>> needs;
    for (std::size_t i = 0; i < options.size(); ++i) needs.push_back(options[i][pick[i]].needs);
    ++res.assignments;

    std::vector<Transfer> chosen;
    std::function<bool(std::size_t)> grow = [&](std::size_t from) -> bool {
      if (oracle_admissible(p, needs, chosen)) return true;
      if (chosen.size() == max_transfers) return false;
      for (std::size_t i = from; i < moves.size(); ++i) {
        chosen.push_back(moves[i]);
        if (grow(i + 1)) return true;
        chosen.pop_back();
      }
      return false;
    };
    if (grow(0)) {
      res.feasible = true;
      res.transfers = chosen;
      for (std::size_t i = 0; i < options.size(); ++i) res.plans.push_back(options[i][pick[i]].label);
      return res;
    }

    std::size_t k = 0;
    while (k < pick.size() && ++pick[k] == options[k].size()) pick[k++] = 0;
    if (k == pick.size()) break;
  }
  return res;
}

struct OracleReport {
  bool solver_found = false;
  bool oracle_found = false;
  bool solver_admissible = true;
  OracleResult oracle;
  std::optional<Solution> solution;

  bool agree() const { return solver_found == oracle_found && solver_admissible; }
};

inline OracleReport compare_with_oracle(const Theory& gamma, const std::vector<std::string>& parties,
                                        const MediatorState& m, std::size_t max_transfers = 6,
                                        std::size_t depth = kDefaultProofDepth) {
  OracleReport rep;
  const OracleProblem p = detail::oracle_problem(gamma, parties, m.id, m.generous, m.resources);
  rep.oracle = enumerate_solutions(gamma, p, max_transfers);
  rep.oracle_found = rep.oracle.feasible;
  rep.solution = create_solution(gamma, parties, m, {}, depth);
  rep.solver_found = rep.solution.has_value();
  if (rep.solution) {
    std::vector<std::vector<std::pair<std::string, std::string>>> needs;
    for (const auto& a : rep.solution->plans) {
      std::vector<std::pair<std::string, std::string>> n;
      for (const auto& b : a.plan.rule.body)
        if (is_have(b)) n.emplace_back(b.args[0].name, b.args[1].name);
      needs.push_back(std::move(n));
    }
    rep.solver_admissible = needs.size() == p.goals.size() && oracle_admissible(p, needs, rep.solution->transfers);
  }
  return rep;
}

// The mediator's theory once both agents have disclosed everything.
inline std::pair<Theory, MediatorState> disclosed_theory(const Scenario& sc) {
  MediatorState m = sc.mediator_state();
  Theory gamma = m.theory;
  AgentState a = sc.agent_state(0), b = sc.agent_state(1);
  for (int round = 1; round <= 2 || round <= sc.config.max_rounds; ++round) {
    Theory incoming;
    bool any = false;
    for (AgentState* x : {&a, &b}) {
      auto [after, pkg] = disclose(*x, round);
      *x = std::move(after);
      any = any || !pkg.empty();
      incoming.items.insert(incoming.items.end(), pkg.items.begin(), pkg.items.end());
    }
    gamma = revise(gamma, relabel(m, gamma, incoming));
    if (!any && round > 1) break;
  }
  return {gamma, m};
}

}  // namespace mediatrix
