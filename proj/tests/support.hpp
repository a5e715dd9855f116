#pragma once

// Shared helpers for the test suites: fixture loading, random generators and
// small independent reference implementations.

#include "mediatrix/mediatrix.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifndef MEDIATRIX_SCENARIO_DIR
#define MEDIATRIX_SCENARIO_DIR "scenarios"
#endif

namespace testing_support {

using namespace mediatrix;

inline std::string scenario_path(const std::string& name) { return std::string(MEDIATRIX_SCENARIO_DIR) + "/" + name; }

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"home_improvement.med",       "home_improvement_no_m2.med",
                                              "both_reject.med",            "negotiate_two_donors.med",
                                              "negotiate_single_donor.med", "self_sufficient.med"};
  return names;
}

inline Outcome run_fixture(const std::string& name) {
  Scenario sc = load_scenario(scenario_path(name));
  return mediate(sc.agent_state(0), sc.agent_state(1), sc.mediator_state(), sc.config, sc.name);
}

inline Outcome run_scenario(const Scenario& sc) {
  return mediate(sc.agent_state(0), sc.agent_state(1), sc.mediator_state(), sc.config, sc.name);
}

inline Literal lit(const std::string& text) { return parse_literal(text); }
inline Rule rule(const std::string& label, const std::string& text) { return parse_rule(text, label); }

// --- naive reference semantics -----------------------------------------------
//
// Plain Horn theories (no principles, no absence conditions): ground every
// rule over the constants and iterate to a fixpoint.

inline std::set<std::string> constants(const std::vector<Rule>& rules) {
  std::set<std::string> out;
  auto add = [&](const Literal& l) {
    if (l.is_modal() && l.owner.is_constant()) out.insert(l.owner.name);
    for (const auto& t : l.args)
      if (t.is_constant()) out.insert(t.name);
  };
  for (const auto& r : rules) {
    add(r.head);
    for (const auto& b : r.body) add(b);
  }
  return out;
}

inline std::vector<Rule> ground_all(const std::vector<Rule>& rules, const std::set<std::string>& consts) {
  std::vector<Rule> out;
  std::vector<std::string> pool(consts.begin(), consts.end());
  for (const auto& r : rules) {
    auto vs = variables(r);
    std::vector<std::string> open(vs.begin(), vs.end());
    std::vector<std::size_t> idx(open.size(), 0);
    if (!open.empty() && pool.empty()) continue;
    while (true) {
      Substitution s;
      for (std::size_t i = 0; i < open.size(); ++i) s.bind(open[i], Term::constant(pool[idx[i]]));
      Rule g = apply(s, r);
      bool ok = true;
      for (const auto& d : g.distinct) ok = ok && d.lhs != d.rhs;
      if (ok) out.push_back(g);
      std::size_t k = 0;
      while (k < open.size() && ++idx[k] == pool.size()) idx[k++] = 0;
      if (k == open.size()) break;
    }
  }
  return out;
}

inline std::set<Literal> saturate(const std::vector<Rule>& rules) {
  const auto ground = ground_all(rules, constants(rules));
  std::set<Literal> known;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& g : ground) {
      if (known.count(g.head)) continue;
      if (std::all_of(g.body.begin(), g.body.end(), [&](const Literal& b) { return known.count(b) > 0; })) {
        known.insert(g.head);
        changed = true;
      }
    }
  }
  return known;
}

inline bool saturated_consistent(const std::set<Literal>& s) {
  for (const auto& l : s)
    if (s.count(complement(l))) return false;
  return true;
}

// Exact minimality: no proper subset of `support` derives `goal`.
inline bool subset_minimal(const std::vector<Rule>& support, const Literal& goal) {
  const std::size_t n = support.size();
  for (std::size_t mask = 0; mask + 1 < (std::size_t{1} << n); ++mask) {
    std::vector<Rule> sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) sub.push_back(support[i]);
    if (saturate(sub).count(goal)) return false;
  }
  return true;
}

// --- random plain theories ---------------------------------------------------

struct TheoryGen {
  std::mt19937 rng;
  explicit TheoryGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  Term constant() { return Term::constant(std::string(1, static_cast<char>('a' + pick(3)))); }

  Literal ground_literal(bool allow_negation) {
    static const char* unary[] = {"p", "q", "r", "s"};
    Literal l = Literal::atom(unary[pick(4)], {constant()});
    if (allow_negation && coin(0.15)) l.negated = true;
    return l;
  }

  // Facts and range-restricted unary rules over X, occasionally binary.
  Theory theory(bool allow_negation = true) {
    static const char* unary[] = {"p", "q", "r", "s"};
    Theory t;
    int facts = 2 + pick(4);
    for (int i = 0; i < facts; ++i) t.add(Rule::fact("F" + std::to_string(i), ground_literal(allow_negation)));
    int rules = 1 + pick(5);
    for (int i = 0; i < rules; ++i) {
      Rule r;
      r.label = "R" + std::to_string(i);
      const Term x = Term::variable("X");
      int body = 1 + pick(2);
      for (int b = 0; b < body; ++b) r.body.push_back(Literal::atom(unary[pick(4)], {x}));
      r.head = Literal::atom(unary[pick(4)], {coin(0.8) ? x : constant()});
      if (allow_negation && coin(0.1)) r.head.negated = true;
      t.add(std::move(r));
    }
    return t;
  }
};

// --- random mediation scenarios ----------------------------------------------

struct ScenarioGen {
  std::mt19937 rng;
  explicit ScenarioGen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  // At most 6 resources and 4 rules per party; alpha's recipes need up to
  // two resources, beta's one, so no solution needs more than three transfers.
  std::string text(unsigned index) {
    std::ostringstream os;
    const int nres = 2 + pick(5);
    const char* owners[] = {"alpha", "beta", "mu"};
    os << "scenario generated_" << index << ";\nagent alpha;\nagent beta;\nmediator mu;\n";
    os << "strategy alpha = " << (coin(0.7) ? "eager" : "cautious") << ";\n";
    os << "strategy beta = " << (coin(0.7) ? "eager" : "cautious") << ";\n";
    if (coin(0.6)) os << "generosity mu = on;\n";
    std::vector<std::string> holder(nres);
    std::map<std::string, std::vector<std::pair<std::string, int>>> held;
    for (int i = 0; i < nres; ++i) {
      holder[i] = owners[pick(3)];
      held[holder[i]].push_back({"r" + std::to_string(i), pick(11)});
    }
    for (auto& [who, rs] : held) {
      std::stable_sort(rs.begin(), rs.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
      for (const auto& [name, v] : rs) os << "resource " << who << " " << name << " = " << v / 10.0 << ";\n";
    }
    os << "principle G.1 = ownership;\nprinciple G.2 = reduction;\nprinciple G.3 = generosity;\n"
          "principle G.4 = unicity;\nprinciple G.5 = benevolence;\nprinciple G.6 = parsimony;\n"
          "principle G.7 = unique_choice;\n";
    os << "@A.1 int alpha: can(alpha, ga).\n@B.1 int beta: can(beta, gb).\n";
    int la = 2, lb = 2, lm = 1;
    for (int i = 0; i < nres; ++i) {
      std::string fact = "have(" + holder[i] + ", r" + std::to_string(i) + ")";
      if (holder[i] == "alpha") os << "@A." << la++ << " bel alpha: " << fact << ".\n";
      if (holder[i] == "beta") os << "@B." << lb++ << " bel beta: " << fact << ".\n";
      if (holder[i] == "mu") os << "@M." << lm++ << " bel mu: " << fact << ".\n";
    }
    if (coin(0.3)) os << "@A." << la++ << " bel alpha: skill(alpha, s).\n";
    int rules_of[3] = {0, 0, 0};
    for (const char* goal : {"ga", "gb"}) {
      const bool is_a = std::string(goal) == "ga";
      const int nrules = 1 + pick(4);
      for (int k = 0; k < nrules; ++k) {
        std::set<int> need;
        const int width = is_a ? 1 + pick(2) : 1;
        while (static_cast<int>(need.size()) < width) need.insert(pick(nres));
        std::string body;
        for (int n : need) body += std::string(body.empty() ? "" : ", ") + "have(X, r" + std::to_string(n) + ")";
        if (is_a && coin(0.15)) body += ", skill(X, s)";
        std::string r = "can(X, " + std::string(goal) + ") :- " + body;
        int who = pick(3);
        while (rules_of[who] == 4) who = (who + 1) % 3;
        ++rules_of[who];
        switch (who) {
          case 0: os << "@M." << lm++ << " bel mu: " << r << ".\n"; break;
          case 1: os << "@A." << la++ << " bel alpha: " << r << ".\n"; break;
          default: os << "@B." << lb++ << " bel beta: " << r << ".\n"; break;
        }
      }
    }
    if (coin(0.15)) {
      int r = pick(nres);
      os << "@M." << lm++ << " bel mu: ~int(alpha, give(" << holder[r] << ", alpha, r" << r << ")).\n";
    }
    return os.str();
  }
};

inline std::multiset<std::string> all_resources(const Ownership& w) {
  std::multiset<std::string> out;
  for (const auto& [who, rs] : w) out.insert(rs.begin(), rs.end());
  return out;
}

inline Ownership initial_ownership(const Scenario& sc) {
  Ownership w;
  for (const auto* a : {&sc.agents[0], &sc.agents[1], &sc.mediator}) {
    auto& slot = w[a->id];
    for (const auto& r : a->resources) slot.insert(r.name);
  }
  return w;
}

// Replays the give messages of a transcript onto the starting ownership.
inline Ownership replay_messages(Ownership w, const Transcript& t) {
  for (const auto& r : t.rounds)
    for (const auto& m : r.messages) {
      if (m.kind != "give") continue;
      Literal g = parse_literal(m.content);
      w = execute_give(w, {g.args[0].name, g.args[1].name, g.args[2].name});
    }
  return w;
}

}  // namespace testing_support
