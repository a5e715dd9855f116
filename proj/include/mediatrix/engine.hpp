#pragma once

// Stratified forward chaining and depth-bounded backward proof search over a
// compiled Program. Both record the labels of the theory items they used.

#include "mediatrix/error.hpp"
#include "mediatrix/logic.hpp"
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

struct ProofStep {
  std::string rule;                  // name of the compiled rule
  std::vector<std::string> sources;  // theory labels behind it
  Substitution binding;              // over the rule's own variable names
  Literal derived;

  bool operator==(const ProofStep&) const = default;
};

struct Proof {
  Literal conclusion;
  std::set<std::string> premises;  // labels of facts, rules and principles used
  std::vector<ProofStep> steps;    // body before head

  bool operator==(const Proof&) const = default;
};

inline constexpr std::size_t kDefaultProofDepth = 32;

namespace detail {

using Signature = std::tuple<Modality, bool, std::string>;

inline Signature signature(const Literal& l) { return {l.modality, l.negated, l.predicate}; }

inline std::string strip_suffix(const std::string& v) {
  auto pos = v.find('#');
  return pos == std::string::npos ? v : v.substr(0, pos);
}

inline void merge_proof(Proof& into, const Proof& from) {
  into.premises.insert(from.premises.begin(), from.premises.end());
  for (const auto& s : from.steps)
    if (std::find(into.steps.begin(), into.steps.end(), s) == into.steps.end()) into.steps.push_back(s);
}

inline bool distinct_ok(const std::vector<Distinct>& ds, const Substitution& s) {
  for (const auto& d : ds) {
    Term a = s.resolve(d.lhs), b = s.resolve(d.rhs);
    if (a.is_variable() || b.is_variable()) continue;
    if (a == b) return false;
  }
  return true;
}

// Binds the still-open variables of `vars` to domain constants, calling `k`
// on each completion in sorted order. Stops when `k` returns true.
inline bool ground_over(const std::vector<std::string>& vars, std::size_t i, Substitution& s,
                        const std::set<std::string>& domain, const std::function<bool(Substitution&)>& k) {
  while (i < vars.size() && !s.resolve(Term::variable(vars[i])).is_variable()) ++i;
  if (i == vars.size()) return k(s);
  for (const auto& c : domain) {
    Substitution next = s;
    next.bind(s.resolve(Term::variable(vars[i])).name, Term::constant(c));
    if (ground_over(vars, i + 1, next, domain, k)) return true;
  }
  return false;
}

// Stratum per rule; throws when negation-as-failure is recursive.
inline std::vector<std::size_t> stratify(const Program& prog) {
  std::map<Signature, std::size_t> level;
  for (const auto& r : prog.rules) level[signature(r.head)] = 0;
  const std::size_t limit = prog.rules.size() + 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : prog.rules) {
      std::size_t need = 0;
      for (const auto& b : r.body) {
        auto it = level.find(signature(b));
        if (it != level.end()) need = std::max(need, it->second);
      }
      for (const auto& a : r.absent) {
        auto it = level.find(signature(a));
        if (it != level.end()) need = std::max(need, it->second + 1);
      }
      auto& h = level[signature(r.head)];
      if (need > h) {
        h = need;
        changed = true;
        if (h > limit) throw Error("negation as failure is not stratified (rule " + r.label + ")");
      }
    }
  }
  std::vector<std::size_t> out;
  for (const auto& r : prog.rules) out.push_back(level[signature(r.head)]);
  return out;
}

}  // namespace detail

// Ground facts of a fixpoint, each with the proof of its first derivation.
class FactBase {
 public:
  bool contains(const Literal& l) const { return index_.count(l) > 0; }
  const Proof* proof_of(const Literal& l) const {
    auto it = index_.find(l);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
  }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Facts in derivation order.
  std::vector<Literal> literals() const {
    std::vector<Literal> out;
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
  }

  const std::vector<std::pair<Literal, Proof>>& entries() const { return entries_; }

  bool insert(const Literal& l, Proof p) {
    if (contains(l)) return false;
    index_.emplace(l, entries_.size());
    entries_.emplace_back(l, std::move(p));
    return true;
  }

  // First complementary pair, if any.
  std::optional<std::pair<Literal, Literal>> conflict() const {
    for (const auto& [l, p] : entries_)
      if (!l.negated && contains(complement(l))) return std::make_pair(l, complement(l));
    return std::nullopt;
  }

 private:
  std::vector<std::pair<Literal, Proof>> entries_;
  std::map<Literal, std::size_t> index_;
};

struct ChainOptions {
  bool check_consistency = true;
};

// Least fixpoint of a program: strata are saturated bottom-up, absence
// conditions read the completed lower strata.
inline FactBase forward_chain(const Program& prog, ChainOptions opts = {}) {
  using namespace detail;
  FactBase fb;
  for (const auto& f : prog.facts) {
    if (!f.head.is_ground()) throw Error("fact " + f.label + " is not ground");
    auto why = f.justification();
    fb.insert(f.head, Proof{f.head, {why.begin(), why.end()}, {}});
  }

  const auto strata = stratify(prog);
  const std::size_t top = strata.empty() ? 0 : *std::max_element(strata.begin(), strata.end());

  for (std::size_t level = 0; level <= top && !prog.rules.empty(); ++level) {
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t ri = 0; ri < prog.rules.size(); ++ri) {
        if (strata[ri] != level) continue;
        const Rule& r = prog.rules[ri];
        auto rule_vars = variables(r);
        std::vector<std::string> all_vars(rule_vars.begin(), rule_vars.end());
        const auto snapshot = fb.literals();

        std::function<void(std::size_t, Substitution, Proof)> match = [&](std::size_t bi, Substitution s,
                                                                           Proof acc) {
          if (!distinct_ok(r.distinct, s)) return;
          if (bi < r.body.size()) {
            for (const auto& fact : snapshot) {
              if (auto u = unify(r.body[bi], fact, s)) {
                Proof next = acc;
                merge_proof(next, *fb.proof_of(fact));
                match(bi + 1, *u, std::move(next));
              }
            }
            return;
          }
          ground_over(all_vars, 0, s, prog.domain, [&](Substitution& g) {
            if (!distinct_ok(r.distinct, g)) return false;
            for (const auto& a : r.absent) {
              Literal probe = apply(g, a);
              bool found = false;
              for (const auto& fact : fb.literals())
                if (unify(probe, fact)) found = true;
              if (found) return false;
            }
            Literal head = apply(g, r.head);
            if (fb.contains(head)) return false;
            Proof p = acc;
            p.conclusion = head;
            for (const auto& src : r.justification()) p.premises.insert(src);
            Substitution own;
            for (const auto& v : all_vars) own.bind(v, g.resolve(Term::variable(v)));
            p.steps.push_back({r.label, r.justification(), own, head});
            fb.insert(head, std::move(p));
            changed = true;
            return false;
          });
        };
        match(0, {}, Proof{});
      }
    }
  }

  if (opts.check_consistency) {
    if (auto c = fb.conflict())
      throw InconsistentTheory("theory derives both " + to_string(c->first) + " and " + to_string(c->second));
  }
  return fb;
}

inline FactBase forward_chain(const Theory& theory, const CompileContext& ctx = {}, ChainOptions opts = {}) {
  return forward_chain(compile(theory, ctx), opts);
}

inline bool consistent(const Theory& theory, const CompileContext& ctx = {}) {
  try {
    forward_chain(theory, ctx);
    return true;
  } catch (const InconsistentTheory&) {
    return false;
  }
}

// `facts` added to `theory` as labeled facts.
inline bool consistent(const std::vector<Literal>& facts, const Theory& theory, const CompileContext& ctx = {}) {
  Theory t = theory;
  std::size_t i = 0;
  for (const auto& f : facts) t.items.push_back(Rule::fact("fact#" + std::to_string(i++), f));
  return consistent(t, ctx);
}

// Backward chaining: facts before rules, rules in program order, first proof
// wins. Goals repeating an open ancestor fail that branch.
class Prover {
 public:
  explicit Prover(const Program& prog, std::size_t max_depth = kDefaultProofDepth)
      : prog_(prog), max_depth_(max_depth) {}

  std::optional<Proof> prove(const Literal& goal) {
    depth_hit_ = false;
    auto p = prove_quiet(goal);
    if (!p && depth_hit_) throw DepthExceeded("proof depth " + std::to_string(max_depth_) + " exceeded for " + to_string(goal));
    return p;
  }

  // Like prove, but a depth cut-off simply counts as failure.
  std::optional<Proof> prove_quiet(const Literal& goal) {
    std::optional<Proof> found;
    Substitution s;
    Proof acc;
    std::vector<Literal> ancestors;
    solve_one(goal, s, acc, 0, ancestors, [&](Substitution& fin, Proof& p) {
      found = p;
      found->conclusion = apply(fin, goal);
      return true;
    });
    return found;
  }

  bool depth_hit() const { return depth_hit_; }

 private:
  using Cont = std::function<bool(Substitution&, Proof&)>;

  static Literal canonical(const Literal& l) {
    Substitution s;
    std::size_t n = 0;
    for (const auto& v : variables(l)) s.bind(v, Term::variable("_" + std::to_string(n++)));
    return apply(s, l);
  }

  bool solve_one(const Literal& raw, Substitution& s, Proof& acc, std::size_t depth,
                 std::vector<Literal>& ancestors, const Cont& k) {
    if (depth > max_depth_) {
      depth_hit_ = true;
      return false;
    }
    const Literal goal = apply(s, raw);
    const Literal key = canonical(goal);
    if (std::find(ancestors.begin(), ancestors.end(), key) != ancestors.end()) return false;

    for (const auto& f : prog_.facts) {
      auto u = unify(goal, f.head, s);
      if (!u) continue;
      Proof next = acc;
      for (const auto& src : f.justification()) next.premises.insert(src);
      if (k(*u, next)) return true;
    }

    ancestors.push_back(key);
    for (const auto& r0 : prog_.rules) {
      Rule r = rename_apart(r0, "#" + std::to_string(++fresh_));
      auto u = unify(goal, r.head, s);
      if (!u) continue;
      bool done = solve_body(r, 0, *u, acc, depth + 1, ancestors, [&](Substitution& fin, Proof& p) {
        auto vars = variables(r);
        std::vector<std::string> open(vars.begin(), vars.end());
        return detail::ground_over(open, 0, fin, prog_.domain, [&](Substitution& g) {
          if (!detail::distinct_ok(r.distinct, g)) return false;
          Proof next = p;
          for (const auto& src : r.justification()) next.premises.insert(src);
          Substitution own;
          for (const auto& v : vars) own.bind(detail::strip_suffix(v), g.resolve(Term::variable(v)));
          ProofStep step{r0.label, r0.justification(), own, apply(g, r.head)};
          if (std::find(next.steps.begin(), next.steps.end(), step) == next.steps.end()) next.steps.push_back(step);
          // The goal is proven; it is no longer an ancestor of what follows.
          ancestors.pop_back();
          const bool stop = k(g, next);
          ancestors.push_back(key);
          return stop;
        });
      });
      if (done) {
        ancestors.pop_back();
        return true;
      }
    }
    ancestors.pop_back();
    return false;
  }

  bool solve_body(const Rule& r, std::size_t i, Substitution& s, Proof& acc, std::size_t depth,
                  std::vector<Literal>& ancestors, const Cont& k) {
    if (!detail::distinct_ok(r.distinct, s)) return false;
    if (i < r.body.size())
      return solve_one(r.body[i], s, acc, depth, ancestors, [&](Substitution& s2, Proof& p2) {
        return solve_body(r, i + 1, s2, p2, depth, ancestors, k);
      });
    for (const auto& a : r.absent) {
      Prover inner(prog_, max_depth_);
      inner.fresh_ = fresh_ + 100000;
      auto p = inner.prove_quiet(apply(s, a));
      if (inner.depth_hit_) depth_hit_ = true;
      if (p) return false;
    }
    return k(s, acc);
  }

  const Program& prog_;
  std::size_t max_depth_;
  std::size_t fresh_ = 0;
  bool depth_hit_ = false;
};

inline std::optional<Proof> prove(const Program& prog, const Literal& goal, std::size_t depth = kDefaultProofDepth) {
  return Prover(prog, depth).prove(goal);
}

inline std::optional<Proof> prove(const Theory& theory, const Literal& goal, const CompileContext& ctx = {},
                                  std::size_t depth = kDefaultProofDepth) {
  return prove(compile(theory, ctx), goal, depth);
}

// Re-derives a proof's conclusion from its premises by replaying its steps in
// order. Absence conditions are checked against `fixpoint` when given.
inline bool replay(const Proof& proof, const Program& prog, const FactBase* fixpoint = nullptr) {
  std::set<Literal> known;
  for (const auto& f : prog.facts) {
    auto why = f.justification();
    if (std::all_of(why.begin(), why.end(), [&](const std::string& w) { return proof.premises.count(w) > 0; }))
      known.insert(f.head);
  }
  for (const auto& step : proof.steps) {
    const Rule* r = prog.rule(step.rule);
    if (!r) return false;
    for (const auto& src : r->justification())
      if (!proof.premises.count(src)) return false;
    Rule inst = apply(step.binding, *r);
    if (inst.head != step.derived) return false;
    for (const auto& b : inst.body)
      if (!known.count(b)) return false;
    if (!detail::distinct_ok(inst.distinct, Substitution{})) return false;
    for (const auto& d : inst.distinct)
      if (d.lhs.is_variable() || d.rhs.is_variable()) return false;
    if (fixpoint)
      for (const auto& a : inst.absent)
        if (fixpoint->contains(a)) return false;
    known.insert(step.derived);
  }
  if (known.count(proof.conclusion)) return true;
  // Open (existential) conclusions: some known literal instantiates them.
  return std::any_of(known.begin(), known.end(), [&](const Literal& l) { return unify(proof.conclusion, l).has_value(); });
}

}  // namespace mediatrix
