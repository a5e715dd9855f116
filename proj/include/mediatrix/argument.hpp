#pragma once

// Arguments as minimal consistent supports, rebut/undercut attacks, and the
// accept-unless-attacked decision rule.

#include "mediatrix/engine.hpp"
#include "mediatrix/logic.hpp"
#include "mediatrix/theory.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mediatrix {

struct Argument {
  Theory support;  // a subset of the source theory, in its declaration order
  Literal conclusion;
  Proof proof;
  CompileContext context;  // how the source theory was read

  std::set<std::string> labels() const {
    std::set<std::string> out;
    for (const auto& r : support.items) out.insert(r.label);
    for (const auto& p : support.principles) out.insert(p.label);
    return out;
  }

  std::vector<Literal> support_facts() const {
    std::vector<Literal> out;
    for (const auto& r : support.items)
      if (r.is_fact()) out.push_back(r.head);
    return out;
  }
};

inline std::vector<std::string> labels_in_order(const Theory& t) {
  std::vector<std::string> out;
  for (const auto& r : t.items) out.push_back(r.label);
  for (const auto& p : t.principles) out.push_back(p.label);
  return out;
}

// Proves omega, then drops premises in reverse declaration order while the
// remainder still proves it.
inline std::optional<Argument> construct_argument(const Theory& delta, const Literal& omega,
                                                  const CompileContext& ctx = {},
                                                  std::size_t depth = kDefaultProofDepth) {
  auto proof = prove(delta, omega, ctx, depth);
  if (!proof) return std::nullopt;

  std::set<std::string> keep = proof->premises;
  std::vector<std::string> order;
  for (const auto& l : labels_in_order(delta))
    if (keep.count(l)) order.push_back(l);

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::set<std::string> trial = keep;
    trial.erase(*it);
    Program prog = compile(delta.restricted(trial), ctx);
    if (auto p = Prover(prog, depth).prove_quiet(omega)) keep = p->premises;
  }

  Argument arg;
  arg.support = delta.restricted(keep);
  arg.context = ctx;
  auto final_proof = Prover(compile(arg.support, ctx), depth).prove_quiet(omega);
  if (!final_proof) return std::nullopt;
  if (!consistent(arg.support, ctx)) return std::nullopt;
  arg.conclusion = final_proof->conclusion;
  arg.proof = std::move(*final_proof);
  return arg;
}

struct Minimality {
  bool minimal = false;
  bool exact = false;  // false: only single removals were tried
};

// No proper subset of the support proves the conclusion. Exact by subset
// enumeration up to `bound` support members.
inline Minimality minimality_check(const Argument& arg, std::size_t bound = 12,
                                   std::size_t depth = kDefaultProofDepth) {
  const auto members = labels_in_order(arg.support);
  const std::size_t n = members.size();
  auto proves = [&](const std::set<std::string>& subset) {
    Program prog = compile(arg.support.restricted(subset), arg.context);
    return Prover(prog, depth).prove_quiet(arg.conclusion).has_value();
  };
  if (n <= bound) {
    const std::size_t full = (std::size_t{1} << n) - 1;
    for (std::size_t mask = 0; mask < full; ++mask) {
      std::set<std::string> subset;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::size_t{1} << i)) subset.insert(members[i]);
      if (proves(subset)) return {false, true};
    }
    return {true, true};
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> subset(members.begin(), members.end());
    subset.erase(members[i]);
    if (proves(subset)) return {false, false};
  }
  return {true, false};
}

struct Attack {
  enum class Kind { Rebut, Undercut };

  Kind kind;
  Argument attacker;
  Argument target;
  Literal point;  // target conclusion (rebut) or support fact (undercut)
};

inline std::string_view name_of(Attack::Kind k) { return k == Attack::Kind::Rebut ? "rebut" : "undercut"; }

inline std::vector<Attack> find_attacks(const Argument& a, const Argument& b) {
  std::vector<Attack> out;
  if (complementary(a.conclusion, b.conclusion)) out.push_back({Attack::Kind::Rebut, a, b, b.conclusion});
  for (const auto& f : b.support_facts())
    if (complementary(a.conclusion, f)) out.push_back({Attack::Kind::Undercut, a, b, f});
  return out;
}

struct Decision {
  enum class Verdict { Accept, Reject };

  Verdict verdict = Verdict::Accept;
  std::optional<Attack> counter;
  Theory explanation;  // the counter-argument's support when rejecting

  bool accepted() const { return verdict == Verdict::Accept; }
};

// Rejects when the evaluator, having hypothetically adopted the proposal's
// support, can argue for the complement of the conclusion (rebut) or of a
// support fact (undercut). Rebuts are tried first, then support order.
inline Decision evaluate(const Theory& own, const CompileContext& ctx, const Argument& proposed,
                         std::size_t depth = kDefaultProofDepth) {
  const Theory working = own.merged(proposed.support);
  std::vector<std::pair<Attack::Kind, Literal>> targets;
  targets.emplace_back(Attack::Kind::Rebut, proposed.conclusion);
  for (const auto& f : proposed.support_facts()) targets.emplace_back(Attack::Kind::Undercut, f);

  for (const auto& [kind, point] : targets) {
    std::optional<Argument> counter;
    try {
      counter = construct_argument(working, complement(point), ctx, depth);
    } catch (const DepthExceeded&) {
      counter.reset();
    }
    if (!counter) continue;
    Decision d;
    d.verdict = Decision::Verdict::Reject;
    d.explanation = counter->support;
    d.counter = Attack{kind, *counter, proposed, point};
    return d;
  }
  return {};
}

}  // namespace mediatrix
