#pragma once

// Theories (labeled facts and rules plus the general principles they
// subscribe to) and their compilation into a plain rule program.

#include "mediatrix/error.hpp"
#include "mediatrix/logic.hpp"

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mediatrix {

// The shared general theory. Each is realised by the compiler below rather
// than written as a rule, because several of them quantify over rules or
// describe state changes.
enum class Principle {
  Ownership,     // giving makes the receiver the owner
  Reduction,     // intending a goal means intending the preconditions of its plan
  Generosity,    // the mediator does not intend to keep anything
  Unicity,       // giving makes the giver stop owning
  Benevolence,   // an unneeded item is given when requested
  Parsimony,     // no intention towards means of an unintended end
  UniqueChoice,  // exactly one plan per goal is intended
};

inline constexpr std::array<std::pair<Principle, std::string_view>, 7> kPrincipleNames{{
    {Principle::Ownership, "ownership"},
    {Principle::Reduction, "reduction"},
    {Principle::Generosity, "generosity"},
    {Principle::Unicity, "unicity"},
    {Principle::Benevolence, "benevolence"},
    {Principle::Parsimony, "parsimony"},
    {Principle::UniqueChoice, "unique_choice"},
}};

inline std::string_view name_of(Principle p) {
  for (const auto& [k, v] : kPrincipleNames)
    if (k == p) return v;
  return "";
}

inline std::optional<Principle> principle_named(std::string_view name) {
  for (const auto& [k, v] : kPrincipleNames)
    if (v == name) return k;
  return std::nullopt;
}

struct PrincipleDecl {
  Principle principle;
  std::string label;

  bool operator==(const PrincipleDecl&) const = default;
};

struct Theory {
  std::vector<Rule> items;  // declaration order matters for proof search
  std::vector<PrincipleDecl> principles;

  std::optional<std::string> principle_label(Principle p) const {
    for (const auto& d : principles)
      if (d.principle == p) return d.label;
    return std::nullopt;
  }

  const Rule* find(std::string_view label) const {
    for (const auto& r : items)
      if (r.label == label) return &r;
    return nullptr;
  }

  const Rule* find_content(const Rule& r) const {
    for (const auto& it : items)
      if (it.same_content(r)) return &it;
    return nullptr;
  }

  bool contains_label(std::string_view label) const {
    if (find(label)) return true;
    for (const auto& d : principles)
      if (d.label == label) return true;
    return false;
  }

  // Appends unless an item with identical content exists. Returns whether added.
  bool add(Rule r) {
    if (find_content(r)) return false;
    items.push_back(std::move(r));
    return true;
  }

  void add_principle(Principle p, std::string label) {
    if (!principle_label(p)) principles.push_back({p, std::move(label)});
  }

  // Keeps only items and principles whose label is in `labels`.
  Theory restricted(const std::set<std::string>& labels) const {
    Theory t;
    for (const auto& r : items)
      if (labels.count(r.label)) t.items.push_back(r);
    for (const auto& d : principles)
      if (labels.count(d.label)) t.principles.push_back(d);
    return t;
  }

  Theory merged(const Theory& other) const {
    Theory t = *this;
    for (const auto& r : other.items) t.add(r);
    for (const auto& d : other.principles) t.add_principle(d.principle, d.label);
    return t;
  }

  bool operator==(const Theory&) const = default;
};

struct CompileContext {
  std::optional<std::string> generous;  // agent for which generosity holds
  std::set<std::string> excluded;       // rule labels not selected under unique choice
};

struct Program {
  std::vector<Rule> facts;
  std::vector<Rule> rules;
  std::set<std::string> domain;  // constants, for grounding free head variables

  const Rule* rule(std::string_view name) const {
    for (const auto& r : rules)
      if (r.label == name) return &r;
    return nullptr;
  }
};

namespace detail {

inline Term var(const char* name) { return Term::variable(std::string("%") + name); }

inline Literal have(Term who, Term what) { return Literal::atom("have", {std::move(who), std::move(what)}); }

inline Literal give(Term from, Term to, Term what) {
  return Literal::atom("give", {std::move(from), std::move(to), std::move(what)});
}

inline void add_constants(const Literal& l, std::set<std::string>& out) {
  if (l.is_modal() && l.owner.is_constant()) out.insert(l.owner.name);
  for (const auto& t : l.args)
    if (t.is_constant()) out.insert(t.name);
}

// Other body literals needed to bind the variables of `target` that the head
// leaves open, chosen greedily in body order.
inline std::vector<Literal> binders(const Rule& r, std::size_t target) {
  std::set<std::string> bound = variables(r.head);
  std::set<std::string> need = variables(r.body[target]);
  std::vector<Literal> out;
  auto missing = [&] {
    for (const auto& v : need)
      if (!bound.count(v)) return true;
    return false;
  };
  for (std::size_t i = 0; i < r.body.size() && missing(); ++i) {
    if (i == target) continue;
    auto vs = variables(r.body[i]);
    bool helps = false;
    for (const auto& v : vs)
      if (need.count(v) && !bound.count(v)) helps = true;
    if (!helps) continue;
    out.push_back(r.body[i]);
    bound.insert(vs.begin(), vs.end());
  }
  return out;
}

inline std::vector<Distinct> distinct_within(const Rule& r, const Rule& compiled) {
  auto vs = variables(compiled);
  std::vector<Distinct> out;
  for (const auto& d : r.distinct) {
    bool ok = (!d.lhs.is_variable() || vs.count(d.lhs.name)) && (!d.rhs.is_variable() || vs.count(d.rhs.name));
    if (ok) out.push_back(d);
  }
  return out;
}

}  // namespace detail

// Expands a theory into facts and plain rules. Explicit give facts are applied
// as ownership changes instead of being saturated, so a theory never derives
// both have(x, z) and ~have(x, z) from a single transfer.
inline Program compile(const Theory& theory, const CompileContext& ctx = {}) {
  using namespace detail;
  Program prog;
  const auto ownership = theory.principle_label(Principle::Ownership);
  const auto unicity = theory.principle_label(Principle::Unicity);
  const auto reduction = theory.principle_label(Principle::Reduction);
  const auto generosity = theory.principle_label(Principle::Generosity);
  const auto benevolence = theory.principle_label(Principle::Benevolence);
  const auto parsimony = theory.principle_label(Principle::Parsimony);

  std::vector<Rule> user_rules;
  for (const auto& it : theory.items) {
    if (it.is_fact())
      prog.facts.push_back(it);
    else
      user_rules.push_back(it);
    add_constants(it.head, prog.domain);
    for (const auto& l : it.body) add_constants(l, prog.domain);
    for (const auto& l : it.absent) add_constants(l, prog.domain);
  }

  if (ownership || unicity) {
    const std::vector<Rule> snapshot = prog.facts;
    for (const Rule& g : snapshot) {
      const Literal& a = g.head;
      if (a.is_modal() || a.negated || a.predicate != "give" || a.args.size() != 3 || !a.is_ground()) continue;
      Literal held = have(a.args[0], a.args[2]);
      auto it = std::find_if(prog.facts.begin(), prog.facts.end(), [&](const Rule& f) { return f.head == held; });
      if (it == prog.facts.end()) continue;
      std::vector<std::string> why = it->justification();
      for (const auto& s : g.justification()) why.push_back(s);
      if (ownership) why.push_back(*ownership);
      if (unicity) {
        why.push_back(*unicity);
        prog.facts.erase(it);
      }
      Rule moved = Rule::fact(g.label + ">" + a.args[1].name, have(a.args[1], a.args[2]));
      moved.sources = why;
      prog.facts.push_back(std::move(moved));
    }
  }

  for (const auto& r : user_rules) prog.rules.push_back(r);

  for (const auto& r : user_rules) {
    if (!r.contrapositive) continue;
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      Rule mt;
      mt.label = r.label + "/mt#" + std::to_string(i);
      mt.head = complement(r.body[i]);
      mt.body.push_back(complement(r.head));
      for (std::size_t j = 0; j < r.body.size(); ++j)
        if (j != i) mt.body.push_back(r.body[j]);
      mt.sources = {r.label};
      prog.rules.push_back(std::move(mt));
    }
  }

  const Term owner = var("J");
  auto reducible = [&](const Rule& r) {
    return !ctx.excluded.count(r.label) && !r.head.is_modal() && !r.head.negated;
  };

  if (reduction) {
    for (const auto& r : user_rules) {
      if (!reducible(r)) continue;
      for (std::size_t i = 0; i < r.body.size(); ++i) {
        const Literal& pre = r.body[i];
        if (pre.is_modal() || pre.negated) continue;
        Rule red;
        red.label = *reduction + "/" + r.label + "#" + std::to_string(i);
        red.head = pre.tagged(Modality::Intention, owner);
        red.body.push_back(r.head.tagged(Modality::Intention, owner));
        for (auto& b : binders(r, i)) red.body.push_back(b);
        red.distinct = distinct_within(r, red);
        red.sources = {r.label, *reduction};
        prog.rules.push_back(std::move(red));
      }
    }
    if (ownership) {
      // Reducing "have(X,Z) & give(X,Y,Z) -> have(Y,Z)" on its give precondition.
      Rule red;
      red.label = *reduction + "/" + *ownership;
      red.head = give(var("X"), var("Y"), var("Z")).tagged(Modality::Intention, owner);
      red.body = {have(var("Y"), var("Z")).tagged(Modality::Intention, owner), have(var("X"), var("Z"))};
      red.distinct = {{var("X"), var("Y")}};
      red.sources = {*ownership, *reduction};
      prog.rules.push_back(std::move(red));
    }
  }

  if (generosity && ctx.generous) {
    Term me = Term::constant(*ctx.generous);
    Rule gen;
    gen.label = *generosity;
    gen.head = complement(have(me, var("Q")).tagged(Modality::Intention, me));
    gen.body = {have(me, var("Q"))};
    prog.rules.push_back(std::move(gen));
    prog.domain.insert(*ctx.generous);
  }

  if (benevolence) {
    Rule ben;
    ben.label = *benevolence;
    ben.head = give(owner, var("X"), var("Z")).tagged(Modality::Intention, owner);
    ben.body = {have(owner, var("Z")), give(owner, var("X"), var("Z")).tagged(Modality::Intention, var("X"))};
    ben.absent = {have(owner, var("Z")).tagged(Modality::Intention, owner)};
    ben.distinct = {{owner, var("X")}};
    prog.rules.push_back(std::move(ben));
  }

  if (parsimony) {
    // Keeping: what an agent intends to have it does not intend to give away.
    Rule keep;
    keep.label = *parsimony;
    keep.head = complement(give(owner, var("Y"), var("Z")).tagged(Modality::Intention, owner));
    keep.body = {have(owner, var("Z")).tagged(Modality::Intention, owner), have(owner, var("Z"))};
    keep.distinct = {{owner, var("Y")}};
    prog.rules.push_back(std::move(keep));
    for (const auto& r : user_rules) {
      if (!reducible(r)) continue;
      for (std::size_t i = 0; i < r.body.size(); ++i) {
        const Literal& pre = r.body[i];
        if (pre.is_modal() || pre.negated) continue;
        Rule par;
        par.label = *parsimony + "/" + r.label + "#" + std::to_string(i);
        par.head = complement(pre.tagged(Modality::Intention, owner));
        par.body.push_back(complement(r.head.tagged(Modality::Intention, owner)));
        for (auto& b : binders(r, i)) par.body.push_back(b);
        par.distinct = distinct_within(r, par);
        par.sources = {r.label, *parsimony};
        prog.rules.push_back(std::move(par));
      }
    }
  }

  return prog;
}

}  // namespace mediatrix
