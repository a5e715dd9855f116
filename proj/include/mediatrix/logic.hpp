#pragma once

// Function-free first-order literals with an optional attitude tag
// (belief / desire / intention of some owner), rules over them, and
// most-general unification.

#include <algorithm>
#include <cctype>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mediatrix {

struct Term {
  enum class Kind { Constant, Variable };

  Kind kind = Kind::Constant;
  std::string name;

  static Term constant(std::string name) { return {Kind::Constant, std::move(name)}; }
  static Term variable(std::string name) { return {Kind::Variable, std::move(name)}; }

  bool is_variable() const { return kind == Kind::Variable; }
  bool is_constant() const { return kind == Kind::Constant; }

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

enum class Modality { Plain, Belief, Desire, Intention };

inline std::string_view keyword(Modality m) {
  switch (m) {
    case Modality::Belief: return "bel";
    case Modality::Desire: return "des";
    case Modality::Intention: return "int";
    case Modality::Plain: break;
  }
  return "";
}

// A literal `[~] pred(args)` or `[~] int(owner, pred(args))`. The attitude
// embeds exactly one atom; negation applies to the whole literal.
struct Literal {
  Modality modality = Modality::Plain;
  Term owner;  // unused (default) when modality is Plain
  bool negated = false;
  std::string predicate;
  std::vector<Term> args;

  static Literal atom(std::string predicate, std::vector<Term> args) {
    Literal l;
    l.predicate = std::move(predicate);
    l.args = std::move(args);
    return l;
  }

  Literal tagged(Modality m, Term who) const {
    Literal l = *this;
    l.modality = m;
    l.owner = m == Modality::Plain ? Term{} : std::move(who);
    return l;
  }

  // The embedded atom without attitude or negation.
  Literal inner() const { return atom(predicate, args); }

  bool is_modal() const { return modality != Modality::Plain; }

  bool is_ground() const {
    if (is_modal() && owner.is_variable()) return false;
    return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
  }

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

inline Literal complement(Literal l) {
  l.negated = !l.negated;
  return l;
}

inline bool complementary(const Literal& a, const Literal& b) {
  return a.negated != b.negated && a.modality == b.modality && a.owner == b.owner &&
         a.predicate == b.predicate && a.args == b.args;
}

// `X != Y`, checked once both sides are bound.
struct Distinct {
  Term lhs;
  Term rhs;

  auto operator<=>(const Distinct&) const = default;
  bool operator==(const Distinct&) const = default;
};

struct Rule {
  std::string label;
  Literal head;
  std::vector<Literal> body;
  std::vector<Literal> absent;     // negation as failure
  std::vector<Distinct> distinct;
  std::vector<std::string> sources;  // labels justifying a compiled rule; empty means {label}
  bool contrapositive = false;       // licenses modus tollens

  static Rule fact(std::string label, Literal l) {
    Rule r;
    r.label = std::move(label);
    r.head = std::move(l);
    return r;
  }

  bool is_fact() const { return body.empty() && absent.empty() && distinct.empty(); }

  std::vector<std::string> justification() const {
    return sources.empty() ? std::vector<std::string>{label} : sources;
  }

  // Equal as formulas: labels and provenance ignored.
  bool same_content(const Rule& o) const {
    return head == o.head && body == o.body && absent == o.absent && distinct == o.distinct;
  }

  bool operator==(const Rule&) const = default;
};

// --- variables ---------------------------------------------------------------

inline void collect_variables(const Literal& l, std::set<std::string>& out) {
  if (l.is_modal() && l.owner.is_variable()) out.insert(l.owner.name);
  for (const auto& t : l.args)
    if (t.is_variable()) out.insert(t.name);
}

inline std::set<std::string> variables(const Literal& l) {
  std::set<std::string> out;
  collect_variables(l, out);
  return out;
}

inline std::set<std::string> variables(const Rule& r) {
  std::set<std::string> out;
  collect_variables(r.head, out);
  for (const auto& l : r.body) collect_variables(l, out);
  for (const auto& l : r.absent) collect_variables(l, out);
  for (const auto& d : r.distinct) {
    if (d.lhs.is_variable()) out.insert(d.lhs.name);
    if (d.rhs.is_variable()) out.insert(d.rhs.name);
  }
  return out;
}

// Head, absence conditions and inequalities only mention variables bound by
// the positive body.
inline bool range_restricted(const Rule& r) {
  if (r.is_fact()) return r.head.is_ground();
  std::set<std::string> bound;
  for (const auto& l : r.body) collect_variables(l, bound);
  auto covered = [&](const std::set<std::string>& vs) {
    return std::includes(bound.begin(), bound.end(), vs.begin(), vs.end());
  };
  if (!covered(variables(r.head))) return false;
  for (const auto& l : r.absent)
    if (!covered(variables(l))) return false;
  for (const auto& d : r.distinct) {
    if (d.lhs.is_variable() && !bound.count(d.lhs.name)) return false;
    if (d.rhs.is_variable() && !bound.count(d.rhs.name)) return false;
  }
  return true;
}

// --- substitution ------------------------------------------------------------

class Substitution {
 public:
  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const std::string, Term>> init) : bindings_(init) {}

  // Follows variable-to-variable chains to the terminal binding.
  Term resolve(const Term& t) const {
    Term cur = t;
    for (std::size_t guard = 0; cur.is_variable() && guard <= bindings_.size(); ++guard) {
      auto it = bindings_.find(cur.name);
      if (it == bindings_.end()) break;
      cur = it->second;
    }
    return cur;
  }

  void bind(const std::string& var, Term value) { bindings_[var] = std::move(value); }

  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::map<std::string, Term>& bindings() const { return bindings_; }

  // Same bindings, each resolved to its terminal term.
  Substitution normalized() const {
    Substitution s;
    for (const auto& [k, v] : bindings_) s.bindings_[k] = resolve(v);
    return s;
  }

  bool operator==(const Substitution& o) const { return normalized().bindings_ == o.normalized().bindings_; }

 private:
  std::map<std::string, Term> bindings_;
};

inline Term apply(const Substitution& s, const Term& t) { return s.resolve(t); }

inline Literal apply(const Substitution& s, Literal l) {
  if (l.is_modal()) l.owner = s.resolve(l.owner);
  for (auto& t : l.args) t = s.resolve(t);
  return l;
}

inline Rule apply(const Substitution& s, Rule r) {
  r.head = apply(s, std::move(r.head));
  for (auto& l : r.body) l = apply(s, std::move(l));
  for (auto& l : r.absent) l = apply(s, std::move(l));
  for (auto& d : r.distinct) d = {s.resolve(d.lhs), s.resolve(d.rhs)};
  return r;
}

inline bool unify_terms(const Term& a, const Term& b, Substitution& s) {
  Term x = s.resolve(a);
  Term y = s.resolve(b);
  if (x == y) return true;
  if (x.is_variable()) {
    s.bind(x.name, y);
    return true;
  }
  if (y.is_variable()) {
    s.bind(y.name, x);
    return true;
  }
  return false;
}

// Most general unifier extending `seed`, if any.
inline std::optional<Substitution> unify(const Literal& a, const Literal& b, Substitution seed = {}) {
  if (a.modality != b.modality || a.negated != b.negated || a.predicate != b.predicate ||
      a.args.size() != b.args.size())
    return std::nullopt;
  if (a.is_modal() && !unify_terms(a.owner, b.owner, seed)) return std::nullopt;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!unify_terms(a.args[i], b.args[i], seed)) return std::nullopt;
  return seed.normalized();
}

// Renames every variable of `r` by appending `suffix`.
inline Rule rename_apart(const Rule& r, const std::string& suffix) {
  Substitution s;
  for (const auto& v : variables(r)) s.bind(v, Term::variable(v + suffix));
  return apply(s, r);
}

// --- text --------------------------------------------------------------------

inline std::string to_string(const Term& t) { return t.name; }

inline std::string to_string(const Literal& l) {
  std::string atom = l.predicate;
  if (!l.args.empty()) {
    atom += '(';
    for (std::size_t i = 0; i < l.args.size(); ++i) {
      if (i) atom += ", ";
      atom += l.args[i].name;
    }
    atom += ')';
  }
  std::string out = l.negated ? "~" : "";
  if (l.is_modal())
    out += std::string(keyword(l.modality)) + "(" + l.owner.name + ", " + atom + ")";
  else
    out += atom;
  return out;
}

inline std::string to_string(const Distinct& d) { return d.lhs.name + " != " + d.rhs.name; }

inline std::string to_string(const Rule& r) {
  std::string out = to_string(r.head);
  if (r.is_fact()) return out;
  out += " :- ";
  bool first = true;
  auto sep = [&] {
    if (!first) out += ", ";
    first = false;
  };
  for (const auto& l : r.body) {
    sep();
    out += to_string(l);
  }
  for (const auto& l : r.absent) {
    sep();
    out += "not(" + to_string(l) + ")";
  }
  for (const auto& d : r.distinct) {
    sep();
    out += to_string(d);
  }
  return out;
}

// "M.2" < "M.10": digit runs compare numerically.
inline bool label_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    bool da = std::isdigit(static_cast<unsigned char>(a[i]));
    bool db = std::isdigit(static_cast<unsigned char>(b[j]));
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      auto na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

}  // namespace mediatrix
