#pragma once

// Scenario files (.med): agents, the mediator, their theories and resources.
//
//   scenario home_improvement;
//   agent alpha;              mediator mu;
//   strategy alpha = eager;   generosity mu = on;
//   resource alpha screw = 0.0;
//   principle G.1 = ownership;
//   bridges R.1, R.3;
//   config max_rounds = 64;   # also: stall, proof_depth
//   @A.6 bel alpha: can(X, hang_picture) :- have(X, hammer), have(X, nail), have(X, picture).
//   contrapose A.6;
//
// Units are bel, des, int and com; an item owned by `shared` goes to every
// party. Body entries may be `not(literal)` or `X != Y`. Identifiers starting
// with an uppercase letter or `_` are variables.

#include "mediatrix/agent.hpp"
#include "mediatrix/error.hpp"
#include "mediatrix/logic.hpp"
#include "mediatrix/mediator.hpp"
#include "mediatrix/theory.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace mediatrix {

inline constexpr std::string_view kSharedOwner = "shared";

struct ItemDecl {
  std::string owner;
  Unit unit = Unit::B;
  Rule rule;

  bool operator==(const ItemDecl&) const = default;
};

struct AgentDecl {
  std::string id;
  Strategy strategy = Strategy::Eager;
  std::vector<Resource> resources;
  bool generous = false;

  bool operator==(const AgentDecl&) const = default;
};

struct Scenario {
  std::string name;
  std::vector<AgentDecl> agents;  // the two negotiating agents
  AgentDecl mediator;
  std::vector<PrincipleDecl> principles;
  std::set<Bridge> bridges;
  std::vector<ItemDecl> items;
  MediationConfig config;
  std::vector<std::string> warnings;

  bool operator==(const Scenario& o) const {
    return name == o.name && agents == o.agents && mediator == o.mediator && principles == o.principles &&
           bridges == o.bridges && items == o.items && config.max_rounds == o.config.max_rounds &&
           config.stall_threshold == o.config.stall_threshold && config.proof_depth == o.config.proof_depth;
  }

  Theory shared_theory() const {
    Theory t;
    for (const auto& i : items)
      if (i.owner == kSharedOwner) t.items.push_back(i.rule);
    t.principles = principles;
    return t;
  }

  AgentState agent_state(std::size_t index) const {
    const AgentDecl& d = agents.at(index);
    AgentState a;
    a.id = d.id;
    a.strategy = d.strategy;
    a.resources = d.resources;
    a.generous = d.generous;
    a.bridges = bridges;
    for (const auto& i : items)
      if (i.owner == d.id || (i.owner == kSharedOwner && i.unit == Unit::B)) a.unit(i.unit).items.push_back(i.rule);
    a.unit(Unit::B).principles = principles;
    return a;
  }

  MediatorState mediator_state() const {
    MediatorState m;
    m.id = mediator.id;
    m.resources = mediator.resources;
    m.generous = mediator.generous;
    m.bridges = bridges;
    for (const auto& i : items)
      if (i.owner == mediator.id || (i.owner == kSharedOwner && i.unit == Unit::B)) m.theory.items.push_back(i.rule);
    m.theory.principles = principles;
    return m;
  }
};

namespace detail {

class ScenarioParser {
 public:
  explicit ScenarioParser(std::string_view text) : s_(text) {}

  Scenario parse() {
    skip();
    if (at_end()) fail("statement");
    while (!at_end()) {
      statement();
      skip();
    }
    return finish();
  }

  Literal literal_only() {
    skip();
    Literal l = literal();
    skip();
    if (!at_end()) fail("end of input");
    return l;
  }

  Rule clause_only(const std::string& label) {
    skip();
    Rule r = clause(label);
    skip();
    if (peek() == '.') ++pos_;
    skip();
    if (!at_end()) fail("end of input");
    return r;
  }

 private:
  struct Pos {
    std::size_t line, column;
  };

  std::string_view s_;
  std::size_t pos_ = 0;
  Scenario sc_;
  std::vector<std::string> agent_order_;
  bool have_mediator_ = false;
  bool bridges_set_ = false;
  std::vector<std::pair<std::string, Pos>> contrapose_;
  std::vector<std::pair<std::string, std::string>> strategies_, generosity_;
  std::vector<std::pair<std::string, Resource>> resources_;
  std::vector<Pos> resource_pos_;

  bool at_end() const { return pos_ >= s_.size(); }
  char peek(std::size_t k = 0) const { return pos_ + k < s_.size() ? s_[pos_ + k] : '\0'; }

  Pos position(std::size_t at) const {
    Pos p{1, 1};
    for (std::size_t i = 0; i < at && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++p.line;
        p.column = 1;
      } else {
        ++p.column;
      }
    }
    return p;
  }

  std::string found() const {
    if (at_end()) return "end of input";
    unsigned char c = static_cast<unsigned char>(peek());
    if (c < 0x20 || c >= 0x7f) {
      static const char* hex = "0123456789abcdef";
      return std::string("byte 0x") + hex[c >> 4] + hex[c & 15];
    }
    return "'" + std::string(1, static_cast<char>(c)) + "'";
  }

  [[noreturn]] void fail(const std::string& expected) const {
    Pos p = position(pos_);
    throw ParseError(p.line, p.column, expected, found());
  }

  [[noreturn]] void invalid(const std::string& what, std::size_t at) const {
    Pos p = position(at);
    throw ValidationError(std::to_string(p.line) + ":" + std::to_string(p.column) + ": " + what);
  }

  void skip() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  static bool word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  }

  std::string word(const std::string& expected) {
    skip();
    std::size_t start = pos_;
    char c = peek();
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_')) fail(expected);
    while (word_char(peek())) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string constant(const std::string& expected) {
    skip();
    char c = peek();
    if (!(c >= 'a' && c <= 'z')) fail(expected);
    return word(expected);
  }

  std::string label() {
    skip();
    std::size_t start = pos_;
    if (!word_char(peek())) fail("label");
    while (word_char(peek()) || (peek() == '.' && word_char(peek(1)))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip();
    if (peek() != c) fail(std::string("'") + c + "'");
    ++pos_;
  }

  void expect(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) != tok) fail("'" + std::string(tok) + "'");
    pos_ += tok.size();
  }

  bool accept(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) != tok) return false;
    pos_ += tok.size();
    return true;
  }

  bool keyword_ahead(std::string_view kw) {
    skip();
    if (s_.substr(pos_, kw.size()) != kw) return false;
    return !word_char(peek(kw.size()));
  }

  Term term() {
    skip();
    char c = peek();
    if ((c >= 'A' && c <= 'Z') || c == '_') return Term::variable(word("term"));
    if (c >= 'a' && c <= 'z') return Term::constant(word("term"));
    fail("term");
  }

  Literal atom() {
    std::string pred = constant("predicate");
    Literal l = Literal::atom(pred, {});
    skip();
    if (peek() == '(') {
      ++pos_;
      l.args.push_back(term());
      while (accept(",")) l.args.push_back(term());
      expect(')');
    }
    return l;
  }

  Literal literal() {
    skip();
    bool neg = false;
    if (peek() == '~') {
      ++pos_;
      neg = true;
    }
    skip();
    std::optional<Modality> mod;
    for (auto m : {Modality::Belief, Modality::Desire, Modality::Intention}) {
      std::string_view kw = keyword(m);
      if (s_.substr(pos_, kw.size()) == kw) {
        std::size_t after = pos_ + kw.size();
        while (after < s_.size() && (s_[after] == ' ' || s_[after] == '\t')) ++after;
        if (after < s_.size() && s_[after] == '(' && !word_char(peek(kw.size()))) mod = m;
      }
    }
    Literal l;
    if (mod) {
      expect(keyword(*mod));
      expect('(');
      Term who = term();
      expect(',');
      l = atom().tagged(*mod, who);
      expect(')');
    } else {
      l = atom();
    }
    l.negated = neg;
    return l;
  }

  Rule clause(const std::string& lbl) {
    Rule r;
    r.label = lbl;
    r.head = literal();
    if (accept(":-")) {
      do {
        skip();
        if (keyword_ahead("not")) {
          std::size_t save = pos_;
          expect("not");
          skip();
          if (peek() == '(') {
            ++pos_;
            r.absent.push_back(literal());
            expect(')');
            continue;
          }
          pos_ = save;
        }
        char c = peek();
        if ((c >= 'A' && c <= 'Z') || c == '_') {
          Term lhs = term();
          expect("!=");
          r.distinct.push_back({lhs, term()});
          continue;
        }
        if (c >= 'a' && c <= 'z') {
          std::size_t save = pos_;
          Term lhs = term();
          skip();
          if (s_.substr(pos_, 2) == "!=") {
            pos_ += 2;
            r.distinct.push_back({lhs, term()});
            continue;
          }
          pos_ = save;
        }
        r.body.push_back(literal());
      } while (accept(","));
    }
    return r;
  }

  std::string declared(const std::string& what) {
    std::size_t at = pos_;
    std::string id = constant(what);
    if (id != sc_.mediator.id && std::find(agent_order_.begin(), agent_order_.end(), id) == agent_order_.end())
      invalid("undeclared " + what + " " + id, at);
    return id;
  }

  void end_statement() { expect(';'); }

  void statement() {
    skip();
    const std::size_t start = pos_;
    if (peek() == '@') {
      ++pos_;
      item(start);
      return;
    }
    const std::string kw = word("statement");
    if (kw == "scenario") {
      sc_.name = constant("scenario name");
    } else if (kw == "agent") {
      std::size_t at = pos_;
      std::string id = constant("agent id");
      if (id == kSharedOwner || std::find(agent_order_.begin(), agent_order_.end(), id) != agent_order_.end() ||
          (have_mediator_ && id == sc_.mediator.id))
        invalid("duplicate id " + id, at);
      agent_order_.push_back(id);
    } else if (kw == "mediator") {
      std::size_t at = pos_;
      std::string id = constant("mediator id");
      if (have_mediator_ || id == kSharedOwner ||
          std::find(agent_order_.begin(), agent_order_.end(), id) != agent_order_.end())
        invalid("duplicate id " + id, at);
      sc_.mediator.id = id;
      have_mediator_ = true;
    } else if (kw == "strategy") {
      std::string id = declared("agent id");
      expect('=');
      std::size_t at = pos_;
      std::string v = constant("eager or cautious");
      if (v != "eager" && v != "cautious") {
        pos_ = at;
        skip();
        fail("eager or cautious");
      }
      strategies_.emplace_back(id, v);
    } else if (kw == "generosity") {
      std::string id = declared("party id");
      expect('=');
      std::size_t at = pos_;
      std::string v = constant("on or off");
      if (v != "on" && v != "off") {
        pos_ = at;
        skip();
        fail("on or off");
      }
      generosity_.emplace_back(id, v);
    } else if (kw == "resource") {
      std::string id = declared("party id");
      std::string res = constant("resource name");
      expect('=');
      skip();
      std::size_t at = pos_;
      double v = number();
      if (v < 0.0 || v > 1.0) invalid("resource value outside [0, 1]", at);
      resources_.emplace_back(id, Resource{res, v});
      resource_pos_.push_back(position(start));
    } else if (kw == "principle") {
      std::size_t at = pos_;
      std::string lbl = label();
      expect('=');
      std::size_t nat = pos_;
      std::string name = constant("principle name");
      auto p = principle_named(name);
      if (!p) {
        pos_ = nat;
        skip();
        fail("principle name");
      }
      for (const auto& d : sc_.principles)
        if (d.principle == *p || d.label == lbl) invalid("duplicate principle " + lbl, at);
      sc_.principles.push_back({*p, lbl});
    } else if (kw == "bridges") {
      bridges_set_ = true;
      if (keyword_ahead("none")) {
        expect("none");
        end_statement();
        return;
      }
      do {
        skip();
        std::size_t at = pos_;
        std::string lbl = label();
        auto b = bridge_labeled(lbl);
        if (!b) {
          pos_ = at;
          fail("bridge label R.1 to R.5");
        }
        sc_.bridges.insert(*b);
      } while (accept(","));
    } else if (kw == "config") {
      std::size_t at = pos_;
      std::string key = constant("config key");
      expect('=');
      skip();
      std::size_t vat = pos_;
      long v = integer();
      if (v <= 0) invalid("config value must be positive", vat);
      if (key == "max_rounds")
        sc_.config.max_rounds = static_cast<int>(v);
      else if (key == "stall")
        sc_.config.stall_threshold = static_cast<int>(v);
      else if (key == "proof_depth")
        sc_.config.proof_depth = static_cast<std::size_t>(v);
      else
        invalid("unknown config key " + key, at);
    } else if (kw == "contrapose") {
      skip();
      contrapose_.emplace_back(label(), position(pos_));
    } else {
      pos_ = start;
      fail("statement");
    }
    end_statement();
  }

  double number() {
    std::size_t start = pos_;
    while ((peek() >= '0' && peek() <= '9') || peek() == '.' || peek() == '-') ++pos_;
    double v = 0.0;
    auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || p != s_.data() + pos_ || start == pos_) {
      pos_ = start;
      fail("number");
    }
    return v;
  }

  long integer() {
    std::size_t start = pos_;
    while ((peek() >= '0' && peek() <= '9') || peek() == '-') ++pos_;
    long v = 0;
    auto [p, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || p != s_.data() + pos_ || start == pos_ || v > 1000000) {
      pos_ = start;
      fail("integer");
    }
    return v;
  }

  void item(std::size_t start) {
    std::string lbl = label();
    std::string u = word("unit");
    ItemDecl d;
    if (u == "bel")
      d.unit = Unit::B;
    else if (u == "des")
      d.unit = Unit::D;
    else if (u == "int")
      d.unit = Unit::I;
    else if (u == "com")
      d.unit = Unit::C;
    else {
      pos_ -= u.size();
      fail("unit bel, des, int or com");
    }
    skip();
    std::size_t oat = pos_;
    d.owner = constant("owner");
    if (d.owner != kSharedOwner && d.owner != sc_.mediator.id &&
        std::find(agent_order_.begin(), agent_order_.end(), d.owner) == agent_order_.end())
      invalid("undeclared owner " + d.owner, oat);
    if ((d.owner == sc_.mediator.id || d.owner == kSharedOwner) && d.unit != Unit::B)
      invalid("only beliefs may be held by " + d.owner, oat);
    expect(':');
    d.rule = clause(lbl);
    expect('.');
    if (!range_restricted(d.rule)) invalid("rule " + lbl + " is not range-restricted", start);
    for (const auto& i : sc_.items)
      if (i.rule.label == lbl) invalid("duplicate label " + lbl, start);
    sc_.items.push_back(std::move(d));
  }

  Scenario finish() {
    if (agent_order_.size() != 2)
      throw ValidationError("exactly two negotiating agents supported, found " + std::to_string(agent_order_.size()));
    if (!have_mediator_) throw ValidationError("no mediator declared");
    for (const auto& id : agent_order_) sc_.agents.push_back({id, Strategy::Eager, {}, false});
    auto decl = [&](const std::string& id) -> AgentDecl& {
      for (auto& a : sc_.agents)
        if (a.id == id) return a;
      return sc_.mediator;
    };
    for (const auto& [id, v] : strategies_) {
      if (id == sc_.mediator.id) throw ValidationError("the mediator has no disclosure strategy");
      decl(id).strategy = v == "eager" ? Strategy::Eager : Strategy::Cautious;
    }
    for (const auto& [id, v] : generosity_) decl(id).generous = v == "on";
    std::set<std::string> seen;
    for (std::size_t i = 0; i < resources_.size(); ++i) {
      const std::string& name = resources_[i].second.name;
      if (!seen.insert(name).second)
        throw ValidationError(std::to_string(resource_pos_[i].line) + ":" + std::to_string(resource_pos_[i].column) +
                              ": duplicate resource " + name);
      decl(resources_[i].first).resources.push_back(resources_[i].second);
    }
    for (AgentDecl* a : {&sc_.agents[0], &sc_.agents[1], &sc_.mediator}) {
      auto sorted = a->resources;
      sort_resources(sorted);
      if (sorted != a->resources) {
        sc_.warnings.push_back("resources of " + a->id + " were not in ascending order of value; sorted");
        a->resources = std::move(sorted);
      }
    }
    for (const auto& [lbl, pos] : contrapose_) {
      bool hit = false;
      for (auto& i : sc_.items)
        if (i.rule.label == lbl && !i.rule.is_fact()) {
          i.rule.contrapositive = true;
          hit = true;
        }
      if (!hit)
        throw ValidationError(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": no rule labeled " + lbl);
    }
    for (const auto& p : sc_.principles)
      for (const auto& i : sc_.items)
        if (i.rule.label == p.label) throw ValidationError("duplicate label " + p.label);
    if (!bridges_set_)
      for (const auto& [b, l] : kBridgeLabels) sc_.bridges.insert(b);
    return std::move(sc_);
  }
};

inline std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  std::string s = os.str();
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos) s += ".0";
  return s;
}

}  // namespace detail

inline Scenario parse_scenario(std::string_view text) { return detail::ScenarioParser(text).parse(); }

inline Literal parse_literal(std::string_view text) { return detail::ScenarioParser(text).literal_only(); }

inline Rule parse_rule(std::string_view text, const std::string& label = "") {
  return detail::ScenarioParser(text).clause_only(label);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read scenario " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

inline std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream os;
  if (!sc.name.empty()) os << "scenario " << sc.name << ";\n";
  for (const auto& a : sc.agents) os << "agent " << a.id << ";\n";
  os << "mediator " << sc.mediator.id << ";\n";
  for (const auto& a : sc.agents) os << "strategy " << a.id << " = " << name_of(a.strategy) << ";\n";
  for (const auto* a : {&sc.agents[0], &sc.agents[1], &sc.mediator}) {
    if (a->generous) os << "generosity " << a->id << " = on;\n";
    for (const auto& r : a->resources)
      os << "resource " << a->id << " " << r.name << " = " << detail::format_value(r.value) << ";\n";
  }
  if (sc.bridges.empty()) {
    os << "bridges none;\n";
  } else {
    os << "bridges ";
    bool first = true;
    for (const auto& b : sc.bridges) {
      os << (first ? "" : ", ") << label_of(b);
      first = false;
    }
    os << ";\n";
  }
  for (const auto& p : sc.principles) os << "principle " << p.label << " = " << name_of(p.principle) << ";\n";
  os << "config max_rounds = " << sc.config.max_rounds << ";\n";
  os << "config stall = " << sc.config.stall_threshold << ";\n";
  os << "config proof_depth = " << sc.config.proof_depth << ";\n";
  for (const auto& i : sc.items)
    os << "@" << i.rule.label << " " << name_of(i.unit) << " " << i.owner << ": " << to_string(i.rule) << ".\n";
  for (const auto& i : sc.items)
    if (i.rule.contrapositive) os << "contrapose " << i.rule.label << ";\n";
  return os.str();
}

}  // namespace mediatrix
