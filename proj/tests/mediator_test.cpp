#include "support.hpp"

#include <gtest/gtest.h>

#include <chrono>

using namespace mediatrix;
using namespace testing_support;

namespace {

std::set<std::string> transfer_set(const std::vector<Transfer>& ts) {
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(to_string(t));
  return out;
}

bool facts_consistent(const Theory& t) {
  for (const auto& a : t.items)
    for (const auto& b : t.items)
      if (a.is_fact() && b.is_fact() && complementary(a.head, b.head)) return false;
  return true;
}

Theory random_facts(TheoryGen& gen, int n) {
  Theory t;
  for (int i = 0; i < n; ++i) {
    Rule r = Rule::fact("F" + std::to_string(gen.pick(1000)), gen.ground_literal(true));
    if (t.find(r.label)) continue;
    t.add(r);
  }
  return t;
}

// Incoming facts without a complementary pair among themselves.
Theory coherent(Theory t) {
  Theory out;
  for (const auto& r : t.items) {
    bool clash = std::any_of(out.items.begin(), out.items.end(),
                             [&](const Rule& o) { return complementary(o.head, r.head); });
    if (!clash) out.add(r);
  }
  return out;
}

std::vector<Scenario> generated(unsigned seed, int n) {
  ScenarioGen gen(seed);
  std::vector<Scenario> out;
  for (int i = 0; i < n; ++i) out.push_back(parse_scenario(gen.text(static_cast<unsigned>(i))));
  return out;
}

}  // namespace

// --- revision ----------------------------------------------------------------

TEST(Revise, NewestFactWins) {
  Theory gamma;
  gamma.add(Rule::fact("M.1", lit("have(alpha, x)")));
  Theory in;
  in.add(Rule::fact("N.1", lit("~have(alpha, x)")));
  Revision r = revise_with_delta(gamma, in);
  EXPECT_EQ(r.removed.size(), 1u);
  EXPECT_EQ(r.added.size(), 1u);
  EXPECT_FALSE(r.result.find("M.1"));
  EXPECT_TRUE(r.result.find("N.1"));
}

TEST(Revise, IncoherentInputIsRejected) {
  Theory in;
  in.add(Rule::fact("N.1", lit("p(a)")));
  in.add(Rule::fact("N.2", lit("~p(a)")));
  EXPECT_THROW(revise({}, in), IncoherentInput);
}

TEST(Revise, PrinciplesAreMerged) {
  Theory in;
  in.add_principle(Principle::Reduction, "G.2");
  Theory out = revise({}, in);
  EXPECT_EQ(out.principle_label(Principle::Reduction), "G.2");
}

TEST(ReviseProperty, IdentityIdempotenceConsistency) {
  TheoryGen gen(31);
  for (int iter = 0; iter < 200; ++iter) {
    Theory gamma = coherent(random_facts(gen, 2 + gen.pick(6)));
    for (const auto& r : gen.theory(false).items)
      if (!r.is_fact()) gamma.add(r);
    Theory delta = coherent(random_facts(gen, 1 + gen.pick(5)));

    EXPECT_EQ(revise(gamma, Theory{}), gamma) << "iteration " << iter;
    const Theory once = revise(gamma, delta);
    EXPECT_EQ(revise(once, delta), once) << "iteration " << iter;
    EXPECT_TRUE(facts_consistent(once)) << "iteration " << iter;
    for (const auto& r : delta.items) EXPECT_TRUE(once.find_content(r)) << to_string(r.head);
  }
}

TEST(Relabel, IncomingItemsGetMediatorLabels) {
  MediatorState m;
  m.theory.add(Rule::fact("M.1", lit("have(mu, screwdriver)")));
  m.theory.add(rule("M.2", "can(X, hang_mirror) :- have(X, screw), have(X, screwdriver), have(X, mirror)"));
  Theory in;
  in.add(rule("A.6", "can(X, hang_picture) :- have(X, hammer), have(X, nail), have(X, picture)"));
  in.add(Rule::fact("A.3", lit("have(alpha, screw)")));
  in.add(rule("B.9", "can(Y, hang_mirror) :- have(Y, screw), have(Y, screwdriver), have(Y, mirror)"));
  Theory out = relabel(m, m.theory, in);
  ASSERT_EQ(out.items.size(), 2u);
  EXPECT_EQ(out.items[0].label, "M.3");
  EXPECT_EQ(out.items[0].head, lit("have(alpha, screw)"));
  EXPECT_EQ(out.items[1].label, "M.4");
  EXPECT_EQ(m.origin.at("M.4"), "A.6");
}

TEST(MediatorState, GeneralAndCaseTheoriesSplit) {
  MediatorState m = load_scenario(scenario_path("home_improvement.med")).mediator_state();
  for (const auto& r : m.general_theory().items) EXPECT_FALSE(variables(r).empty());
  for (const auto& r : m.case_theory().items) EXPECT_TRUE(variables(r).empty());
  EXPECT_EQ(m.general_theory().items.size() + m.case_theory().items.size(), m.theory.items.size());
}

// --- solutions ---------------------------------------------------------------

TEST(CreateSolution, CaseStudyTransfers) {
  auto [gamma, m] = disclosed_theory(load_scenario(scenario_path("home_improvement.med")));
  auto s = create_solution(gamma, {"alpha", "beta"}, m);
  ASSERT_TRUE(s);
  EXPECT_EQ(transfer_set(s->transfers), (std::set<std::string>{"give(alpha, beta, screw)", "give(mu, beta, screwdriver)",
                                                               "give(beta, alpha, nail)"}));
  ASSERT_EQ(s->plans.size(), 2u);
  EXPECT_EQ(m.origin.at(s->plans[0].plan.rule.label), "A.6");
  EXPECT_TRUE(s->context.excluded.count("M.3"));
  Ownership start{{"alpha", {"hammer", "picture", "screw"}}, {"beta", {"mirror", "nail"}}, {"mu", {"screwdriver"}}};
  EXPECT_TRUE(check_solution(*s, start));
  Ownership without_screwdriver = start;
  without_screwdriver["mu"].clear();
  EXPECT_FALSE(check_solution(*s, without_screwdriver));
}

TEST(CreateSolution, NoneWithoutMediatorKnowledge) {
  auto [gamma, m] = disclosed_theory(load_scenario(scenario_path("home_improvement_no_m2.med")));
  EXPECT_FALSE(create_solution(gamma, {"alpha", "beta"}, m));
}

TEST(CreateSolution, SelfSufficientNeedsNoTransfers) {
  auto [gamma, m] = disclosed_theory(load_scenario(scenario_path("self_sufficient.med")));
  auto s = create_solution(gamma, {"alpha", "beta"}, m);
  ASSERT_TRUE(s);
  EXPECT_TRUE(s->transfers.empty());
  EXPECT_EQ(s->plans.size(), 2u);
}

TEST(CreateSolution, ExclusionForcesAnotherDonor) {
  auto [gamma, m] = disclosed_theory(load_scenario(scenario_path("negotiate_two_donors.med")));
  auto first = create_solution(gamma, {"alpha", "beta"}, m);
  ASSERT_TRUE(first);
  EXPECT_TRUE(transfer_set(first->transfers).count("give(beta, alpha, key)"));
  auto second = create_solution(gamma, {"alpha", "beta"}, m, {{"beta", "alpha", "key"}});
  ASSERT_TRUE(second);
  EXPECT_TRUE(transfer_set(second->transfers).count("give(mu, alpha, key2)"));
  EXPECT_FALSE(transfer_set(second->transfers).count("give(beta, alpha, key)"));
}

// --- proposals and negotiation -----------------------------------------------

TEST(Propose, CaseStudyAcceptedByBoth) {
  Scenario sc = load_scenario(scenario_path("home_improvement.med"));
  auto [gamma, m] = disclosed_theory(sc);
  auto s = create_solution(gamma, {"alpha", "beta"}, m);
  ASSERT_TRUE(s);
  ProposalResult pa = propose(m, gamma, sc.agent_state(0), *s);
  ProposalResult pb = propose(m, gamma, sc.agent_state(1), *s);
  EXPECT_TRUE(pa.accepted);
  EXPECT_TRUE(pb.accepted);
  EXPECT_EQ(pa.messages.back().kind, Message::Kind::Accept);
  EXPECT_THROW(negotiate(m, gamma, sc.agent_state(0), sc.agent_state(1), *s, pa, pb), std::invalid_argument);
}

TEST(Negotiate, SecondDonorRepairs) {
  Scenario sc = load_scenario(scenario_path("negotiate_two_donors.med"));
  auto [gamma, m] = disclosed_theory(sc);
  AgentState a = sc.agent_state(0), b = sc.agent_state(1);
  auto s = create_solution(gamma, {"alpha", "beta"}, m);
  ASSERT_TRUE(s);
  ProposalResult pa = propose(m, gamma, a, *s);
  ProposalResult pb = propose(m, gamma, b, *s);
  EXPECT_TRUE(pa.accepted);
  ASSERT_FALSE(pb.accepted);
  NegotiationResult n = negotiate(m, gamma, a, b, *s, pa, pb);
  EXPECT_EQ(n.rejecting, "beta");
  ASSERT_EQ(n.excluded.size(), 1u);
  EXPECT_EQ(to_string(n.excluded[0]), "give(beta, alpha, key)");
  ASSERT_TRUE(n.solution);
  EXPECT_TRUE(transfer_set(n.solution->transfers).count("give(mu, alpha, key2)"));
  ASSERT_EQ(n.proposals.size(), 2u);
  EXPECT_TRUE(n.proposals[0].accepted && n.proposals[1].accepted);
}

TEST(Negotiate, SingleDonorFailsWithBothExplanations) {
  Scenario sc = load_scenario(scenario_path("negotiate_single_donor.med"));
  auto [gamma, m] = disclosed_theory(sc);
  AgentState a = sc.agent_state(0), b = sc.agent_state(1);
  auto s = create_solution(gamma, {"alpha", "beta"}, m);
  ASSERT_TRUE(s);
  ProposalResult pa = propose(m, gamma, a, *s);
  ProposalResult pb = propose(m, gamma, b, *s);
  NegotiationResult n = negotiate(m, gamma, a, b, *s, pa, pb);
  EXPECT_FALSE(n.solution);
  ASSERT_EQ(n.explanations.size(), 2u);
  EXPECT_FALSE(n.explanations.at("alpha").items.empty());
  EXPECT_FALSE(n.explanations.at("beta").items.empty());
}

// --- the mediation loop ------------------------------------------------------

TEST(Mediate, CaseStudySucceedsInTwoRounds) {
  Outcome out = run_fixture("home_improvement.med");
  EXPECT_EQ(out.status, Status::Success);
  EXPECT_EQ(out.rounds, 2);
  EXPECT_EQ(out.final_ownership.at("alpha"), (std::set<std::string>{"hammer", "nail", "picture"}));
  EXPECT_EQ(out.final_ownership.at("beta"), (std::set<std::string>{"mirror", "screw", "screwdriver"}));
  EXPECT_TRUE(out.final_ownership.at("mu").empty());
  ASSERT_EQ(out.transcript.rounds.size(), 2u);
  EXPECT_FALSE(out.transcript.rounds[0].solution);
}

namespace {

// x needs r held by the mediator; the enabling rule says x intends the give
// whenever x intends its goal.
struct AdviceSetup {
  AgentState x, y, mu;
  Solution s;

  AdviceSetup() {
    x.id = "x";
    y.id = "y";
    mu.id = "mu";
    mu.resources = {{"r", 0.5}};
    mu.unit(Unit::B).add(rule("M.1", "have(mu, r)"));
    Argument a;
    a.conclusion = lit("int(x, give(mu, x, r))");
    a.support.add(rule("M.2", "int(x, give(mu, x, r)) :- int(x, g)"));
    a.support.add(rule("M.3", "int(x, g)"));
    s.arguments.push_back(a);
    s.transfers.push_back({"mu", "x", "r"});
  }

  std::vector<Message> run(std::set<Bridge> bridges) {
    mu.bridges = std::move(bridges);
    return execute_solution({&x, &y}, mu, s);
  }
};

}  // namespace

TEST(Advice, TellCarriesEnablingRule) {
  AdviceSetup st;
  auto log = st.run({Bridge::Advice, Bridge::EnablingAdvice, Bridge::AcceptRequest});
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(log[0].kind, Message::Kind::Tell);
  EXPECT_EQ(log[1].kind, Message::Kind::Ask);
  EXPECT_EQ(log[2].kind, Message::Kind::Give);
  EXPECT_EQ(log[0].content, lit("int(x, give(mu, x, r))"));
  EXPECT_TRUE(log[0].support.find_content(rule("", "int(x, give(mu, x, r)) :- int(x, g)")));
  EXPECT_TRUE(st.x.unit(Unit::B).find_content(rule("", "int(x, give(mu, x, r)) :- int(x, g)")));
  EXPECT_TRUE(st.x.owns("r"));
}

TEST(Advice, WithoutEnablingOnlyTheIntentionIsTold) {
  AdviceSetup st;
  auto log = st.run({Bridge::Advice, Bridge::AcceptRequest});
  ASSERT_FALSE(log.empty());
  EXPECT_TRUE(log[0].support.items.empty());
  EXPECT_FALSE(st.x.unit(Unit::B).find_content(rule("", "int(x, give(mu, x, r)) :- int(x, g)")));
  EXPECT_TRUE(st.x.owns("r"));
}

TEST(Advice, WithoutAdviceNothingIsSent) {
  AdviceSetup st;
  EXPECT_TRUE(st.run({Bridge::EnablingAdvice, Bridge::AcceptRequest}).empty());
  EXPECT_FALSE(st.x.owns("r"));
  EXPECT_TRUE(st.mu.owns("r"));
}

TEST(Advice, CaseStudyNeedsBothAdviceBridges) {
  Scenario sc = load_scenario(scenario_path("home_improvement.med"));
  sc.bridges.erase(Bridge::Advice);
  Outcome silent = run_scenario(sc);
  const auto& r1 = silent.transcript.rounds.back();
  EXPECT_TRUE(r1.messages.empty());
  EXPECT_EQ(r1.note.rfind("transfer not carried out", 0), 0u);
  EXPECT_EQ(silent.final_ownership.at("alpha"), (std::set<std::string>{"hammer", "picture", "screw"}));

  sc = load_scenario(scenario_path("home_improvement.med"));
  sc.bridges.erase(Bridge::EnablingAdvice);
  Outcome bare = run_scenario(sc);
  // beta is never told the screw plan for the mirror, so it keeps its nail
  EXPECT_EQ(bare.transcript.rounds.back().note, "transfer not carried out: give(beta, alpha, nail)");
  EXPECT_EQ(bare.final_ownership.at("beta"), (std::set<std::string>{"mirror", "nail", "screw", "screwdriver"}));
}

TEST(Mediate, AblationFailsInRoundThree) {
  Outcome out = run_fixture("home_improvement_no_m2.med");
  EXPECT_EQ(out.status, Status::Failure);
  EXPECT_EQ(out.rounds, 3);
  EXPECT_EQ(out.reason, "missing new knowledge and no solution");
  for (const auto& r : out.transcript.rounds) EXPECT_FALSE(r.solution);
}

TEST(Mediate, BothRejectNeverReproposes) {
  Outcome out = run_fixture("both_reject.med");
  EXPECT_EQ(out.status, Status::Failure);
  std::set<std::vector<std::string>> proposed;
  bool both_rejected = false;
  for (const auto& r : out.transcript.rounds) {
    if (r.note == "both agents rejected") both_rejected = true;
    if (!r.solution) continue;
    auto ts = r.solution->transfers;
    std::sort(ts.begin(), ts.end());
    EXPECT_TRUE(proposed.insert(ts).second) << "round " << r.number;
  }
  EXPECT_TRUE(both_rejected);
}

TEST(Mediate, NegotiationOutcomes) {
  Outcome two = run_fixture("negotiate_two_donors.med");
  EXPECT_EQ(two.status, Status::Success);
  ASSERT_TRUE(two.solution);
  EXPECT_TRUE(transfer_set(two.solution->transfers).count("give(mu, alpha, key2)"));
  EXPECT_TRUE(two.final_ownership.at("alpha").count("key2"));

  Outcome one = run_fixture("negotiate_single_donor.med");
  EXPECT_EQ(one.status, Status::Failure);
  bool negotiated = false;
  for (const auto& r : one.transcript.rounds)
    if (r.negotiation) {
      negotiated = true;
      EXPECT_FALSE(r.negotiation->repaired);
      EXPECT_FALSE(r.negotiation->explanations.at("alpha").empty());
      EXPECT_FALSE(r.negotiation->explanations.at("beta").empty());
    }
  EXPECT_TRUE(negotiated);
}

TEST(Mediate, SelfSufficientSucceedsInRoundOne) {
  Outcome out = run_fixture("self_sufficient.med");
  EXPECT_EQ(out.status, Status::Success);
  EXPECT_EQ(out.rounds, 1);
  ASSERT_TRUE(out.solution);
  EXPECT_TRUE(out.solution->transfers.empty());
}

TEST(Mediate, RoundLimitIsReported) {
  Scenario sc = load_scenario(scenario_path("home_improvement.med"));
  sc.config.max_rounds = 1;
  Outcome out = run_scenario(sc);
  EXPECT_EQ(out.status, Status::Failure);
  EXPECT_EQ(out.reason, "round limit exceeded");
  EXPECT_EQ(out.rounds, 1);
}

TEST(Mediate, StallThresholdTwoWaitsAnotherRound) {
  Scenario sc = load_scenario(scenario_path("home_improvement_no_m2.med"));
  sc.config.stall_threshold = 2;
  EXPECT_EQ(run_scenario(sc).rounds, 4);
}

TEST(MediateProperty, TranscriptsAreDeterministic) {
  int cases = 0;
  for (const auto& sc : generated(101, 120)) {
    Outcome a = run_scenario(sc), b = run_scenario(sc);
    EXPECT_EQ(a.transcript, b.transcript) << sc.name;
    EXPECT_EQ(to_json_text(a.transcript), to_json_text(b.transcript)) << sc.name;
    ++cases;
  }
  EXPECT_GE(cases, 100);
}

TEST(MediateProperty, ResourcesAreConserved) {
  int cases = 0, moved = 0;
  for (const auto& sc : generated(202, 150)) {
    Outcome out = run_scenario(sc);
    const Ownership start = initial_ownership(sc);
    EXPECT_EQ(all_resources(out.final_ownership), all_resources(start)) << sc.name;
    EXPECT_EQ(replay_messages(start, out.transcript), out.final_ownership) << sc.name;
    if (out.status == Status::Success) {
      for (const auto& t : out.solution->transfers) EXPECT_TRUE(out.final_ownership.at(t.receiver).count(t.resource));
      moved += static_cast<int>(!out.solution->transfers.empty());
    }
    ++cases;
  }
  EXPECT_GE(cases, 100);
  EXPECT_GT(moved, 10);
}

TEST(OracleEquivalence, GeneratedScenariosAgree) {
  const auto start = std::chrono::steady_clock::now();
  int diffs = 0, feasible = 0;
  const auto scenarios = generated(303, 200);
  for (const auto& sc : scenarios) {
    auto [gamma, m] = disclosed_theory(sc);
    OracleReport rep = compare_with_oracle(gamma, {"alpha", "beta"}, m, 3);
    if (!rep.agree()) {
      ++diffs;
      ADD_FAILURE() << sc.name << " solver=" << rep.solver_found << " oracle=" << rep.oracle_found
                    << " admissible=" << rep.solver_admissible;
    }
    feasible += rep.oracle_found;
  }
  EXPECT_EQ(diffs, 0);
  EXPECT_GT(feasible, 20);
  EXPECT_LT(feasible, 200);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 60.0);
}
