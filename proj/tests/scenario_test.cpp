#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace mediatrix;
using namespace testing_support;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kMinimal =
    "scenario tiny;\n"
    "agent a;\nagent b;\nmediator m;\n"
    "resource a x = 0.5;\n"
    "@A.1 int a: can(a, g).\n"
    "@A.2 bel a: can(X, g) :- have(X, x).\n";

template <typename E>
std::string message_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const E& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Parse, CaseStudyContents) {
  Scenario sc = load_scenario(scenario_path("home_improvement.med"));
  EXPECT_EQ(sc.name, "home_improvement");
  ASSERT_EQ(sc.agents.size(), 2u);
  EXPECT_EQ(sc.agents[0].id, "alpha");
  EXPECT_EQ(sc.agents[1].id, "beta");
  EXPECT_EQ(sc.mediator.id, "mu");
  EXPECT_TRUE(sc.mediator.generous);
  EXPECT_EQ(sc.principles.size(), 7u);
  EXPECT_EQ(sc.bridges.size(), 5u);
  ASSERT_EQ(sc.agents[0].resources.size(), 3u);
  EXPECT_EQ(sc.agents[0].resources[0].name, "screw");
  EXPECT_EQ(sc.agents[0].resources[0].value, 0.0);
  EXPECT_TRUE(sc.warnings.empty());
  ASSERT_FALSE(sc.items.empty());
  EXPECT_EQ(sc.items[0].rule.label, "A.1");
  EXPECT_EQ(sc.items[0].unit, Unit::I);
  EXPECT_EQ(sc.items[0].rule.head, lit("can(alpha, hang_picture)"));
}

TEST(Parse, MinimalScenarioDefaults) {
  Scenario sc = parse_scenario(kMinimal);
  EXPECT_EQ(sc.agents[0].strategy, Strategy::Eager);
  EXPECT_FALSE(sc.mediator.generous);
  EXPECT_EQ(sc.bridges.size(), 5u);
  EXPECT_EQ(sc.config.max_rounds, 64);
  EXPECT_EQ(sc.config.stall_threshold, 1);
}

TEST(Parse, CommentsConfigAndBridges) {
  Scenario sc = parse_scenario(std::string(kMinimal) +
                               "# a comment\nconfig max_rounds = 5;\nconfig stall = 2;\nbridges R.3, R.5;\n");
  EXPECT_EQ(sc.config.max_rounds, 5);
  EXPECT_EQ(sc.config.stall_threshold, 2);
  EXPECT_EQ(sc.bridges, (std::set<Bridge>{Bridge::Trust, Bridge::AcceptRequest}));
  EXPECT_TRUE(parse_scenario(std::string(kMinimal) + "bridges none;\n").bridges.empty());
}

TEST(Parse, EmptyInputFailsAtStart) {
  try {
    parse_scenario("");
    FAIL() << "no error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 1u);
    EXPECT_EQ(e.column, 1u);
  }
}

TEST(Parse, ErrorPositionPointsAtTheToken) {
  try {
    parse_scenario("scenario s;\nagent a;\nagent ;\n");
    FAIL() << "no error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 3u);
    EXPECT_EQ(e.column, 7u);
  }
}

TEST(Validate, ThreeAgentsRejected) {
  EXPECT_NE(message_of<ValidationError>(std::string(kMinimal) + "agent c;\n").find("exactly two"), std::string::npos);
}

TEST(Validate, Rejections) {
  EXPECT_NE(message_of<ValidationError>("scenario s;\nagent a;\nagent b;\n"), "");
  EXPECT_NE(message_of<ValidationError>(std::string(kMinimal) + "@A.1 bel a: have(a, y).\n"), "");
  EXPECT_NE(message_of<ValidationError>(std::string(kMinimal) + "@C.1 bel c: have(c, y).\n"), "");
  EXPECT_NE(message_of<ValidationError>(std::string(kMinimal) + "@M.1 int m: have(m, y).\n"), "");
  EXPECT_NE(message_of<ValidationError>(std::string(kMinimal) + "@A.3 bel a: can(X, Y) :- have(X, x).\n"), "");
  EXPECT_NE(message_of<ValidationError>(std::string(kMinimal) + "resource b y = 1.5;\n"), "");
  EXPECT_NE(message_of<ValidationError>(std::string(kMinimal) + "resource b x = 0.5;\n"), "");
  EXPECT_NE(message_of<ValidationError>(std::string(kMinimal) + "config max_rounds = 0;\n"), "");
  EXPECT_NE(message_of<ValidationError>(std::string(kMinimal) + "config speed = 3;\n"), "");
  EXPECT_NE(message_of<ValidationError>(std::string(kMinimal) + "principle G.1 = ownership;\nprinciple G.9 = ownership;\n"), "");
}

TEST(Validate, UnsortedResourcesWarn) {
  Scenario sc = parse_scenario(std::string(kMinimal) + "resource b z = 0.9;\nresource b y = 0.1;\n");
  ASSERT_EQ(sc.warnings.size(), 1u);
  EXPECT_EQ(sc.agents[1].resources[0].name, "y");
}

TEST(Load, MissingFile) {
  try {
    load_scenario("/nonexistent/x.med");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "cannot read scenario /nonexistent/x.med");
  }
}

TEST(RoundTrip, FixturesSurviveSerialization) {
  for (const auto& name : fixture_names()) {
    Scenario sc = load_scenario(scenario_path(name));
    const std::string text = serialize_scenario(sc);
    Scenario back = parse_scenario(text);
    EXPECT_EQ(back, sc) << name;
    EXPECT_EQ(serialize_scenario(back), text) << name;
  }
}

TEST(RoundTrip, GeneratedScenarios) {
  ScenarioGen gen(9);
  for (unsigned i = 0; i < 150; ++i) {
    Scenario sc = parse_scenario(gen.text(i));
    EXPECT_EQ(parse_scenario(serialize_scenario(sc)), sc) << i;
  }
}

TEST(Literals, ParseAndPrintAgree) {
  for (const char* s : {"have(alpha, screw)", "~int(beta, give(alpha, beta, screw))", "des(alpha, can(alpha, g))",
                        "bel(mu, have(X, y))", "p"}) {
    EXPECT_EQ(to_string(parse_literal(s)), s);
  }
  EXPECT_THROW(parse_literal("have(alpha,"), ParseError);
  EXPECT_THROW(parse_literal("p(a) q"), ParseError);
}

// Mutated fixtures and token soup: the parser either returns a scenario that
// round-trips or throws one of its two documented errors.
TEST(ParseFuzz, OnlyDocumentedErrors) {
  std::vector<std::string> seeds;
  for (const auto& name : fixture_names()) seeds.push_back(read_file(scenario_path(name)));
  seeds.push_back(kMinimal);
  const std::vector<std::string> tokens{"scenario", "agent", "mediator", "resource", "@A.1", "bel", "int", "des",
                                        ":",        ";",     ".",        ":-",       "(",    ")",   ",",   "~",
                                        "not",      "X",     "a",        "0.5",      "=",    "\n",  "#",   "shared"};
  std::mt19937 rng(4242);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  int parsed = 0;
  for (int i = 0; i < 20000; ++i) {
    std::string text;
    if (i % 4 == 3) {
      for (std::size_t k = 0, n = pick(30); k < n; ++k) text += tokens[pick(tokens.size())] + " ";
    } else {
      text = seeds[pick(seeds.size())];
      for (std::size_t k = 0, n = 1 + pick(3); k < n && !text.empty(); ++k) {
        const std::size_t at = pick(text.size());
        switch (pick(4)) {
          case 0: text.erase(at, 1 + pick(8)); break;
          case 1: text.insert(at, tokens[pick(tokens.size())]); break;
          case 2: text[at] = static_cast<char>(pick(256)); break;
          default: text.resize(at); break;
        }
      }
    }
    try {
      Scenario sc = parse_scenario(text);
      EXPECT_EQ(parse_scenario(serialize_scenario(sc)), sc) << text;
      ++parsed;
    } catch (const ParseError&) {
    } catch (const ValidationError&) {
    }
  }
  EXPECT_GT(parsed, 0);
}
