// mediatrix: run a mediation scenario, check it, or certify it against the
// brute-force enumerator.

#include "mediatrix/mediatrix.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace mediatrix;

struct RunConfig {
  std::string mode;
  std::string path;
  std::string format = "text";
  std::string out;
  std::optional<int> max_rounds;
  std::optional<int> stall;
  std::string verbosity = "normal";
};

int emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) {
    std::cerr << "mediatrix: cannot write " << cfg.out << "\n";
    return 1;
  }
  f << text;
  return 0;
}

Verbosity verbosity_of(const std::string& v) {
  if (v == "quiet") return Verbosity::Quiet;
  if (v == "trace") return Verbosity::Trace;
  return Verbosity::Normal;
}

int run(const RunConfig& cfg, const Scenario& sc) {
  const Outcome out = mediate(sc.agent_state(0), sc.agent_state(1), sc.mediator_state(), sc.config, sc.name);
  const Format f = cfg.format == "json" ? Format::Json : Format::Text;
  if (int rc = emit(cfg, serialize_transcript(out.transcript, f, verbosity_of(cfg.verbosity)))) return rc;
  return out.status == Status::Success ? 0 : 2;
}

int check(const RunConfig& cfg, const Scenario& sc) {
  std::string text = "scenario " + sc.name + " is valid\n";
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    const AgentState a = sc.agent_state(i);
    const FactBase facts = forward_chain(compile(reasoning_theory(a), plan_context(a)), ChainOptions{false});
    for (const auto& g : a.goals()) {
      const bool reached = facts.contains(g.head);
      text += a.id + ": " + to_string(g.head) + (reached ? " reachable" : " unreachable") + " from own theory\n";
      if (reached) continue;
      for (const auto& p : plan(a, g.head)) {
        text += "  via " + p.rule.label + " missing";
        for (const auto& u : p.unmet) text += " " + to_string(u);
        text += "\n";
      }
    }
  }
  return emit(cfg, text);
}

int oracle(const RunConfig& cfg, const Scenario& sc) {
  const auto [gamma, m] = disclosed_theory(sc);
  const OracleReport rep = compare_with_oracle(gamma, {sc.agents[0].id, sc.agents[1].id}, m, 6, sc.config.proof_depth);
  auto transfers = [](const std::vector<Transfer>& ts) {
    std::string s;
    for (const auto& t : ts) s += " " + to_string(t);
    return s.empty() ? std::string(" none") : s;
  };
  std::string text;
  if (cfg.format == "json") {
    nlohmann::json j{{"scenario_name", sc.name},
                     {"solver_found", rep.solver_found},
                     {"oracle_found", rep.oracle_found},
                     {"solver_admissible", rep.solver_admissible},
                     {"diffs", rep.agree() ? 0 : 1},
                     {"assignments", rep.oracle.assignments}};
    text = j.dump(2) + "\n";
  } else {
    text += "create_solution: " + std::string(rep.solver_found ? "solution" : "none");
    if (rep.solution) text += transfers(rep.solution->transfers);
    text += "\nenumerator: " + std::string(rep.oracle_found ? "solution" : "none");
    if (rep.oracle_found) text += transfers(rep.oracle.transfers);
    text += "\nplan assignments examined: " + std::to_string(rep.oracle.assignments) + "\n";
    text += rep.agree() ? "0 diffs\n" : "1 diff\n";
  }
  if (int rc = emit(cfg, text)) return rc;
  return rep.agree() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Argumentation-based mediation between two agents"};
  app.require_subcommand(1);
  RunConfig cfg;

  for (const char* mode : {"run", "check", "oracle"}) {
    const char* help = std::string(mode) == "run"     ? "Run the mediation and print the transcript"
                       : std::string(mode) == "check" ? "Validate the scenario and diagnose each agent's goals"
                                                      : "Compare the solution search with brute-force enumeration";
    auto* sub = app.add_subcommand(mode, help);
    sub->add_option("file", cfg.path, "Scenario file (.med)")->required();
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", cfg.out, "Write output to PATH instead of stdout");
    sub->add_option("--max-rounds", cfg.max_rounds, "Round limit")->check(CLI::PositiveNumber);
    sub->add_option("--stall", cfg.stall, "Rounds without new knowledge before failing")->check(CLI::PositiveNumber);
    sub->add_option("--verbosity", cfg.verbosity, "Transcript detail")
        ->check(CLI::IsMember({"quiet", "normal", "trace"}));
    sub->callback([&cfg, mode] { cfg.mode = mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  Scenario sc;
  try {
    std::ifstream in(cfg.path, std::ios::binary);
    if (!in) {
      std::cerr << "mediatrix: cannot read scenario " << cfg.path << "\n";
      return 1;
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    sc = parse_scenario(text);
  } catch (const ParseError& e) {
    std::cerr << cfg.path << ":" << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << cfg.path << ": " << e.what() << "\n";
    return 1;
  }
  for (const auto& w : sc.warnings) std::cerr << cfg.path << ": warning: " << w << "\n";

  if (cfg.max_rounds) sc.config.max_rounds = *cfg.max_rounds;
  if (cfg.stall) sc.config.stall_threshold = *cfg.stall;
  if (const char* env = std::getenv("MEDIATRIX_PROOF_DEPTH")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) {
      std::cerr << "mediatrix: MEDIATRIX_PROOF_DEPTH must be a positive integer\n";
      return 1;
    }
    sc.config.proof_depth = static_cast<std::size_t>(v);
  }

  try {
    if (cfg.mode == "run") return run(cfg, sc);
    if (cfg.mode == "check") return check(cfg, sc);
    return oracle(cfg, sc);
  } catch (const std::exception& e) {
    std::cerr << "mediatrix: " << e.what() << "\n";
    return 1;
  }
}
