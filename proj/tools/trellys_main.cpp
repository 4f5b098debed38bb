#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "trellys/eval.hpp"
#include "trellys/meta.hpp"
#include "trellys/parallel.hpp"
#include "trellys/prelude.hpp"
#include "trellys/surface.hpp"
#include "trellys/typecheck.hpp"

using nlohmann::json;
using namespace trellys;

namespace {

// Exit codes: 0 ok, 1 type/parse error, 2 runtime abort, 3 out of fuel,
// 4 internal invariant violation, 5 usage error.
constexpr int kOk = 0;
constexpr int kCheckError = 1;
constexpr int kAbort = 2;
constexpr int kOutOfFuel = 3;
constexpr int kInvariant = 4;
constexpr int kUsage = 5;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Signature base_signature(bool no_prelude) {
  if (no_prelude) return Signature{};
  return prelude();
}

CheckedProgram check_file(const std::string& path, bool no_prelude) {
  Signature base = base_signature(no_prelude);
  Registry reg = registry_of(base);
  SourceProgram prog = parse_program(read_file(path), reg);
  return check_program(prog, base);
}

json deriv_json(const DerivPtr& d) {
  json ctx = json::array();
  for (auto& [n, t] : d->ctx) ctx.push_back({{"name", n}, {"type", pretty(t)}});
  json children = json::array();
  for (auto& c : d->children) children.push_back(deriv_json(c));
  return {{"rule", d->rule},
          {"conclusion",
           {{"context", ctx},
            {"subject", pretty(d->subject)},
            {"type", pretty(d->type)}}},
          {"children", children}};
}

std::uint64_t fuel_from_env(std::uint64_t fallback) {
  if (const char* env = std::getenv("TRELLYS_FUEL")) {
    try {
      return std::stoull(env);
    } catch (...) {
      std::cerr << "warning: ignoring invalid TRELLYS_FUEL\n";
    }
  }
  return fallback;
}

int report_outcome(const RunResult& r) {
  switch (r.outcome) {
    case Outcome::Value:
      std::cout << pretty(r.final) << "\n";
      return kOk;
    case Outcome::Abort:
      std::cout << "abort\n";
      return kAbort;
    case Outcome::OutOfFuel:
      std::cerr << "out of fuel after " << r.steps << " steps\n";
      return kOutOfFuel;
    case Outcome::Stuck:
      std::cerr << "internal invariant violation: checked program got stuck: "
                << r.stuck_reason << "\n";
      return kInvariant;
  }
  return kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trellys: a dependently typed core language with nontermination "
               "and erasure"};
  app.require_subcommand(1);

  bool no_prelude = false;
  app.add_flag("--no-prelude", no_prelude, "do not load the prelude");

  // check
  auto* cmd_check = app.add_subcommand("check", "typecheck a .tre file");
  std::string check_file_arg, emit_derivation;
  cmd_check->add_option("file", check_file_arg, "input file")->required();
  cmd_check->add_option("--emit-derivation", emit_derivation,
                        "write the typing derivations as JSON");

  // erase
  auto* cmd_erase =
      app.add_subcommand("erase", "print the erasure of a checked definition");
  std::string erase_file_arg, erase_def;
  cmd_erase->add_option("file", erase_file_arg, "input file")->required();
  cmd_erase->add_option("--def", erase_def, "definition name")->required();

  // run / trace
  auto* cmd_run = app.add_subcommand("run", "evaluate a checked definition");
  std::string run_file_arg, run_def;
  std::uint64_t run_fuel = 0;
  bool run_trace = false;
  cmd_run->add_option("file", run_file_arg, "input file")->required();
  cmd_run->add_option("--def", run_def, "definition name")->required();
  cmd_run->add_option("--fuel", run_fuel, "step budget");
  cmd_run->add_flag("--trace", run_trace, "print each step");

  auto* cmd_trace =
      app.add_subcommand("trace", "evaluate, printing one line per step");
  std::string trace_file_arg, trace_def;
  std::uint64_t trace_fuel = 0;
  cmd_trace->add_option("file", trace_file_arg, "input file")->required();
  cmd_trace->add_option("--def", trace_def, "definition name")->required();
  cmd_trace->add_option("--fuel", trace_fuel, "step budget");

  // join
  auto* cmd_join =
      app.add_subcommand("join", "joinability debugging in the prelude scope");
  bool join_parallel = false;
  std::int64_t join_i = kDefaultJoinSteps, join_j = kDefaultJoinSteps;
  int join_depth = 3;
  std::vector<std::string> join_terms;
  cmd_join->add_flag("--parallel", join_parallel,
                     "use bounded parallel reduction");
  cmd_join->add_option("--cbv", join_terms,
                       "I J A B: cbv join with step bounds")
      ->expected(4);
  cmd_join->add_option("--depth", join_depth, "parallel reduction depth");
  cmd_join->add_option("terms", join_terms, "expressions A B (parallel mode)");

  // fuzz
  auto* cmd_fuzz = app.add_subcommand("fuzz", "run a property suite");
  std::string fuzz_suite, fuzz_report = "text";
  int fuzz_cases = 100;
  std::uint64_t fuzz_seed = 0;
  cmd_fuzz->add_option("--suite", fuzz_suite, "suite name")->required();
  cmd_fuzz->add_option("--cases", fuzz_cases, "number of cases");
  cmd_fuzz->add_option("--seed", fuzz_seed, "random seed");
  cmd_fuzz->add_option("--report", fuzz_report, "text or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*cmd_check) {
      CheckedProgram out = check_file(check_file_arg, no_prelude);
      for (auto& def : out.defs)
        std::cout << def.name << " : " << pretty(def.type) << "\n";
      if (!emit_derivation.empty()) {
        json j = json::array();
        for (auto& def : out.defs)
          j.push_back({{"name", def.name}, {"derivation", deriv_json(def.deriv)}});
        std::ofstream of(emit_derivation);
        of << j.dump(2) << "\n";
      }
      return kOk;
    }
    if (*cmd_erase) {
      CheckedProgram out = check_file(erase_file_arg, no_prelude);
      if (!out.sig.def(erase_def)) {
        std::cerr << "no definition named " << erase_def << "\n";
        return kUsage;
      }
      std::cout << pretty(erase(out.sig.def(erase_def)->body)) << "\n";
      return kOk;
    }
    if (*cmd_run || *cmd_trace) {
      const std::string& file = *cmd_run ? run_file_arg : trace_file_arg;
      const std::string& defname = *cmd_run ? run_def : trace_def;
      std::uint64_t fuel = *cmd_run ? run_fuel : trace_fuel;
      bool tracing = *cmd_trace || run_trace;
      if (fuel == 0) fuel = fuel_from_env(kDefaultFuel);
      CheckedProgram out = check_file(file, no_prelude);
      if (!out.sig.def(defname)) {
        std::cerr << "no definition named " << defname << "\n";
        return kUsage;
      }
      UPtr body = runnable_body(out.sig, defname);
      if (tracing) {
        RunResult r;
        auto states = trace(body, fuel, r);
        for (size_t i = 0; i < states.size(); ++i)
          std::cout << i << ": " << pretty(states[i]) << "\n";
        return report_outcome(r);
      }
      return report_outcome(run(body, fuel));
    }
    if (*cmd_join) {
      Signature base = base_signature(no_prelude);
      Registry reg = registry_of(base);
      Checker ck(base);
      if (join_parallel) {
        if (join_terms.size() != 2) {
          std::cerr << "join --parallel needs two expressions\n";
          return kUsage;
        }
        UPtr a = ck.unfold(erase(parse_expr(join_terms[0], reg)));
        UPtr b = ck.unfold(erase(parse_expr(join_terms[1], reg)));
        bool r = joinable(a, b, join_depth);
        std::cout << (r ? "joinable" : "not joinable") << "\n";
        return kOk;
      }
      if (join_terms.size() != 4) {
        std::cerr << "join --cbv needs I J A B\n";
        return kUsage;
      }
      join_i = std::stoll(join_terms[0]);
      join_j = std::stoll(join_terms[1]);
      UPtr a = ck.unfold(erase(parse_expr(join_terms[2], reg)));
      UPtr b = ck.unfold(erase(parse_expr(join_terms[3], reg)));
      bool r = cbv_join(a, b, join_i, join_j);
      std::cout << (r ? "joinable" : "not joinable") << "\n";
      return kOk;
    }
    if (*cmd_fuzz) {
      SuiteReport rep =
          run_suite(base_signature(no_prelude), fuzz_suite, fuzz_cases,
                    fuzz_seed);
      if (fuzz_report == "json") {
        json j = {{"suite", rep.suite},     {"cases", rep.cases},
                  {"passed", rep.passed},   {"failed", rep.failed},
                  {"skipped", rep.skipped}, {"seconds", rep.seconds},
                  {"counterexamples", rep.counterexamples}};
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << rep.suite << ": " << rep.passed << "/" << rep.cases
                  << " passed, " << rep.failed << " failed, " << rep.skipped
                  << " skipped (" << rep.seconds << "s)\n";
        for (auto& c : rep.counterexamples)
          std::cout << "  counterexample: " << c << "\n";
      }
      return rep.ok() ? kOk : kInvariant;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kCheckError;
  } catch (const TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return kCheckError;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
