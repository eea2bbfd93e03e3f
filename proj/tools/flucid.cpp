#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "flucid/claims.hpp"
#include "flucid/encoders.hpp"
#include "flucid/era.hpp"
#include "flucid/evaluator.hpp"
#include "flucid/parser.hpp"
#include "flucid/semantics.hpp"

using namespace flucid;

namespace {

enum Exit { ok = 0, usage = 1, syntax = 2, semantic = 3, evaluation = 4, inconsistent = 5 };

struct Failure {
  int code;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error\tF001\t0:0+0@0\tcannot read " << path << "\n";
    throw Failure{usage};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NodePtr parse_file(const std::string& path) {
  try {
    return parse_program(slurp(path));
  } catch (const SyntaxError& e) {
    std::cerr << path << ":\t" << format_diagnostic(e.diagnostic) << "\n";
    throw Failure{syntax};
  }
}

void check_file(const std::string& path, const Node& prog, bool fragment) {
  auto a = analyze(prog, AnalyzeOptions{fragment});
  for (const auto& d : a.diagnostics) std::cerr << path << ":\t" << format_diagnostic(d) << "\n";
  if (!a.ok()) throw Failure{semantic};
}

[[noreturn]] void eval_failure(const std::string& path, const EvalError& e) {
  Diagnostic d{Diagnostic::Severity::error, "E001", e.what(), e.span};
  std::cerr << path << ":\t" << format_diagnostic(d) << "\n";
  throw Failure{evaluation};
}

Value parse_tag(const std::string& raw) {
  if (raw == "true" || raw == "false") return Value(raw == "true");
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') return Value(raw.substr(1, raw.size() - 2));
  try {
    std::size_t used = 0;
    long long i = std::stoll(raw, &used);
    if (used == raw.size()) return Value(static_cast<std::int64_t>(i));
    double d = std::stod(raw, &used);
    if (used == raw.size()) return Value(d);
  } catch (const std::exception&) {
  }
  return Value(raw);
}

SimpleContext parse_context(const std::string& spec) {
  std::vector<std::pair<std::string, Value>> pairs;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0) {
      std::cerr << "error: --context expects K:V pairs, got \"" << item << "\"\n";
      throw Failure{usage};
    }
    pairs.emplace_back(item.substr(0, colon), parse_tag(item.substr(colon + 1)));
  }
  try {
    return SimpleContext(std::move(pairs));
  } catch (const ValueError& e) {
    std::cerr << "error: " << e.what() << "\n";
    throw Failure{usage};
  }
}

std::string show(const Value& v) { return v.is_text() ? quote(v.as_text()) : to_source(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forensic Lucid toolchain"};
  app.require_subcommand(1);

  std::string file, fsm_file, es_file, context_spec, schema_arg, seq_name, in_file, case_name, out_dir, zone;
  double threshold = 0.5;
  std::int64_t horizon = 0;
  int jobs = 1, year = 0;
  std::size_t max_backtraces = 64;
  bool trace = false, expect_consistent = false, fragment = false, print = false;

  auto* parse = app.add_subcommand("parse", "check syntax");
  parse->add_option("file", file, "source file")->required();
  parse->add_flag("--print", print, "pretty-print the tree");

  auto* check = app.add_subcommand("check", "run semantic analysis");
  check->add_option("file", file, "source file")->required();
  check->add_flag("--fragment", fragment, "undefined identifiers are warnings");

  auto* run = app.add_subcommand("run", "evaluate a program");
  run->add_option("file", file, "source file")->required();
  run->add_option("--context", context_spec, "initial context, K:V,...");
  run->add_option("--threshold", threshold, "credibility threshold")->check(CLI::Range(0.0, 1.0));
  run->add_option("--horizon", horizon, "horizon for unbounded observations")->check(CLI::PositiveNumber);
  run->add_flag("--trace", trace, "print demands as they are resolved");
  run->add_option("--jobs", jobs, "parallel evaluation")->check(CLI::PositiveNumber);
  run->add_flag("--expect-consistent", expect_consistent, "exit 5 when a claim is inconsistent");
  run->add_flag("--fragment", fragment, "undefined identifiers are warnings");

  auto* era_cmd = app.add_subcommand("era", "reconstruct events from a state machine and evidence");
  era_cmd->add_option("fsm", fsm_file, "state machine file")->required();
  era_cmd->add_option("es", es_file, "evidence program")->required();
  era_cmd->add_option("--horizon", horizon, "horizon for unbounded observations")->check(CLI::PositiveNumber);
  era_cmd->add_option("--threshold", threshold, "credibility threshold")->check(CLI::Range(0.0, 1.0));
  era_cmd->add_option("--max-backtraces", max_backtraces, "backtraces to print");
  era_cmd->add_option("--jobs", jobs, "parallel evaluation")->check(CLI::PositiveNumber);

  auto* encode = app.add_subcommand("encode", "encode log evidence");
  encode->add_option("--schema", schema_arg, "schema file or preset name")->required();
  encode->add_option("--name", seq_name, "observation name prefix")->required();
  encode->add_option("--in", in_file, "input log (default stdin)");
  encode->add_option("--case", case_name, "case name; writes <case>.<source>.ctx and a checksum");
  encode->add_option("--out", out_dir, "output directory for --case");
  encode->add_option("--year", year, "year for syslog timestamps");
  encode->add_option("--zone", zone, "zone for zoneless timestamps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return usage;
  }

  try {
    if (*parse) {
      auto prog = parse_file(file);
      if (print) std::cout << pretty_print(*prog);
      else std::cout << file << ": ok\n";
      return ok;
    }
    if (*check) {
      auto prog = parse_file(file);
      check_file(file, *prog, fragment);
      std::cout << file << ": ok\n";
      return ok;
    }
    if (*run) {
      auto prog = parse_file(file);
      check_file(file, *prog, fragment);
      EvalOptions opt;
      opt.threshold = threshold;
      if (horizon > 0) opt.horizon = horizon;
      opt.jobs = jobs;
      if (trace) opt.trace = &std::cout;
      opt.base_dir = std::filesystem::path(file).parent_path().string();
      SimpleContext ctx = context_spec.empty() ? SimpleContext{} : parse_context(context_spec);
      Value result;
      std::vector<ClaimReport> claims;
      try {
        Evaluator ev(prog, opt);
        result = ev.run(ctx);
        claims = ev.claims();
      } catch (const EvalError& e) {
        eval_failure(file, e);
      }
      std::cout << show(result) << "\n";
      bool all_consistent = true;
      for (const auto& c : claims) {
        all_consistent = all_consistent && c.consistent;
        std::cout << "claim " << c.function << ": ";
        if (!c.consistent) {
          std::cout << "inconsistent\n";
          continue;
        }
        std::cout << "consistent: " << c.total << " backtraces" << (c.truncated ? " (horizon " : "")
                  << (c.truncated ? std::to_string(c.horizon) + ")" : "") << "\n";
        for (const auto& b : c.backtraces) std::cout << "  " << b << "\n";
      }
      if (expect_consistent && !all_consistent) return inconsistent;
      return ok;
    }
    if (*era_cmd) {
      era::FsmFile fsm;
      try {
        fsm = era::parse_fsm(slurp(fsm_file));
      } catch (const era::EraError& e) {
        std::cerr << fsm_file << ":\terror\tF002\t0:0+0@0\t" << e.what() << "\n";
        return syntax;
      }
      auto prog = parse_file(es_file);
      check_file(es_file, *prog, true);
      EvalOptions opt;
      opt.threshold = threshold;
      opt.base_dir = std::filesystem::path(es_file).parent_path().string();
      EvidentialStatement es;
      try {
        Evaluator ev(prog, opt);
        es = lift_statement(ev.run());
      } catch (const EvalError& e) {
        eval_failure(es_file, e);
      } catch (const ValueError& e) {
        std::cerr << es_file << ":\terror\tE002\t0:0+0@0\t" << e.what() << "\n";
        return evaluation;
      }
      era::ClaimResult r;
      try {
        auto specs = claims::specs_of(fsm.machine, es, threshold, fsm.properties);
        era::ClaimOptions co;
        if (horizon > 0) co.horizon = horizon;
        co.max_backtraces = max_backtraces;
        co.jobs = jobs;
        r = era::check_claim(fsm.machine, specs, co);
      } catch (const std::exception& e) {
        std::cerr << es_file << ":\terror\tE003\t0:0+0@0\t" << e.what() << "\n";
        return evaluation;
      }
      if (!r.consistent) {
        std::cout << "inconsistent\n";
        return ok;
      }
      std::cout << "consistent: " << r.backtrace_total << " backtraces\n";
      for (const auto& c : r.backtraces) std::cout << "  " << era::format_backtrace(fsm.machine, c) << "\n";
      if (r.backtraces_truncated) std::cout << "  ...\n";
      return ok;
    }
    if (*encode) {
      encoders::Schema schema;
      try {
        if (std::filesystem::exists(schema_arg)) schema = encoders::parse_schema(slurp(schema_arg));
        else schema = encoders::preset(schema_arg);
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
      }
      std::string input;
      if (in_file.empty()) {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        input = ss.str();
      } else {
        input = slurp(in_file);
      }
      encoders::EncodeOptions eo;
      if (year) eo.reference_year = year;
      if (!zone.empty()) eo.zone = zone;
      auto res = encoders::encode_log(encoders::extract(schema, input), schema, seq_name, eo);
      for (const auto& w : res.warnings) std::cerr << "warning\tW001\t0:0+0@0\t" << w << "\n";
      // emitted text must itself be a valid program
      try {
        auto prog = parse_program(res.text);
        auto a = analyze(*prog, AnalyzeOptions{true});
        if (!a.ok()) {
          for (const auto& d : a.diagnostics) std::cerr << format_diagnostic(d) << "\n";
          return semantic;
        }
      } catch (const SyntaxError& e) {
        std::cerr << format_diagnostic(e.diagnostic) << "\n";
        return syntax;
      }
      if (case_name.empty()) {
        std::cout << res.text;
        return ok;
      }
      auto dir = std::filesystem::path(out_dir.empty() ? "." : out_dir);
      auto name = encoders::output_name(case_name, schema.source);
      std::ofstream(dir / name, std::ios::binary) << res.text;
      std::ofstream(dir / (name + ".sha256"), std::ios::binary)
          << encoders::sha256_hex(res.text) << "  " << name << "\n";
      std::cout << (dir / name).string() << "\n";
      return ok;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return usage;
}
