#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "emuc/analyzer.hpp"
#include "emuc/codegen.hpp"
#include "emuc/difftest.hpp"
#include "emuc/lint.hpp"
#include "emuc/parser.hpp"
#include "emuc/server.hpp"
#include "emuc/trace.hpp"
#include "httplib.h"

namespace emuc {
namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void print_diagnostics(const std::vector<Diagnostic>& diags, const std::string& file, std::ostream& err) {
  for (const auto& d : diags) err << render(d, file) << "\n";
}

// Loads and checks a model, printing diagnostics. Empty on errors.
std::optional<Diagram> load(const std::string& path, std::ostream& err) {
  auto r = load_model(read_file(path));
  print_diagnostics(r.diagnostics, path, err);
  return r.value;
}

std::vector<std::string> read_events(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(line.substr(b));
  }
  return out;
}

int cmd_parse(const std::string& model, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(model);
  auto r = parse_diagram(text);
  print_diagnostics(r.diagnostics, model, err);
  if (!r.ok()) return 1;
  out << print_diagram(*r.value);
  return 0;
}

int cmd_check(const std::string& model, std::size_t samples, std::uint64_t seed, std::ostream& err) {
  auto d = load(model, err);
  if (!d) return 1;
  print_diagnostics(check_guard_exclusivity(*d, samples, seed), model, err);
  err << model << ": ok (" << d->nodes.size() << " nodes, " << d->variables.size() << " variables, "
      << d->arcs.size() << " arcs, " << trigger_set(*d).size() << " triggers)\n";
  return 0;
}

int cmd_simulate(const std::string& model, const std::string& events_path, std::istream& in, std::ostream& out,
                 std::ostream& err) {
  auto d = load(model, err);
  if (!d) return 1;
  std::vector<std::string> events;
  if (events_path == "-") {
    events = read_events(in);
  } else if (!events_path.empty()) {
    std::ifstream f(events_path);
    if (!f) throw InputError("cannot read '" + events_path + "'");
    events = read_events(f);
  }
  Interpreter interp(*d);
  MachineState s = interp.init();
  out << format_state(*d, s) << "\n";
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!interp.knows_trigger(events[i])) {
      err << "event " << i + 1 << ": unknown trigger '" << events[i] << "'\n";
      return 1;
    }
    try {
      s = interp.step(s, events[i]);
    } catch (const TrapError& e) {
      err << "event " << i + 1 << ": trap: " << e.what() << "\n";
      return 1;
    }
    out << format_state(*d, s) << "\n";
  }
  return 0;
}

int cmd_gen(const std::string& model, const std::string& outdir, const std::string& base, bool no_asserts,
            std::ostream& err) {
  auto d = load(model, err);
  if (!d) return 1;
  auto cfg = default_config(*d);
  if (!base.empty()) cfg.base_name = base;
  cfg.emit_asserts = !no_asserts;
  auto bundle = emit_bundle(*d, cfg);
  write_bundle(bundle, outdir);
  err << "wrote " << cfg.base_name << ".h, " << cfg.base_name << ".c, Makefile, " << cfg.base_name
      << "_driver.c, " << cfg.base_name << ".md to " << outdir << "\n";
  return 0;
}

int cmd_lint(const std::vector<std::string>& files, std::ostream& err) {
  static const std::regex local_include(R"re(^\s*#\s*include\s*"([^"]+\.h)")re");
  bool errors = false;
  for (const auto& f : files) {
    const std::string text = read_file(f);
    std::vector<Diagnostic> diags;
    std::string context;
    const bool header = f.size() > 2 && f.compare(f.size() - 2, 2, ".h") == 0;
    if (header) {
      diags = check_header_grammar(text);
    } else {
      std::istringstream lines(text);
      std::string line;
      std::smatch m;
      while (std::getline(lines, line)) {
        if (std::regex_search(line, m, local_include)) {
          auto p = std::filesystem::path(f).parent_path() / m[1].str();
          std::ifstream h(p, std::ios::binary);
          if (h) context += std::string(std::istreambuf_iterator<char>(h), {}) + "\n";
        }
      }
    }
    auto rules = check_rules(text, context);
    diags.insert(diags.end(), rules.begin(), rules.end());
    print_diagnostics(diags, f, err);
    errors = errors || has_errors(diags);
  }
  return errors ? 1 : 0;
}

struct DiffArgs {
  std::size_t n = 1000;
  std::size_t len = 200;
  std::uint64_t seed = 42;
  std::string cc;
  std::string report;
  double tolerance = 0.0;
  bool serial = false;
};

int cmd_difftest(const std::string& model, const DiffArgs& a, std::ostream& out, std::ostream& err) {
  auto d = load(model, err);
  if (!d) return 1;
  auto bundle = emit_bundle(*d, default_config(*d));
  auto seqs = gen_sequences(*d, a.n, a.len, a.seed);
  DiffOptions opts;
  opts.tolerance = a.tolerance;
  TempDir work;
  BuildResult built;
  try {
    built = build(bundle, work.path() / "bundle", a.cc);
  } catch (const CompileError& e) {
    err << e.what() << "\n" << e.log();
    return 1;
  }
  opts.scratch = work.path();
  DiffReport rep = a.serial ? difftest_serial(*d, built.driver, seqs, opts) : difftest(*d, built.driver, seqs, opts);
  rep.compiler_log = built.log;
  for (const auto& v : rep.divergences) {
    err << "sequence " << v.sequence << ", line " << v.step << ":\n  interpreter: " << v.interpreter_line
        << "\n  driver:      " << v.driver_line << "\n";
  }
  out << d->name << ": " << rep.sequences_run << " sequences, " << rep.divergences.size()
      << " divergences; not_permitted=" << rep.coverage.not_permitted
      << " guard_unsatisfied=" << rep.coverage.guard_unsatisfied << " fired=" << rep.coverage.fired << "\n";
  if (!a.report.empty()) {
    std::ofstream f(a.report);
    if (!f) throw InputError("cannot write '" + a.report + "'");
    f << report_to_json(*d, rep).dump(2) << "\n";
  }
  return rep.ok() ? 0 : 1;
}

int cmd_serve(const std::string& model, const std::string& host, int port, const std::string& static_dir,
              int idle_minutes, std::ostream& err) {
  const std::string text = read_file(model);
  auto d = load(model, err);
  if (!d) return 1;
  SessionStore store{std::chrono::minutes(idle_minutes)};
  ServerOptions opts;
  opts.default_model = text;
  if (!static_dir.empty()) opts.static_dir = static_dir;
  httplib::Server svr;
  install_routes(svr, store, opts);
  err << "serving " << d->name << " on http://" << host << ":" << port << "\n";
  if (!svr.listen(host, port)) {
    err << "cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Emucharts model toolchain: check, simulate, generate C, lint, differential test, serve", "emuc"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string model;
  auto* parse = app.add_subcommand("parse", "print the model in normalized form");
  parse->add_option("model", model, "model file")->required();

  std::size_t samples = 8;
  std::uint64_t check_seed = 1;
  auto* check = app.add_subcommand("check", "run the analyzer");
  check->add_option("model", model, "model file")->required();
  check->add_option("--samples", samples, "samples per variable for the guard overlap search");
  check->add_option("--seed", check_seed, "seed for the guard overlap search");

  std::string events;
  auto* simulate = app.add_subcommand("simulate", "print the interpreter trace");
  simulate->add_option("model", model, "model file")->required();
  simulate->add_option("--events", events, "trigger names, one per line ('-' for stdin)");

  std::string outdir;
  std::string base;
  bool no_asserts = false;
  auto* gen = app.add_subcommand("gen", "generate the C bundle");
  gen->add_option("model", model, "model file")->required();
  gen->add_option("-o,--out", outdir, "output directory")->required();
  gen->add_option("--base", base, "base file name (default: diagram name)");
  gen->add_flag("--no-asserts", no_asserts, "omit assert statements");

  std::vector<std::string> files;
  auto* lint = app.add_subcommand("lint", "check C files against the MISRA subset and header grammar");
  lint->add_option("files", files, "C sources and headers")->required();

  DiffArgs da;
  auto* diff = app.add_subcommand("difftest", "compare interpreter and generated code traces");
  diff->add_option("model", model, "model file")->required();
  diff->add_option("--n", da.n, "number of sequences");
  diff->add_option("--len", da.len, "events per sequence");
  diff->add_option("--seed", da.seed, "random seed");
  diff->add_option("--cc", da.cc, "C compiler command (default: $EMUC_CC, then cc)");
  diff->add_option("--report", da.report, "write a JSON report");
  diff->add_option("--tolerance", da.tolerance, "absolute tolerance for real fields (default: exact)")
      ->check(CLI::NonNegativeNumber);
  diff->add_flag("--serial", da.serial, "run sequences on one thread");

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  int idle_minutes = 30;
  auto* serve = app.add_subcommand("serve", "serve interpreter sessions over HTTP");
  serve->add_option("model", model, "model file")->required();
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "bind address");
  serve->add_option("--static", static_dir, "directory with the UI assets")->check(CLI::ExistingDirectory);
  serve->add_option("--idle-timeout", idle_minutes, "minutes before an idle session is dropped")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*parse) return cmd_parse(model, out, err);
    if (*check) return cmd_check(model, samples, check_seed, err);
    if (*simulate) return cmd_simulate(model, events, in, out, err);
    if (*gen) return cmd_gen(model, outdir, base, no_asserts, err);
    if (*lint) return cmd_lint(files, err);
    if (*diff) return cmd_difftest(model, da, out, err);
    if (*serve) return cmd_serve(model, host, port, static_dir, idle_minutes, err);
  } catch (const InputError& e) {
    err << "emuc: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "emuc: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace emuc
