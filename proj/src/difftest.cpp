#include "emuc/difftest.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "emuc/trace.hpp"

extern char** environ;

namespace emuc {
namespace {

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

bool executable(const std::filesystem::path& p) {
  std::error_code ec;
  return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

// Runs argv[0] (PATH lookup) with the given redirections; returns the exit
// status, or minus the signal number.
int spawn_and_wait(const std::vector<std::string>& argv, const std::filesystem::path& in,
                   const std::filesystem::path& out, const std::filesystem::path& err) {
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_addopen(&fa, 0, in.c_str(), O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&fa, 1, out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (err == out) {
    posix_spawn_file_actions_adddup2(&fa, 1, 2);
  } else {
    posix_spawn_file_actions_addopen(&fa, 2, err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  }
  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  pid_t pid = 0;
  int rc = posix_spawnp(&pid, args[0], &fa, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  if (rc != 0) throw EnvironmentError("cannot start '" + argv[0] + "': " + std::strerror(rc));
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw std::runtime_error("waitpid failed");
  }
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return -WTERMSIG(status);
  return -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t b = 0;
  for (;;) {
    auto e = line.find(';', b);
    out.push_back(line.substr(b, e - b));
    if (e == std::string::npos) break;
    b = e + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool lines_agree(const std::string& a, const std::string& b, double tolerance) {
  if (a == b) return true;
  if (tolerance <= 0.0) return false;
  auto fa = split_fields(a);
  auto fb = split_fields(b);
  if (fa.size() != fb.size()) return false;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (fa[i] == fb[i]) continue;
    auto ea = fa[i].find('=');
    auto eb = fb[i].find('=');
    if (ea == std::string::npos || ea != eb || fa[i].compare(0, ea, fb[i], 0, eb) != 0) return false;
    double x = 0;
    double y = 0;
    if (!parse_double(fa[i].substr(ea + 1), x) || !parse_double(fb[i].substr(eb + 1), y)) return false;
    if (!(std::fabs(x - y) <= tolerance)) return false;
  }
  return true;
}

struct SequenceResult {
  RunOutcome outcome;
  std::optional<Divergence> divergence;
};

SequenceResult check_sequence(const Diagram& d, const Interpreter& interp, const std::filesystem::path& driver,
                              const EventSequence& seq, std::size_t index, const std::filesystem::path& scratch,
                              double tolerance) {
  SequenceResult r;
  r.outcome = run_checked(interp, seq);
  std::vector<std::string> expected;
  expected.reserve(r.outcome.states.size());
  for (const auto& s : r.outcome.states) expected.push_back(format_state(d, s));

  auto got = run_driver(driver, seq, scratch, std::to_string(index));
  const bool trapped = r.outcome.trap.has_value();

  auto diverge = [&](std::size_t step, std::string il, std::string dl) {
    r.divergence = Divergence{index, step, std::move(il), std::move(dl)};
  };
  const std::size_t common = std::min(expected.size(), got.lines.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (!lines_agree(expected[i], got.lines[i], tolerance)) {
      diverge(i, expected[i], got.lines[i]);
      return r;
    }
  }
  const std::string exit_note = "<exit status " + std::to_string(got.exit_status) + ">";
  if (got.lines.size() > expected.size()) {
    diverge(expected.size(), trapped ? "<trap: " + *r.outcome.trap + ">" : "<end of trace>",
            got.lines[expected.size()]);
  } else if (got.lines.size() < expected.size()) {
    diverge(got.lines.size(), expected[got.lines.size()], exit_note);
  } else if (trapped && got.exit_status == 0) {
    diverge(expected.size(), "<trap: " + *r.outcome.trap + ">", exit_note);
  } else if (!trapped && got.exit_status != 0) {
    diverge(expected.size(), "<end of trace>", exit_note);
  }
  return r;
}

DiffReport merge(std::vector<SequenceResult>& results, std::size_t arcs) {
  DiffReport rep;
  rep.sequences_run = results.size();
  rep.coverage.arc_fired.assign(arcs, 0);
  for (auto& r : results) {
    rep.coverage.merge(r.outcome.coverage);
    if (r.outcome.trap) ++rep.interpreter_traps;
    if (r.divergence) rep.divergences.push_back(std::move(*r.divergence));
  }
  return rep;
}

}  // namespace

TempDir::TempDir() {
  std::string templ = (std::filesystem::temp_directory_path() / "emuc-XXXXXX").string();
  if (::mkdtemp(templ.data()) == nullptr) throw std::runtime_error("cannot create temporary directory");
  path_ = templ;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string find_compiler(const std::string& requested) {
  if (!split_words(requested).empty()) return requested;
  if (const char* env = std::getenv("EMUC_CC"); env != nullptr && !split_words(env).empty()) return env;
  const char* path = std::getenv("PATH");
  if (path != nullptr) {
    std::string p(path);
    std::size_t b = 0;
    for (;;) {
      auto e = p.find(':', b);
      std::string dir = p.substr(b, e - b);
      if (!dir.empty() && executable(std::filesystem::path(dir) / "cc")) return "cc";
      if (e == std::string::npos) break;
      b = e + 1;
    }
  }
  throw EnvironmentError("no C compiler: pass --cc, set EMUC_CC, or put cc on PATH");
}

BuildResult build(const GeneratedBundle& bundle, const std::filesystem::path& workdir, const std::string& cc) {
  auto cmd = split_words(find_compiler(cc));
  write_bundle(bundle, workdir);
  const auto dir = std::filesystem::absolute(workdir);
  BuildResult out;
  out.driver = dir / (bundle.base_name + "_driver");
  auto argv = cmd;
  for (auto& f : split_words(kStrictCFlags)) argv.push_back(f);
  argv.push_back("-o");
  argv.push_back(out.driver.string());
  argv.push_back((dir / (bundle.base_name + ".c")).string());
  argv.push_back((dir / (bundle.base_name + "_driver.c")).string());
  const auto log_path = dir / "compile.log";
  int status = spawn_and_wait(argv, "/dev/null", log_path, log_path);
  out.log = slurp(log_path);
  if (status != 0) {
    throw CompileError("C compilation failed (status " + std::to_string(status) + ")", out.log);
  }
  return out;
}

std::vector<EventSequence> gen_sequences(const Diagram& d, std::size_t n, std::size_t len, std::uint64_t seed) {
  std::vector<EventSequence> out;
  if (n == 0) return out;
  const auto triggers = trigger_set(d);
  if (triggers.empty()) throw DomainError("diagram '" + d.name + "' has no triggers");
  std::mt19937_64 rng(seed);
  const std::uint64_t k = triggers.size();
  // Rejection sampling keeps the draw uniform and independent of the
  // standard library's distribution implementation.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % k;
  out.resize(n);
  for (auto& seq : out) {
    seq.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
      std::uint64_t x = rng();
      while (x >= limit) x = rng();
      seq.push_back(triggers[x % k]);
    }
  }
  return out;
}

DriverRun run_driver(const std::filesystem::path& driver, const EventSequence& events,
                     const std::filesystem::path& scratch, const std::string& tag) {
  const auto in = scratch / ("seq" + tag + ".in");
  const auto out = scratch / ("seq" + tag + ".out");
  const auto err = scratch / ("seq" + tag + ".err");
  {
    std::ofstream f(in, std::ios::binary);
    for (const auto& e : events) f << e << '\n';
  }
  DriverRun r;
  r.exit_status = spawn_and_wait({driver.string()}, in, out, err);
  std::istringstream text(slurp(out));
  std::string line;
  while (std::getline(text, line)) r.lines.push_back(line);
  std::error_code ec;
  std::filesystem::remove(in, ec);
  std::filesystem::remove(out, ec);
  std::filesystem::remove(err, ec);
  return r;
}

DiffReport difftest(const Diagram& d, const std::filesystem::path& driver,
                    const std::vector<EventSequence>& sequences, const DiffOptions& opts) {
  std::optional<TempDir> tmp;
  if (!opts.scratch) tmp.emplace();
  const auto scratch = opts.scratch ? *opts.scratch : tmp->path();
  const Interpreter interp(d);
  std::vector<SequenceResult> results(sequences.size());
  const auto n = static_cast<std::ptrdiff_t>(sequences.size());
  std::string error;

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      results[k] = check_sequence(d, interp, driver, sequences[k], k, scratch, opts.tolerance);
    } catch (const std::exception& e) {
#pragma omp critical
      error = e.what();
    }
  }
  if (!error.empty()) throw EnvironmentError(error);
  return merge(results, d.arcs.size());
}

DiffReport difftest_serial(const Diagram& d, const std::filesystem::path& driver,
                           const std::vector<EventSequence>& sequences, const DiffOptions& opts) {
  std::optional<TempDir> tmp;
  if (!opts.scratch) tmp.emplace();
  const auto scratch = opts.scratch ? *opts.scratch : tmp->path();
  const Interpreter interp(d);
  std::vector<SequenceResult> results;
  results.reserve(sequences.size());
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    results.push_back(check_sequence(d, interp, driver, sequences[i], i, scratch, opts.tolerance));
  }
  return merge(results, d.arcs.size());
}

DiffReport difftest_bundle(const Diagram& d, const GeneratedBundle& bundle,
                           const std::vector<EventSequence>& sequences, const std::string& cc,
                           const DiffOptions& opts) {
  TempDir work;
  auto built = build(bundle, work.path() / "bundle", cc);
  DiffOptions o = opts;
  if (!o.scratch) o.scratch = work.path();
  auto rep = difftest(d, built.driver, sequences, o);
  rep.compiler_log = built.log;
  return rep;
}

nlohmann::json report_to_json(const Diagram& d, const DiffReport& r) {
  nlohmann::json j;
  j["model"] = d.name;
  j["sequences_run"] = r.sequences_run;
  j["ok"] = r.ok();
  j["interpreter_traps"] = r.interpreter_traps;
  j["coverage"] = {
      {"not_permitted", r.coverage.not_permitted},
      {"guard_unsatisfied", r.coverage.guard_unsatisfied},
      {"fired", r.coverage.fired},
      {"arc_fired", r.coverage.arc_fired},
  };
  auto divs = nlohmann::json::array();
  for (const auto& v : r.divergences) {
    divs.push_back({{"sequence", v.sequence},
                    {"step", v.step},
                    {"interpreter", v.interpreter_line},
                    {"driver", v.driver_line}});
  }
  j["divergences"] = divs;
  j["compiler_log"] = r.compiler_log;
  return j;
}

}  // namespace emuc
