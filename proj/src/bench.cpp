#include "eqdirect/bench.hpp"

#include "eqdirect/format.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace eqd {

std::optional<std::int64_t> evals_to_solve(const History& history, double phi0, double tau) {
  const double threshold = tau * phi0;
  for (const auto& [k, v] : history) {
    if (v <= threshold) return k;
  }
  return std::nullopt;
}

namespace {

RunRecord run_one(const ProblemInstance& p, Variant v, const BenchOptions& opts) {
  RunRecord rec;
  rec.problem_id = p.id;
  rec.variant = v;
  rec.n = static_cast<int>(p.n());
  rec.budget = opts.solve.global_budget + opts.solve.local_budget;
  rec.tau = opts.tau;
  rec.gates = opts.gates;
  rec.evals_to_gates.assign(opts.gates.size(), std::nullopt);
  try {
    SolveOptions so = opts.solve;
    so.variant = v;
    const SolveResult r = solve(p, so);
    rec.history = r.history;
    rec.phi0 = r.phi0;
    rec.evals_to_gates = evals_to_gaps(r, opts.gates);
    rec.evals_to_solve = evals_to_solve(rec.history, rec.phi0, opts.tau);
    rec.solved = rec.evals_to_solve.has_value();
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

bool record_less(const RunRecord& a, const RunRecord& b) {
  if (a.problem_id != b.problem_id) return a.problem_id < b.problem_id;
  return to_string(a.variant) < to_string(b.variant);
}

std::string variant_name(const RunRecord& r) { return std::string(to_string(r.variant)); }

// problem id -> (variant -> evaluations to solve, n)
struct SolveMatrix {
  std::vector<std::string> variants;
  std::map<std::string, std::pair<int, std::map<std::string, std::optional<std::int64_t>>>> problems;
};

SolveMatrix solve_matrix(const std::vector<RunRecord>& records, double tau) {
  SolveMatrix m;
  std::set<std::string> vs;
  for (const auto& r : records) {
    vs.insert(variant_name(r));
    std::optional<std::int64_t> t;
    if (r.error.empty()) {
      if (!r.history.empty()) {
        t = evals_to_solve(r.history, r.phi0, tau);
      } else if (r.tau == tau) {
        t = r.evals_to_solve;
      } else {
        throw UsageError("record " + r.problem_id + " was computed with tau = " + format_double(r.tau) +
                         " and has no history to recompute it for tau = " + format_double(tau));
      }
    }
    auto& entry = m.problems[r.problem_id];
    entry.first = r.n;
    entry.second[variant_name(r)] = t;
  }
  m.variants.assign(vs.begin(), vs.end());
  return m;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& where) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(where + ": bad number '" + s + "'");
  return v;
}

std::string opt_field(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string(); }

std::string gate_label(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", g);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<RunRecord> run_suite(const std::vector<ProblemInstance>& problems, const BenchOptions& opts) {
  if (problems.empty()) throw UsageError("suite is empty");
  if (opts.variants.empty()) throw UsageError("no algorithms selected");
  struct Job {
    const ProblemInstance* p;
    Variant v;
  };
  std::vector<Job> jobs;
  for (const auto& p : problems) {
    for (Variant v : opts.variants) jobs.push_back({&p, v});
  }
  std::vector<RunRecord> out(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) out[i] = run_one(*jobs[i].p, jobs[i].v, opts);
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

std::vector<ProblemInstance> load_suite(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("suite directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json" && e.path().filename() != "manifest.json") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<ProblemInstance> out;
  for (const auto& f : files) out.push_back(load_problem(f));
  if (out.empty()) throw UsageError("no problem files in " + dir.string());
  return out;
}

Profile performance_profile(const std::vector<RunRecord>& records, double tau) {
  const SolveMatrix m = solve_matrix(records, tau);
  Profile prof;
  if (m.variants.size() < 2) throw UsageError("performance profile needs at least two variants");
  const double inf = std::numeric_limits<double>::infinity();
  std::map<std::string, std::vector<double>> ratios;
  std::set<double> breakpoints;
  for (const auto& [pid, entry] : m.problems) {
    std::optional<std::int64_t> best;
    for (const auto& [v, t] : entry.second) {
      if (t && (!best || *t < *best)) best = t;
    }
    for (const auto& v : m.variants) {
      auto it = entry.second.find(v);
      const bool ok = best && it != entry.second.end() && it->second;
      const double ratio = ok ? static_cast<double>(*it->second) / static_cast<double>(*best) : inf;
      ratios[v].push_back(ratio);
      if (ok) breakpoints.insert(ratio);
    }
  }
  if (breakpoints.empty()) {
    prof.warning = "no problem was solved by any variant";
    for (const auto& v : m.variants) prof.curves.push_back({v, {}});
    return prof;
  }
  const double np = static_cast<double>(m.problems.size());
  for (const auto& v : m.variants) {
    ProfileCurve c{v, {}};
    for (double theta : breakpoints) {
      const auto cnt = std::count_if(ratios[v].begin(), ratios[v].end(), [&](double r) { return r <= theta; });
      c.points.emplace_back(theta, static_cast<double>(cnt) / np);
    }
    prof.curves.push_back(std::move(c));
  }
  return prof;
}

Profile data_profile(const std::vector<RunRecord>& records, double tau) {
  const SolveMatrix m = solve_matrix(records, tau);
  Profile prof;
  std::map<std::string, std::vector<double>> groups;
  std::set<double> breakpoints;
  for (const auto& [pid, entry] : m.problems) {
    for (const auto& v : m.variants) {
      auto it = entry.second.find(v);
      double kappa = std::numeric_limits<double>::infinity();
      if (it != entry.second.end() && it->second) {
        kappa = static_cast<double>(*it->second) / static_cast<double>(entry.first + 1);
        breakpoints.insert(kappa);
      }
      groups[v].push_back(kappa);
    }
  }
  if (breakpoints.empty()) {
    prof.warning = "no problem was solved by any variant";
    for (const auto& v : m.variants) prof.curves.push_back({v, {}});
    return prof;
  }
  const double np = static_cast<double>(m.problems.size());
  for (const auto& v : m.variants) {
    ProfileCurve c{v, {}};
    for (double kappa : breakpoints) {
      const auto cnt = std::count_if(groups[v].begin(), groups[v].end(), [&](double k) { return k <= kappa; });
      c.points.emplace_back(kappa, static_cast<double>(cnt) / np);
    }
    prof.curves.push_back(std::move(c));
  }
  return prof;
}

GateTable gate_table(const std::vector<RunRecord>& records, const std::vector<double>& gates) {
  GateTable t;
  t.gates = gates;
  std::set<std::string> vs;
  for (const auto& r : records) vs.insert(variant_name(r));
  t.variants.assign(vs.begin(), vs.end());
  std::map<std::string, GateTable::Row> rows;
  for (const auto& r : records) {
    auto [it, inserted] = rows.try_emplace(r.problem_id);
    GateTable::Row& row = it->second;
    if (inserted) {
      row.problem_id = r.problem_id;
      row.n = r.n;
      row.budget = r.budget;
      row.cells.assign(t.variants.size() * gates.size(), std::nullopt);
    }
    const auto vi = static_cast<std::size_t>(
        std::find(t.variants.begin(), t.variants.end(), variant_name(r)) - t.variants.begin());
    if (!r.error.empty()) continue;
    const auto reached = evals_to_gaps(std::span<const std::pair<std::int64_t, double>>(r.history), gates);
    for (std::size_t g = 0; g < gates.size(); ++g) row.cells[vi * gates.size() + g] = reached[g];
  }
  for (auto& [id, row] : rows) t.rows.push_back(std::move(row));
  return t;
}

void write_records_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "problem_id,variant,n,budget,tau,phi0,solved,evals_to_solve";
  const std::vector<double> gates = records.empty() ? std::vector<double>{} : records.front().gates;
  for (double g : gates) out << ",gate_" << gate_label(g);
  out << ",error\n";
  for (const auto& r : records) {
    out << csv_field(r.problem_id) << ',' << variant_name(r) << ',' << r.n << ',' << r.budget << ','
        << format_double(r.tau) << ',' << format_double(r.phi0) << ',' << (r.solved ? 1 : 0) << ','
        << opt_field(r.evals_to_solve);
    for (std::size_t g = 0; g < gates.size(); ++g) {
      out << ',' << (g < r.evals_to_gates.size() ? opt_field(r.evals_to_gates[g]) : std::string());
    }
    out << ',' << csv_field(r.error) << '\n';
  }
}

void write_histories_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "problem_id,variant,eval_count,best_phi\n";
  for (const auto& r : records) {
    for (const auto& [k, v] : r.history) {
      out << csv_field(r.problem_id) << ',' << variant_name(r) << ',' << k << ',' << format_double(v) << '\n';
    }
  }
}

std::vector<RunRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open records file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  const auto header = split_csv_line(line);
  const std::vector<std::string> fixed{"problem_id", "variant", "n", "budget", "tau", "phi0", "solved",
                                       "evals_to_solve"};
  if (header.size() < fixed.size() + 1 || !std::equal(fixed.begin(), fixed.end(), header.begin()) ||
      header.back() != "error") {
    throw ParseError(path.string() + ": line 1: unexpected header");
  }
  std::vector<double> gates;
  for (std::size_t i = fixed.size(); i + 1 < header.size(); ++i) {
    if (!header[i].starts_with("gate_")) throw ParseError(path.string() + ": line 1: bad column " + header[i]);
    gates.push_back(parse_number<double>(header[i].substr(5), path.string() + ": line 1"));
  }

  std::vector<RunRecord> records;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    const std::string where = path.string() + ": line " + std::to_string(lineno);
    if (f.size() != header.size()) throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields");
    RunRecord r;
    r.problem_id = f[0];
    try {
      r.variant = variant_from_string(f[1]);
    } catch (const UsageError& e) {
      throw ParseError(where + ": " + e.what());
    }
    r.n = parse_number<int>(f[2], where + ", field n");
    r.budget = parse_number<std::int64_t>(f[3], where + ", field budget");
    r.tau = parse_number<double>(f[4], where + ", field tau");
    r.phi0 = parse_number<double>(f[5], where + ", field phi0");
    r.solved = f[6] == "1";
    if (!f[7].empty()) r.evals_to_solve = parse_number<std::int64_t>(f[7], where + ", field evals_to_solve");
    r.gates = gates;
    for (std::size_t g = 0; g < gates.size(); ++g) {
      const std::string& cell = f[fixed.size() + g];
      r.evals_to_gates.push_back(cell.empty() ? std::nullopt
                                              : std::optional(parse_number<std::int64_t>(cell, where)));
    }
    r.error = f.back();
    index[{r.problem_id, f[1]}] = records.size();
    records.push_back(std::move(r));
  }

  const auto hist_path = path.parent_path() / "histories.csv";
  std::ifstream hin(hist_path, std::ios::binary);
  if (hin) {
    std::getline(hin, line);
    for (std::size_t lineno = 2; std::getline(hin, line); ++lineno) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      const std::string where = hist_path.string() + ": line " + std::to_string(lineno);
      if (f.size() != 4) throw ParseError(where + ": expected 4 fields");
      auto it = index.find({f[0], f[1]});
      if (it == index.end()) continue;
      records[it->second].history.emplace_back(parse_number<std::int64_t>(f[2], where),
                                               parse_number<double>(f[3], where));
    }
  }
  return records;
}

void write_profile_csv(const Profile& profile, const char* x_name, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "variant," << x_name << ",fraction\n";
  for (const auto& c : profile.curves) {
    for (const auto& [x, y] : c.points) out << c.variant << ',' << format_double(x) << ',' << format_double(y) << '\n';
  }
}

void write_gate_table_csv(const GateTable& t, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "problem,n";
  for (const auto& v : t.variants) {
    for (double g : t.gates) out << ',' << v << '@' << gate_label(g);
  }
  out << '\n';
  for (const auto& row : t.rows) {
    out << csv_field(row.problem_id) << ',' << row.n;
    for (const auto& c : row.cells) out << ',' << opt_field(c);
    out << '\n';
  }
}

std::string format_gate_table(const GateTable& t) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> head1{"", ""}, head2{"Problem", "n"};
  for (const auto& v : t.variants) {
    for (std::size_t g = 0; g < t.gates.size(); ++g) {
      head1.push_back(g == 0 ? v : "");
      head2.push_back(gate_label(t.gates[g]));
    }
  }
  cells.push_back(head1);
  cells.push_back(head2);
  for (const auto& row : t.rows) {
    std::vector<std::string> line{row.problem_id, std::to_string(row.n)};
    for (const auto& c : row.cells) line.push_back(c ? std::to_string(*c) : ">" + std::to_string(row.budget));
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::ostringstream os;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) os << "  ";
      os << (i < 2 ? std::left : std::right) << std::setw(static_cast<int>(width[i])) << line[i];
    }
    os << '\n';
  }
  return os.str();
}

std::vector<RunRecord> run_bench(const std::filesystem::path& suite_dir, const BenchOptions& opts,
                                 const std::filesystem::path& out_dir) {
  const auto problems = load_suite(suite_dir);
  auto records = run_suite(problems, opts);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  write_records_csv(records, out_dir / "records.csv");
  write_histories_csv(records, out_dir / "histories.csv");
  const GateTable table = gate_table(records, opts.gates);
  write_gate_table_csv(table, out_dir / "gate_table.csv");
  {
    auto out = open_out(out_dir / "gate_table.txt");
    out << format_gate_table(table);
  }
  if (opts.variants.size() >= 2) write_profile_csv(performance_profile(records, opts.tau), "theta", out_dir / "perf_profile.csv");
  write_profile_csv(data_profile(records, opts.tau), "kappa", out_dir / "data_profile.csv");
  return records;
}

}  // namespace eqd
