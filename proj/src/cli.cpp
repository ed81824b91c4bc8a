#include "fwbt/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "fwbt/examples.hpp"
#include "fwbt/io.hpp"

namespace fwbt::cli {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument(std::string("bad ") + what + " '" + s + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& s, const char* what) {
  Int v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument(std::string("bad ") + what + " '" + s + "'");
  return v;
}

std::string fmt(double v) {
  // Shortest text that reads back to the same double.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s, const char* what) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, what);
}

// Free text goes last in a row, so it may contain commas; newlines are flattened.
std::string clean(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

std::vector<std::string> read_rows(std::istream& in, const std::string& header, std::size_t fields,
                                   std::vector<std::vector<std::string>>& rows) {
  std::string line;
  if (!std::getline(in, line) || line != header) throw std::invalid_argument("unexpected CSV header, want '" + header + "'");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split(line, ',');
    if (f.size() > fields) {
      // Re-join the trailing free-text column.
      std::string tail = f[fields - 1];
      for (std::size_t i = fields; i < f.size(); ++i) tail += "," + f[i];
      f.resize(fields);
      f.back() = tail;
    }
    if (f.size() != fields) throw std::invalid_argument("malformed CSV row '" + line + "'");
    rows.push_back(std::move(f));
  }
  return {};
}

// The systems a run works on, in both domains where available.
struct Problem {
  std::string name;
  std::optional<StateSpaceModel> plant_ct, w_in_ct, w_out_ct;
  std::optional<StateSpaceModel> plant_dt, w_in_dt, w_out_dt;
};

Problem from_example(const examples::ExampleSystem& ex) {
  Problem p;
  p.name = ex.name;
  p.plant_ct = ex.plant_ct;
  p.w_in_ct = ex.w_in_ct;
  p.w_out_ct = ex.w_out_ct;
  p.plant_dt = ex.plant_dt;
  p.w_in_dt = ex.w_in_dt;
  p.w_out_dt = ex.w_out_dt;
  return p;
}

Problem load_problem(const RunConfig& config, std::uint64_t seed) {
  if (config.custom_model) {
    const io::WeightedModel m = io::weighted_from_json(io::read_file(*config.custom_model));
    Problem p;
    p.name = config.custom_model->stem().string();
    const auto same = [&](const std::optional<StateSpaceModel>& w) {
      return !w || w->domain().is_discrete() == m.plant.domain().is_discrete();
    };
    if (!same(m.input_weight) || !same(m.output_weight)) {
      throw ConfigError("custom model: weights must share the plant's time domain");
    }
    if (m.plant.domain().is_discrete()) {
      p.plant_dt = m.plant;
      p.w_in_dt = m.input_weight;
      p.w_out_dt = m.output_weight;
    } else {
      p.plant_ct = m.plant;
      p.w_in_ct = m.input_weight;
      p.w_out_ct = m.output_weight;
    }
    return p;
  }
  switch (config.example) {
    case 1: return from_example(examples::gen_example1());
    case 2: return from_example(examples::gen_example2());
    case 3: return from_example(examples::gen_example3(seed));
    default: throw ConfigError("example must be 1, 2 or 3");
  }
}

struct MethodOutcome {
  std::optional<ReductionReport> report;
  std::vector<TsweepRow> tsweep;
  std::string failure;
};

MethodOutcome run_method(CliMethod method, const Problem& p, const RunConfig& config) {
  MethodOutcome out;
  ExtendedOptions ext;
  ext.loop_max = config.loop_max;
  ext.measure_errors = config.measure_errors;
  CommonOptions common;
  common.measure_errors = config.measure_errors;
  try {
    switch (method) {
      case CliMethod::Enns:
        out.report = enns_ct_baseline(*p.plant_ct, p.w_in_ct, p.w_out_ct, common);
        break;
      case CliMethod::GenBT:
        out.report = p.plant_dt ? generalized_fw_bt(*p.plant_dt, p.w_in_dt, p.w_out_dt, common)
                                : generalized_fw_bt_ct(*p.plant_ct, p.w_in_ct, p.w_out_ct, common);
        break;
      case CliMethod::ExtBT:
        out.report = extended_fw_bt(*p.plant_dt, p.w_in_dt, p.w_out_dt, ext);
        break;
      case CliMethod::ExtBTCT: {
        SweepResult sweep = sweep_t(*p.plant_ct, p.w_in_ct, p.w_out_ct, config.t_grid, ext, config.workers);
        for (const auto& pt : sweep.points) {
          TsweepRow row;
          row.t = pt.t;
          if (pt.report) row.full_bound = pt.full_bound;
          row.error = pt.error;
          out.tsweep.push_back(std::move(row));
        }
        if (!sweep.best) {
          out.failure = "extbt_ct failed for every t in the grid";
        } else {
          out.report = std::move(*sweep.points[*sweep.best].report);
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    out.failure = to_string(method) + ": " + e.what();
    out.report.reset();
  }
  return out;
}

void append_tables(RunResult& res, const ReductionReport& rep, const std::string& label) {
  for (Eigen::Index i = 0; i < rep.sigma.size(); ++i) {
    res.sigma.push_back(SigmaRow{label, static_cast<int>(i) + 1, rep.sigma(i)});
  }
  for (const auto& it : rep.iterations) {
    res.iterations.push_back(
        IterationRow{label, it.index, it.step, it.sigma_sum, it.nuclear_norm, it.solve_time, it.solver_iterations});
  }
}

// Verdicts for one report; false when verification fails.
bool summarize(RunResult& res, const ReductionReport& rep, const std::string& label) {
  std::ostringstream os;
  os << std::setprecision(10);
  const auto violations = verify_report(rep);
  os << label << ": order " << rep.order();
  if (rep.t) os << ", t = " << *rep.t;
  os << ", verify " << (violations.empty() ? "PASS" : "FAIL");
  if (!rep.bound.empty()) os << ", full bound " << rep.bound.at(0);
  res.summary.push_back(os.str());
  for (const auto& v : violations) res.summary.push_back("  violation (" + to_string(v.kind) + "): " + v.message);
  for (const auto& w : rep.warnings) res.summary.push_back("  warning: " + w);
  if (rep.degraded) res.summary.push_back("  note: alternating loop stopped early; best iterate kept");
  return violations.empty();
}

// Per-(method, r) means over trials.
ComparisonTable mean_table(const std::vector<TrialRow>& rows, const std::vector<std::string>& method_order) {
  std::map<int, std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>> acc;
  for (const auto& row : rows) {
    auto& cell = acc[row.r][row.method];
    if (row.bound) cell.first.push_back(*row.bound);
    if (row.error) cell.second.push_back(*row.error);
  }
  const auto mean = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  ComparisonTable table;
  for (const auto& [r, by_method] : acc) {
    ComparisonRow row;
    row.r = r;
    for (const auto& m : method_order) {
      auto it = by_method.find(m);
      if (it == by_method.end()) continue;
      row.entries.push_back(MethodEntry{m, mean(it->second.first), mean(it->second.second)});
    }
    // genbt vs extbt and their continuous counterparts.
    const auto bound_of = [&](const std::string& m) -> std::optional<double> {
      for (const auto& e : row.entries) {
        if (e.method == m) return e.bound;
      }
      return std::nullopt;
    };
    for (const auto& [g, x] : {std::pair{"genbt", "extbt"}, std::pair{"genbt_ct", "extbt_ct"}}) {
      const auto gb = bound_of(g), xb = bound_of(x);
      if (gb && xb && *xb > *gb + 1e-6) row.dominance_violated = true;
    }
    if (row.dominance_violated) table.flagged.push_back(r);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ComparisonTable drop_r0(ComparisonTable table) {
  // The emitted tables cover r = 1..n.
  std::erase_if(table.rows, [](const ComparisonRow& row) { return row.r < 1; });
  std::erase(table.flagged, 0);
  return table;
}

void dominance_lines(RunResult& res, const ComparisonTable& table) {
  std::ostringstream os;
  if (table.flagged.empty()) {
    os << "dominance: PASS (no extended bound above the generalized one)";
  } else {
    os << "dominance: FAIL at r =";
    for (int r : table.flagged) os << " " << r;
  }
  res.summary.push_back(os.str());
}

template <class Row, class Writer>
void write_table(const std::filesystem::path& path, const std::vector<Row>& rows, Writer writer) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  writer(rows, out);
}

}  // namespace

std::string to_string(CliMethod method) {
  switch (method) {
    case CliMethod::Enns: return "enns";
    case CliMethod::GenBT: return "genbt";
    case CliMethod::ExtBT: return "extbt";
    case CliMethod::ExtBTCT: return "extbt_ct";
  }
  return "unknown";
}

std::vector<CliMethod> parse_methods(const std::string& list) {
  std::vector<CliMethod> out;
  for (const auto& name : split(list, ',')) {
    std::optional<CliMethod> m;
    for (CliMethod c : {CliMethod::Enns, CliMethod::GenBT, CliMethod::ExtBT, CliMethod::ExtBTCT}) {
      if (to_string(c) == name) m = c;
    }
    if (!m) throw ConfigError("unknown method '" + name + "' (expected enns, genbt, extbt, extbt_ct)");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty()) throw ConfigError("at least one method is required");
  return out;
}

std::vector<double> parse_t_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3 && parts.size() != 4) throw ConfigError("t grid must look like a:b:{lin|log10}[:k]");
  double a = 0.0, b = 0.0;
  int k = 10;
  try {
    a = parse_double(parts[0], "t grid start");
    b = parse_double(parts[1], "t grid end");
    if (parts.size() == 4) k = parse_int<int>(parts[3], "t grid count");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string& kind = parts[2];
  if (kind != "lin" && kind != "log10") throw ConfigError("t grid spacing must be lin or log10, got '" + kind + "'");
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("t grid bounds must be positive");
  if (!(b >= a)) throw ConfigError("t grid end must not be below its start");
  if (k < 1) throw ConfigError("t grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(k));
  if (k == 1) {
    grid[0] = a;
    return grid;
  }
  for (int i = 0; i < k; ++i) {
    const double f = static_cast<double>(i) / (k - 1);
    grid[static_cast<std::size_t>(i)] =
        kind == "lin" ? a + (b - a) * f : std::pow(10.0, std::log10(a) + (std::log10(b) - std::log10(a)) * f);
  }
  // Land exactly on the end points.
  grid.front() = a;
  grid.back() = b;
  return grid;
}

void validate(const RunConfig& config) {
  if (config.methods.empty()) throw ConfigError("at least one method is required");
  if (!config.custom_model && (config.example < 1 || config.example > 3)) {
    throw ConfigError("example must be 1, 2 or 3");
  }
  if (config.loop_max < 0 || config.loop_max > 1000) throw ConfigError("loop-max must lie in [0, 1000]");
  if (config.trials < 1) throw ConfigError("trials must be at least 1");
  if (config.trials > 1 && (config.custom_model || config.example != 3)) {
    throw ConfigError("trials are only defined for example 3");
  }
  const bool has = [&] {
    return std::find(config.methods.begin(), config.methods.end(), CliMethod::ExtBTCT) != config.methods.end();
  }();
  if (has && config.t_grid.empty()) throw ConfigError("extbt_ct needs a t grid (--t-grid a:b:{lin|log10}[:k])");
  for (double t : config.t_grid) {
    if (!(t > 0.0)) throw ConfigError("every t must be positive");
  }
  if (!config.custom_model) {
    for (CliMethod m : config.methods) {
      if (m == CliMethod::ExtBT && config.example == 1) {
        throw ConfigError("extbt needs a discrete-time plant; example 1 is continuous, use extbt_ct");
      }
      if (m == CliMethod::Enns && config.example != 1) {
        throw ConfigError("enns handles output weights only; example " + std::to_string(config.example) +
                          " has an input weight");
      }
    }
  }
}

void write_sigma_csv(const std::vector<SigmaRow>& rows, std::ostream& out) {
  out << "method,i,sigma\n";
  for (const auto& r : rows) out << r.method << "," << r.i << "," << fmt(r.sigma) << "\n";
}

std::vector<SigmaRow> read_sigma_csv(std::istream& in) {
  std::vector<std::vector<std::string>> raw;
  read_rows(in, "method,i,sigma", 3, raw);
  std::vector<SigmaRow> out;
  for (const auto& f : raw) out.push_back(SigmaRow{f[0], parse_int<int>(f[1], "index"), parse_double(f[2], "sigma")});
  return out;
}

void write_iterations_csv(const std::vector<IterationRow>& rows, std::ostream& out) {
  out << "method,index,step,sigma_sum,nuclear_norm,solve_time,solver_iterations\n";
  for (const auto& r : rows) {
    out << r.method << "," << r.index << "," << r.step << "," << fmt(r.sigma_sum) << "," << fmt(r.nuclear_norm)
        << "," << fmt(r.solve_time) << "," << r.solver_iterations << "\n";
  }
}

std::vector<IterationRow> read_iterations_csv(std::istream& in) {
  std::vector<std::vector<std::string>> raw;
  read_rows(in, "method,index,step,sigma_sum,nuclear_norm,solve_time,solver_iterations", 7, raw);
  std::vector<IterationRow> out;
  for (const auto& f : raw) {
    out.push_back(IterationRow{f[0], parse_int<int>(f[1], "index"), f[2], parse_double(f[3], "sigma_sum"),
                               parse_double(f[4], "nuclear_norm"), parse_double(f[5], "solve_time"),
                               parse_int<int>(f[6], "solver_iterations")});
  }
  return out;
}

void write_tsweep_csv(const std::vector<TsweepRow>& rows, std::ostream& out) {
  out << "t,full_bound,error\n";
  for (const auto& r : rows) out << fmt(r.t) << "," << fmt(r.full_bound) << "," << clean(r.error) << "\n";
}

std::vector<TsweepRow> read_tsweep_csv(std::istream& in) {
  std::vector<std::vector<std::string>> raw;
  read_rows(in, "t,full_bound,error", 3, raw);
  std::vector<TsweepRow> out;
  for (const auto& f : raw) out.push_back(TsweepRow{parse_double(f[0], "t"), parse_opt(f[1], "bound"), f[2]});
  return out;
}

void write_trials_csv(const std::vector<TrialRow>& rows, std::ostream& out) {
  out << "seed,method,r,bound,error\n";
  for (const auto& r : rows) {
    out << r.seed << "," << r.method << "," << r.r << "," << fmt(r.bound) << "," << fmt(r.error) << "\n";
  }
}

std::vector<TrialRow> read_trials_csv(std::istream& in) {
  std::vector<std::vector<std::string>> raw;
  read_rows(in, "seed,method,r,bound,error", 5, raw);
  std::vector<TrialRow> out;
  for (const auto& f : raw) {
    out.push_back(TrialRow{parse_int<std::uint64_t>(f[0], "seed"), f[1], parse_int<int>(f[2], "r"),
                           parse_opt(f[3], "bound"), parse_opt(f[4], "error")});
  }
  return out;
}

RunResult execute(const RunConfig& config) {
  validate(config);
  RunResult res;
  std::vector<std::string> labels;

  if (config.trials == 1) {
    const Problem p = load_problem(config, config.seed);
    for (CliMethod m : config.methods) {
      if ((m == CliMethod::ExtBT && !p.plant_dt) || ((m == CliMethod::Enns || m == CliMethod::ExtBTCT) && !p.plant_ct)) {
        throw ConfigError(to_string(m) + " is not available for this model's time domain");
      }
      if (m == CliMethod::Enns && p.w_in_ct) throw ConfigError("enns handles output weights only");
    }
    for (CliMethod m : config.methods) {
      MethodOutcome o = run_method(m, p, config);
      res.tsweep.insert(res.tsweep.end(), o.tsweep.begin(), o.tsweep.end());
      if (!o.report) {
        res.summary.push_back("FAILED " + o.failure);
        res.verified = false;
        continue;
      }
      const std::string label = to_string(o.report->method);
      append_tables(res, *o.report, label);
      res.verified = summarize(res, *o.report, label) && res.verified;
      res.reports.push_back(std::move(*o.report));
    }
    std::vector<const ReductionReport*> ptrs;
    for (const auto& r : res.reports) ptrs.push_back(&r);
    if (!ptrs.empty()) res.table = drop_r0(compare_methods(ptrs));
    dominance_lines(res, res.table);
    return res;
  }

  // Example 3 trials: independent seeds in a worker pool, results kept in seed order.
  const auto count = static_cast<std::size_t>(config.trials);
  std::vector<std::vector<MethodOutcome>> outcomes(count);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      const Problem p = load_problem(config, config.seed + i);
      for (CliMethod m : config.methods) outcomes[i].push_back(run_method(m, p, config));
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(count)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t seed = config.seed + i;
    for (auto& o : outcomes[i]) {
      if (!o.report) {
        res.summary.push_back("FAILED seed " + std::to_string(seed) + ": " + o.failure);
        res.verified = false;
        continue;
      }
      const std::string name = to_string(o.report->method);
      if (std::find(labels.begin(), labels.end(), name) == labels.end()) labels.push_back(name);
      const std::string label = name + "/seed=" + std::to_string(seed);
      append_tables(res, *o.report, label);
      res.verified = summarize(res, *o.report, label) && res.verified;
      for (const auto& [r, _] : o.report->reduced) {
        TrialRow row{seed, name, r, std::nullopt, std::nullopt};
        if (auto it = o.report->bound.find(r); it != o.report->bound.end()) row.bound = it->second;
        if (auto it = o.report->measured_error.find(r); it != o.report->measured_error.end()) row.error = it->second;
        res.trials.push_back(row);
      }
      res.tsweep.insert(res.tsweep.end(), o.tsweep.begin(), o.tsweep.end());
      res.reports.push_back(std::move(*o.report));
    }
  }
  res.table = drop_r0(mean_table(res.trials, labels));
  res.summary.push_back("tables hold means over " + std::to_string(count) + " trials");
  dominance_lines(res, res.table);
  return res;
}

int run(const RunConfig& config, std::ostream& log) {
  RunResult res;
  try {
    res = execute(config);
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    std::filesystem::create_directories(config.output_dir);
    const auto& dir = config.output_dir;
    write_table(dir / "sigma.csv", res.sigma, write_sigma_csv);
    write_table(dir / "iterations.csv", res.iterations, write_iterations_csv);
    {
      std::ofstream out(dir / "bounds_errors.csv");
      if (!out) throw std::runtime_error("cannot write bounds_errors.csv");
      write_comparison_csv(res.table, out);
    }
    if (!res.tsweep.empty()) write_table(dir / "tsweep.csv", res.tsweep, write_tsweep_csv);
    if (!res.trials.empty()) write_table(dir / "trials.csv", res.trials, write_trials_csv);
    for (const auto& rep : res.reports) {
      // With trials only the first report per method is kept on disk.
      const auto path = dir / ("report_" + to_string(rep.method) + ".json");
      if (!std::filesystem::exists(path) || config.trials == 1) io::write_file(path, io::report_to_json(rep, 1));
    }
    std::ostringstream summary;
    for (const auto& line : res.summary) summary << line << "\n";
    summary << "overall: " << (res.verified ? "PASS" : "FAIL") << "\n";
    io::write_file(dir / "summary.txt", summary.str());
    log << summary.str();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 1;
  }
  return res.verified ? 0 : 1;
}

}  // namespace fwbt::cli
