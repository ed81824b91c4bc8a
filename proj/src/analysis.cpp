#include "fwbt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace fwbt {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> logspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < count; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (count - 1));
  return out;
}

// Candidate grid: log-spaced points plus the natural frequencies of the poles.
std::vector<double> norm_grid(const StateSpaceModel& model) {
  const bool dt = model.domain().is_discrete();
  std::vector<double> special;
  double lo = dt ? 1e-5 : 1e-3;
  double hi = dt ? kPi : 1e3;
  if (model.order() > 0) {
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(model.a(), false).eigenvalues();
    for (const auto& lambda : ev) {
      // Discrete poles are mapped to s = log z so both cases look alike.
      const std::complex<double> s = dt ? std::log(lambda) : lambda;
      const double wn = std::abs(s), wd = std::abs(s.imag());
      if (wn > 0.0) lo = std::min(lo, 0.1 * wn);
      if (!dt) hi = std::max(hi, 10.0 * wn);
      for (double w : {wn, wd}) {
        if (w > 0.0 && (!dt || w < kPi)) special.push_back(w);
      }
    }
  }
  std::vector<double> grid = logspace(lo, hi, 600);
  grid.push_back(0.0);
  grid.insert(grid.end(), special.begin(), special.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

NormResult hinf_norm(const StateSpaceModel& model, double rel_tol) {
  if (!is_stable(model)) throw DomainError("hinf_norm: model is not stable, the norm is unbounded");
  NormResult out;
  out.certified_tolerance = rel_tol;
  const auto static_norm = [](const Matrix& d) {
    if (d.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(d).singularValues()(0);
  };
  if (model.order() == 0) {
    out.value = static_norm(model.d());
    return out;
  }

  const FrequencyEvaluator eval(model);
  const std::vector<double> grid = norm_grid(model);
  std::vector<double> gain(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gain[i] = eval.max_singular_value(grid[i]);

  std::size_t arg = std::max_element(gain.begin(), gain.end()) - gain.begin();
  out.value = gain[arg];
  out.peak_frequency = grid[arg];

  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool left = i == 0 || gain[i] >= gain[i - 1];
    const bool right = i + 1 == grid.size() || gain[i] >= gain[i + 1];
    if (left && right) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return gain[a] > gain[b]; });
  if (peaks.size() > 3) peaks.resize(3);

  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t idx : peaks) {
    double a = grid[idx == 0 ? 0 : idx - 1];
    double b = grid[std::min(idx + 1, grid.size() - 1)];
    if (!(b > a)) continue;
    // Golden-section search for the maximum on [a, b].
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = eval.max_singular_value(x1), f2 = eval.max_singular_value(x2);
    double last = std::max(f1, f2);
    for (int it = 0; it < 200; ++it) {
      if (f1 > f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = eval.max_singular_value(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = eval.max_singular_value(x2);
      }
      const double now = std::max(f1, f2);
      const bool narrow = (b - a) <= 1e-12 * std::max(1.0, std::abs(b));
      if (narrow && std::abs(now - last) <= rel_tol * 1e-3 * std::max(now, 1e-300)) break;
      last = now;
    }
    for (const auto& [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
      if (f > out.value) {
        out.value = f;
        out.peak_frequency = x;
      }
    }
  }
  if (model.domain().is_continuous()) {
    const double at_inf = static_norm(model.d());
    if (at_inf > out.value) {
      out.value = at_inf;
      out.peak_frequency = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

double weighted_error(const StateSpaceModel& plant, const StateSpaceModel& reduced,
                      const std::optional<StateSpaceModel>& w_in, const std::optional<StateSpaceModel>& w_out) {
  return hinf_norm(error_system(plant, reduced, w_in, w_out)).value;
}

std::string to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::BoundExceeded: return "bound_exceeded";
    case Violation::Kind::UnstableReduced: return "unstable_reduced";
    case Violation::Kind::IterationIncrease: return "iteration_increase";
    case Violation::Kind::MissingError: return "missing_error";
  }
  return "unknown";
}

std::vector<Violation> verify_report(const ReductionReport& report, double rel_tol) {
  std::vector<Violation> out;
  std::ostringstream os;
  os << std::setprecision(10);
  for (const auto& [r, bound] : report.bound) {
    auto it = report.measured_error.find(r);
    if (it == report.measured_error.end()) {
      if (!report.measured_error.empty()) {
        out.push_back({Violation::Kind::MissingError, r, "no measured error for r = " + std::to_string(r)});
      }
      continue;
    }
    if (!(it->second <= bound * (1.0 + rel_tol) + rel_tol)) {
      os.str("");
      os << "r = " << r << ": measured error " << it->second << " exceeds bound " << bound;
      out.push_back({Violation::Kind::BoundExceeded, r, os.str()});
    }
  }
  for (const auto& [r, model] : report.reduced) {
    if (!is_stable(model)) {
      out.push_back({Violation::Kind::UnstableReduced, r, "reduced model of order " + std::to_string(r) +
                                                              " is unstable"});
    }
  }
  for (std::size_t i = 1; i < report.iterations.size(); ++i) {
    const double prev = report.iterations[i - 1].sigma_sum;
    const double now = report.iterations[i].sigma_sum;
    if (now > prev * (1.0 + rel_tol) + 1e-12) {
      os.str("");
      os << "iteration " << i << ": sum(sigma) rose from " << prev << " to " << now;
      out.push_back({Violation::Kind::IterationIncrease, static_cast<int>(i), os.str()});
    }
  }
  return out;
}

namespace {

std::string method_label(const ReductionReport& report) { return to_string(report.method); }

}  // namespace

ComparisonTable compare_methods(const std::vector<const ReductionReport*>& reports, double tol) {
  ComparisonTable table;
  if (reports.empty()) return table;
  const auto orders = [](const ReductionReport& rep) {
    std::set<int> rs;
    for (const auto& [r, _] : rep.reduced) rs.insert(r);
    for (const auto& [r, _] : rep.bound) rs.insert(r);
    return rs;
  };
  const std::set<int> grid = orders(*reports.front());
  for (const auto* rep : reports) {
    if (orders(*rep) != grid) throw std::invalid_argument("compare_methods: reports cover different orders r");
  }
  const auto find_method = [&](Method m) -> const ReductionReport* {
    for (const auto* rep : reports) {
      if (rep->method == m) return rep;
    }
    return nullptr;
  };
  const std::pair<Method, Method> pairs[] = {{Method::GenBT, Method::ExtBT}, {Method::GenBTCT, Method::ExtBTCT}};

  for (int r : grid) {
    ComparisonRow row;
    row.r = r;
    for (const auto* rep : reports) {
      MethodEntry e;
      e.method = method_label(*rep);
      if (auto it = rep->bound.find(r); it != rep->bound.end()) e.bound = it->second;
      if (auto it = rep->measured_error.find(r); it != rep->measured_error.end()) e.error = it->second;
      row.entries.push_back(e);
    }
    for (const auto& [gen_m, ext_m] : pairs) {
      const auto* gen = find_method(gen_m);
      const auto* ext = find_method(ext_m);
      if (!gen || !ext) continue;
      auto g = gen->bound.find(r);
      auto x = ext->bound.find(r);
      if (g != gen->bound.end() && x != ext->bound.end() && x->second > g->second + tol) row.dominance_violated = true;
    }
    if (row.dominance_violated) table.flagged.push_back(r);
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_comparison_csv(const ComparisonTable& table, std::ostream& out) {
  out << "r,method,bound,error\n";
  out << std::setprecision(17);
  for (const auto& row : table.rows) {
    for (const auto& e : row.entries) {
      out << row.r << "," << e.method << ",";
      if (e.bound) out << *e.bound;
      out << ",";
      if (e.error) out << *e.error;
      out << "\n";
    }
  }
}

ComparisonTable read_comparison_csv(std::istream& in) {
  ComparisonTable table;
  std::string line;
  if (!std::getline(in, line) || line != "r,method,bound,error") {
    throw std::invalid_argument("read_comparison_csv: unexpected header");
  }
  const auto parse_opt = [](const std::string& field) -> std::optional<double> {
    if (field.empty()) return std::nullopt;
    return std::stod(field);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 4) throw std::invalid_argument("read_comparison_csv: malformed row '" + line + "'");
    const int r = std::stoi(fields[0]);
    if (table.rows.empty() || table.rows.back().r != r) table.rows.push_back(ComparisonRow{r, {}, false});
    table.rows.back().entries.push_back(MethodEntry{fields[1], parse_opt(fields[2]), parse_opt(fields[3])});
  }
  return table;
}

}  // namespace fwbt
