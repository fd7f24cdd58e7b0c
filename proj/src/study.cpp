#include "fsteta/study.hpp"

#include "fsteta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

namespace fsteta {

namespace {

constexpr double pi = std::numbers::pi;

/// u = sin(a pi t) sin(b pi x) sin(b pi y).
CaseSpec separable_case(int id, std::string description, double a, double b) {
  CaseSpec c;
  c.case_id = id;
  c.description = std::move(description);
  c.exact_u = {[a, b](double x, double y, double t) {
                 return std::sin(a * pi * t) * std::sin(b * pi * x) * std::sin(b * pi * y);
               },
               "u"};
  c.exact_grad_u.dx = {[a, b](double x, double y, double t) {
                         return std::sin(a * pi * t) * b * pi * std::cos(b * pi * x) *
                                std::sin(b * pi * y);
                       },
                       "u_x"};
  c.exact_grad_u.dy = {[a, b](double x, double y, double t) {
                         return std::sin(a * pi * t) * std::sin(b * pi * x) * b * pi *
                                std::cos(b * pi * y);
                       },
                       "u_y"};
  c.forcing = {[a, b](double x, double y, double t) {
                 const double s = std::sin(b * pi * x) * std::sin(b * pi * y);
                 return (a * pi * std::cos(a * pi * t) +
                         2.0 * b * b * pi * pi * std::sin(a * pi * t)) *
                        s;
               },
               "f"};
  c.u0 = zero_field();
  return c;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

} // namespace

CaseSpec make_case(int case_id) {
  switch (case_id) {
  case 1:
    return separable_case(1, "sin(pi t) sin(pi x) sin(pi y)", 1.0, 1.0);
  case 2:
    return separable_case(2, "sin(15 pi t) sin(pi x) sin(pi y)", 15.0, 1.0);
  case 3:
    return separable_case(3, "sin(0.5 pi t) sin(10 pi x) sin(10 pi y)", 0.5, 10.0);
  default:
    throw UsageError("unknown case id " + std::to_string(case_id) + " (expected 1, 2 or 3)");
  }
}

CaseSpec zero_case() {
  CaseSpec c;
  c.case_id = 0;
  c.description = "u = 0";
  c.exact_u = zero_field();
  c.exact_grad_u = {zero_field(), zero_field()};
  c.forcing = zero_field();
  c.u0 = zero_field();
  return c;
}

ErrorMetrics error_metrics(const FeSpace &space, const TimeGrid &grid, const FeFunction &U0,
                           const std::vector<StepRecord> &trajectory, const CaseSpec &c) {
  if (trajectory.size() != grid.num_steps())
    throw UsageError("trajectory length does not match the time grid");
  ErrorMetrics out;
  out.nodal_l2_errors.reserve(trajectory.size() + 1);
  out.nodal_l2_errors.push_back(space.field_error_l2(c.exact_u, 0.0, U0));
  double h1_sum = 0.0;
  for (const auto &rec : trajectory) {
    const double t = grid.time(rec.index);
    out.nodal_l2_errors.push_back(space.field_error_l2(c.exact_u, t, rec.u_new));
    const double grad_error = space.field_error_h1(c.exact_grad_u, t, rec.u_new);
    h1_sum += rec.k * grad_error * grad_error;
  }
  out.max_nodal_l2_error =
      *std::max_element(out.nodal_l2_errors.begin(), out.nodal_l2_errors.end());
  out.e_total = std::sqrt(out.max_nodal_l2_error * out.max_nodal_l2_error + h1_sum);
  return out;
}

std::vector<double> eoc(std::span<const double> values, std::span<const double> meshsizes) {
  if (values.size() != meshsizes.size() || values.size() < 2)
    throw UsageError("eoc needs two equally long sequences of length >= 2");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] > 0.0) || !(meshsizes[i] > 0.0))
      throw UsageError("eoc needs positive values and mesh sizes");
  std::vector<double> out;
  out.reserve(values.size() - 1);
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    out.push_back(std::log(values[i + 1] / values[i]) / std::log(meshsizes[i + 1] / meshsizes[i]));
  return out;
}

RunReport run_level(const CaseSpec &c, int level, const StudyOptions &options) {
  auto mesh = std::make_shared<const Mesh>(Mesh::uniform(level));
  SolverConfig solver;
  solver.rel_tolerance = options.solver_tolerance;
  const FeSpace space(mesh, solver);

  const std::size_t steps = std::size_t{1} << level;
  TimeGrid grid = TimeGrid::uniform(steps, options.final_time);
  const double theta = options.theta.value_or(default_theta());
  const double alpha1 = options.alpha1.value_or(default_alpha(theta));
  const double alpha2 = options.alpha2.value_or(default_alpha(theta));
  const SchemeParams params = SchemeParams::with_weights(grid, theta, alpha1, alpha2);

  const ThetaScheme scheme(space, params, c.forcing);
  const FeFunction U0 = space.l2_project(c.u0, 0.0);
  const std::vector<StepRecord> trajectory = scheme.run(U0);

  const EstimatorSet estimators(space, params, c.forcing, options.constants);
  EstimatorAccumulator acc(estimators.eta(U0), estimators.initial_error_bound(c.u0, U0));
  RunReport report;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const StepEstimates s =
        estimators.step_estimates(trajectory[i], i > 0 ? &trajectory[i - 1] : nullptr);
    report.max_compact_residual = std::max(report.max_compact_residual, s.compact_residual);
    acc.accumulate(s, trajectory[i].t_new());
  }

  const ErrorMetrics errors = error_metrics(space, grid, U0, trajectory, c);
  report.level = level;
  report.h = mesh->spacing();
  report.diameter = mesh->max_diameter();
  report.k = params.grid.step(1);
  report.steps = steps;
  report.max_nodal_l2_error = errors.max_nodal_l2_error;
  report.e_total = errors.e_total;
  report.nodal_l2_errors = errors.nodal_l2_errors;
  report.estimators = acc.current();
  report.history = acc.history();
  if (errors.max_nodal_l2_error > 0.0) {
    report.effectivity_two = report.estimators.total_two / errors.max_nodal_l2_error;
    report.effectivity_three = report.estimators.total_three / errors.max_nodal_l2_error;
  }
  return report;
}

std::vector<RunReport> run_study(const CaseSpec &c, int level_min, int level_max,
                                 const StudyOptions &options,
                                 const std::function<void(const RunReport &)> &on_report) {
  if (level_min > level_max)
    throw UsageError("empty level range");
  std::vector<RunReport> reports;
  for (int level = level_min; level <= level_max; ++level) {
    reports.push_back(run_level(c, level, options));
    if (on_report)
      on_report(reports.back());
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Tables

namespace {

struct Column {
  std::string label;
  std::function<double(const RunReport &)> value;
  bool with_eoc;
  bool integer = false;
};

Table make_table(std::string name, std::string title, const std::vector<Column> &columns,
                 const std::vector<RunReport> &reports) {
  Table table;
  table.name = std::move(name);
  table.title = std::move(title);
  table.columns.push_back("h = k");
  for (const auto &col : columns) {
    table.columns.push_back(col.label);
    if (col.with_eoc)
      table.columns.push_back("EOC");
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::vector<std::string> row{sci(reports[i].h)};
    for (const auto &col : columns) {
      const double v = col.value(reports[i]);
      if (col.integer) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        row.emplace_back(buf);
      } else {
        row.push_back(sci(v));
      }
      if (!col.with_eoc)
        continue;
      if (i == 0) {
        row.emplace_back("");
        continue;
      }
      const double prev = col.value(reports[i - 1]);
      if (prev > 0.0 && v > 0.0)
        row.push_back(fixed2(std::log(v / prev) / std::log(reports[i].h / reports[i - 1].h)));
      else
        row.emplace_back("-");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

} // namespace

std::vector<Table> build_tables(const std::vector<RunReport> &reports, VariantSelection variant) {
  const bool two = variant != VariantSelection::three;
  const bool three = variant != VariantSelection::two;
  auto pick = [](bool keep, std::vector<Column> cols) { return keep ? cols : std::vector<Column>{}; };
  auto concat = [](std::vector<std::vector<Column>> parts) {
    std::vector<Column> out;
    for (auto &p : parts)
      out.insert(out.end(), p.begin(), p.end());
    return out;
  };

  std::vector<Table> tables;
  tables.push_back(make_table(
      "errors", "Errors",
      concat({{{"max_n ||e^n||", [](const RunReport &r) { return r.max_nodal_l2_error; }, true},
               {"e_total(t^N)", [](const RunReport &r) { return r.e_total; }, true}},
              pick(two, {{"E_N", [](const RunReport &r) { return r.estimators.total_two; }, false},
                         {"EI(t^N)", [](const RunReport &r) { return r.effectivity_two; }, false,
                          true}}),
              pick(three,
                   {{"E~_N", [](const RunReport &r) { return r.estimators.total_three; }, false},
                    {"EI~(t^N)", [](const RunReport &r) { return r.effectivity_three; }, false,
                     true}})}),
      reports));
  tables.push_back(make_table(
      "reconstruction", "Reconstruction Error Estimators",
      concat({{{"E_ell", [](const RunReport &r) { return r.estimators.E_ell; }, true}},
              pick(two, {{"E_rec(w)", [](const RunReport &r) { return r.estimators.E_rec_two; },
                          true}}),
              pick(three, {{"E_rec(w~)",
                            [](const RunReport &r) { return r.estimators.E_rec_three; }, true}})}),
      reports));
  tables.push_back(make_table(
      "time", "Time Estimators",
      concat({pick(two, {{"E_T1(w)", [](const RunReport &r) { return r.estimators.E_T1_two; },
                          true}}),
              pick(three, {{"E_T1(w~)", [](const RunReport &r) { return r.estimators.E_T1_three; },
                            true}}),
              {{"E_T2", [](const RunReport &r) { return r.estimators.E_T2; }, true}},
              pick(three, {{"E_T3", [](const RunReport &r) { return r.estimators.E_T3; }, true}})}),
      reports));
  tables.push_back(make_table(
      "space", "Space Estimators",
      concat({pick(two, {{"E_S1(w)", [](const RunReport &r) { return r.estimators.E_S1_two; },
                          true}}),
              pick(three, {{"E_S1(w~)", [](const RunReport &r) { return r.estimators.E_S1_three; },
                            true}}),
              {{"E_S2", [](const RunReport &r) { return r.estimators.E_S2; }, true}}}),
      reports));
  return tables;
}

std::string render(const Table &table, TableFormat format) {
  std::ostringstream out;
  if (format == TableFormat::csv) {
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto &row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << row[i];
      out << '\n';
    }
    return out.str();
  }
  out << "### " << table.title << "\n\n|";
  for (const auto &c : table.columns)
    out << ' ' << c << " |";
  out << "\n|";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << "---|";
  out << '\n';
  for (const auto &row : table.rows) {
    out << '|';
    for (const auto &cell : row)
      out << ' ' << cell << " |";
    out << '\n';
  }
  return out.str();
}

void emit(const std::vector<RunReport> &reports, TableFormat format,
          const std::filesystem::path &out_dir, VariantSelection variant) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " +
                             ec.message());
  auto open = [](const std::filesystem::path &path) {
    std::ofstream file(path);
    if (!file)
      throw std::runtime_error("cannot write " + path.string());
    return file;
  };
  const char *ext = format == TableFormat::csv ? ".csv" : ".md";
  for (const auto &table : build_tables(reports, variant)) {
    auto file = open(out_dir / (table.name + ext));
    file << render(table, format);
  }
  for (const auto &report : reports) {
    auto file = open(out_dir / ("estimators_L" + std::to_string(report.level) + ".csv"));
    write_estimator_csv(file, report.history);
  }
}

// ---------------------------------------------------------------------------
// Checks

std::vector<CheckResult> check_reports(const std::vector<RunReport> &reports, int case_id) {
  std::vector<CheckResult> out;
  for (const auto &r : reports) {
    for (const Variant v : {Variant::two_level, Variant::three_level}) {
      const double bound = r.estimators.bound(v);
      const bool ok = bound >= r.max_nodal_l2_error;
      std::string detail = "bound " + sci(bound) + " vs error " + sci(r.max_nodal_l2_error);
      if (!ok)
        detail += " (violation factor " + fixed2(r.max_nodal_l2_error / bound) + ")";
      out.push_back({std::string("reliability ") +
                         (v == Variant::two_level ? "two-level" : "three-level") + " L" +
                         std::to_string(r.level),
                     ok, detail});
    }
  }
  if (case_id != 1)
    return out;

  std::vector<const RunReport *> fine;
  for (const auto &r : reports)
    if (r.level >= 4)
      fine.push_back(&r);
  if (fine.size() < 2)
    return out;

  auto orders = [&](auto getter) {
    std::vector<double> values, h;
    for (const auto *r : fine) {
      values.push_back(getter(*r));
      h.push_back(r->h);
    }
    return eoc(values, h);
  };
  auto check_range = [&](const std::string &name, auto getter, double lo, double hi) {
    const auto e = orders(getter);
    const auto [mn, mx] = std::minmax_element(e.begin(), e.end());
    out.push_back({name + " EOC", *mn >= lo && *mx <= hi,
                   "range [" + fixed2(*mn) + ", " + fixed2(*mx) + "], required [" + fixed2(lo) +
                       ", " + fixed2(hi) + "]"});
  };

  check_range("error", [](const RunReport &r) { return r.max_nodal_l2_error; }, 1.85, 2.15);
  check_range("e_total", [](const RunReport &r) { return r.e_total; }, 0.9, 1.1);
  const double big = 1e9;
  check_range("E_ell", [](const RunReport &r) { return r.estimators.E_ell; }, 1.85, big);
  check_range("E_rec(w)", [](const RunReport &r) { return r.estimators.E_rec_two; }, 1.85, big);
  check_range("E_rec(w~)", [](const RunReport &r) { return r.estimators.E_rec_three; }, 1.85, big);
  check_range("E_T1(w)", [](const RunReport &r) { return r.estimators.E_T1_two; }, 1.85, big);
  check_range("E_T1(w~)", [](const RunReport &r) { return r.estimators.E_T1_three; }, 1.85, big);
  check_range("E_T2", [](const RunReport &r) { return r.estimators.E_T2; }, 1.85, big);
  check_range("E_T3", [](const RunReport &r) { return r.estimators.E_T3; }, 1.85, big);
  check_range("E_S1(w)", [](const RunReport &r) { return r.estimators.E_S1_two; }, 2.5, big);
  check_range("E_S1(w~)", [](const RunReport &r) { return r.estimators.E_S1_three; }, 2.5, big);
  check_range("E_S2", [](const RunReport &r) { return r.estimators.E_S2; }, 1.85, big);

  for (const Variant v : {Variant::two_level, Variant::three_level}) {
    double lo = big, hi = 0.0;
    for (const auto *r : fine) {
      const double ei = v == Variant::two_level ? r->effectivity_two : r->effectivity_three;
      lo = std::min(lo, ei);
      hi = std::max(hi, ei);
    }
    out.push_back({std::string("effectivity drift ") +
                       (v == Variant::two_level ? "two-level" : "three-level"),
                   hi <= 2.0 * lo, "max/min = " + fixed2(hi / lo) + ", required <= 2"});
  }
  return out;
}

} // namespace fsteta
