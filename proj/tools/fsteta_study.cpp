// Convergence study driver: runs the fractional-step theta scheme with the
// reconstruction estimators over a range of uniform levels and writes the
// error / estimator tables.

#include "fsteta/errors.hpp"
#include "fsteta/study.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

std::pair<int, int> parse_levels(const std::string &text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const int level = std::stoi(text);
      return {level, level};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception &) {
    throw fsteta::UsageError("--levels expects A:B, got '" + text + "'");
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Fractional-step theta scheme: a posteriori estimator convergence study"};

  int case_id = 1;
  std::string levels = "3:7";
  std::string theta_text = "auto";
  std::optional<double> alpha1, alpha2;
  std::vector<std::string> constants;
  double solver_tol = 1e-12;
  std::string format = "csv";
  std::string out_dir = "study_out";
  std::string variant = "both";
  std::string mesh_dump;
  bool check = false;

  app.add_option("--case", case_id, "Manufactured solution")->check(CLI::IsMember({1, 2, 3}));
  app.add_option("--levels", levels, "Refinement levels A:B (h = k = 2^-level)");
  app.add_option("--alpha1", alpha1, "Operator splitting weight alpha1 in (1/2, 1]");
  app.add_option("--alpha2", alpha2, "Data splitting weight alpha2 in (0, 1)");
  app.add_option("--theta", theta_text, "'auto' (1 - sqrt(2)/2) or a value in (0, 1/3)");
  app.add_option("--const", constants, "Estimator constant NAME=V (c1, c11, C11, C12, C22)");
  app.add_option("--solver-tol", solver_tol, "CG relative tolerance");
  app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "md"}));
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--variant", variant, "Reconstruction variant(s) in the tables")
      ->check(CLI::IsMember({"two", "three", "both"}));
  app.add_option("--dump-mesh", mesh_dump, "Write the finest mesh as plain text to this file");
  app.add_flag("--check", check, "Assert reliability and convergence orders; exit 1 on failure");

  CLI11_PARSE(app, argc, argv);

  try {
    fsteta::StudyOptions options;
    options.solver_tolerance = solver_tol;
    if (theta_text != "auto")
      options.theta = std::stod(theta_text);
    options.alpha1 = alpha1;
    options.alpha2 = alpha2;
    for (const auto &entry : constants) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos)
        throw fsteta::UsageError("--const expects NAME=V, got '" + entry + "'");
      options.constants.set(entry.substr(0, eq), std::stod(entry.substr(eq + 1)));
    }
    const auto [level_min, level_max] = parse_levels(levels);
    const auto table_format =
        format == "csv" ? fsteta::TableFormat::csv : fsteta::TableFormat::markdown;
    const auto selection = variant == "two"     ? fsteta::VariantSelection::two
                           : variant == "three" ? fsteta::VariantSelection::three
                                                : fsteta::VariantSelection::both;

    const fsteta::CaseSpec spec = fsteta::make_case(case_id);
    std::cerr << "case " << case_id << ": u = " << spec.description << '\n';
    const double theta = options.theta.value_or(fsteta::default_theta());
    const double a1 = options.alpha1.value_or(fsteta::default_alpha(theta));
    const double a2 = options.alpha2.value_or(fsteta::default_alpha(theta));
    for (const double alpha : {a1, a2}) {
      if (fsteta::quadrature_exactness_check(alpha, theta) > 1e-12)
        std::cerr << "warning: theta = " << theta << ", alpha = " << alpha
                  << " is not linearly exact; the compact form and the bounds do not hold\n";
      if (a1 == a2)
        break;
    }

    std::vector<fsteta::RunReport> reports;
    try {
      fsteta::run_study(spec, level_min, level_max, options, [&](const fsteta::RunReport &r) {
        reports.push_back(r);
        std::fprintf(stderr, "  level %d: h = k = %.4e, error %.4e, compact residual %.1e\n",
                     r.level, r.h, r.max_nodal_l2_error, r.max_compact_residual);
      });
    } catch (...) {
      if (!reports.empty())
        fsteta::emit(reports, table_format, out_dir, selection);
      throw;
    }

    fsteta::emit(reports, table_format, out_dir, selection);
    for (const auto &table : fsteta::build_tables(reports, selection))
      std::cout << fsteta::render(table, fsteta::TableFormat::markdown) << '\n';

    if (!mesh_dump.empty()) {
      std::ofstream file(mesh_dump);
      if (!file)
        throw std::runtime_error("cannot write " + mesh_dump);
      fsteta::Mesh::uniform(level_max).write_text(file);
    }

    if (check) {
      bool all = true;
      for (const auto &result : fsteta::check_reports(reports, case_id)) {
        std::cout << (result.passed ? "PASS " : "FAIL ") << result.name << ": " << result.detail
                  << '\n';
        all = all && result.passed;
      }
      return all ? 0 : 1;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
