#pragma once

#include <fstream>
#include <iostream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blaschke/compose.hpp"
#include "blaschke/report.hpp"

namespace blaschke::cli {

inline constexpr int kDegreeCap = 16;

namespace detail {

inline std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(path);
  if (!f) throw InvalidInputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline BlaschkeProduct load_product(const std::string& path, const Tolerances& tol) {
  try {
    return product_from_json(read_input(path), tol);
  } catch (const InvalidInputError& e) {
    throw InvalidInputError(path + ": " + e.what());
  }
}

}  // namespace detail

/// Run one CLI invocation. Exit codes: 0 success, 1 invalid input,
/// 2 numerical failure, 3 declined (caps exceeded).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"monodromy groups and compositional factorizations of finite Blaschke products"};
  app.require_subcommand(1);

  bool json = false, pretty = false;
  double tol_residual = 1e-8;
  std::uint64_t seed = 0;
  int grid = 200;
  app.add_flag("--json", json, "emit JSON instead of a text summary");
  app.add_flag("--pretty", pretty, "pretty-print JSON output");
  app.add_option("--tol", tol_residual, "residual tolerance for verification (default 1e-8)");
  app.add_option("--seed", seed, "seed for generated inputs and random grid points");
  app.add_option("--grid", grid, "number of verification grid points (default 200)");

  std::string file_a, file_b, file_c;
  CLI::App* analyze_cmd = app.add_subcommand("analyze", "full monodromy and factorization report");
  analyze_cmd->add_option("file", file_a, "product JSON file, or - for stdin")->required();
  CLI::App* factor_cmd = app.add_subcommand("factor", "construct all nontrivial factorizations");
  factor_cmd->add_option("file", file_a, "product JSON file, or - for stdin")->required();
  CLI::App* compose_cmd = app.add_subcommand("compose", "compose two products");
  compose_cmd->add_option("outer", file_a, "outer product JSON file")->required();
  compose_cmd->add_option("inner", file_b, "inner product JSON file")->required();
  int degree = 0;
  double radius = 0.8;
  CLI::App* random_cmd = app.add_subcommand("random", "write a seeded random product");
  random_cmd->add_option("--degree", degree, "degree of the product")->required();
  random_cmd->add_option("--radius", radius, "zeros are drawn uniformly in |z| <= radius");
  CLI::App* verify_cmd = app.add_subcommand("verify", "check b = outer o inner on a grid");
  verify_cmd->add_option("product", file_a, "product JSON file")->required();
  verify_cmd->add_option("outer", file_b, "outer factor JSON file")->required();
  verify_cmd->add_option("inner", file_c, "inner factor JSON file")->required();

  try {
    std::vector<const char*> argv;
    argv.push_back("blaschke");
    for (const std::string& a : args) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  Tolerances tol;
  tol.residual = tol_residual;

  try {
    if (*analyze_cmd || *factor_cmd) {
      const BlaschkeProduct b = detail::load_product(file_a, tol);
      if (b.degree() > kDegreeCap)
        throw DeclinedError("degree " + std::to_string(b.degree()) + " exceeds the cap of " +
                            std::to_string(kDegreeCap));
      if (*factor_cmd) {
        // factor output is always structured
        const FactorizeOutcome fo = (b.degree() >= 2)
                                        ? factorize_all(b, tol, seed, grid)
                                        : FactorizeOutcome{};
        out << factor_report_json(b, fo, pretty) << "\n";
      } else {
        if (b.degree() < 2)
          throw InvalidInputError("analyze requires degree >= 2");
        const AnalysisReport report = analyze(b, tol, seed, grid);
        if (json)
          out << analysis_report_json(report, pretty) << "\n";
        else
          out << analysis_report_text(report);
      }
      return 0;
    }
    if (*compose_cmd) {
      const BlaschkeProduct outer = detail::load_product(file_a, tol);
      const BlaschkeProduct inner = detail::load_product(file_b, tol);
      out << product_to_json(compose(outer, inner, tol), pretty) << "\n";
      return 0;
    }
    if (*random_cmd) {
      if (degree < 1) throw InvalidInputError("--degree must be positive");
      if (radius <= 0.0 || radius >= 1.0)
        throw InvalidInputError("--radius must lie in (0, 1)");
      Rng rng(seed);
      BlaschkeProduct b;
      b.lambda = rng.unimodular();
      for (int i = 0; i < degree; ++i) b.zeros.push_back(rng.in_disk(radius));
      out << product_to_json(b, pretty) << "\n";
      return 0;
    }
    if (*verify_cmd) {
      const BlaschkeProduct b = detail::load_product(file_a, tol);
      const BlaschkeProduct outer = detail::load_product(file_b, tol);
      const BlaschkeProduct inner = detail::load_product(file_c, tol);
      const bool degree_ok = outer.degree() * inner.degree() == b.degree();
      double residual = std::numeric_limits<double>::infinity();
      if (degree_ok)
        residual = composition_residual(b, outer, inner, verification_grid(grid, seed), tol);
      const bool pass = degree_ok && residual <= tol.residual;
      JsonWriter w(pretty);
      w.begin_object();
      w.key("pass").value(pass);
      w.key("degree_law").value(degree_ok);
      if (degree_ok) w.key("residual").value(residual);
      w.key("tolerance").value(tol.residual);
      w.end_object();
      out << w.str() << "\n";
      return pass ? 0 : 2;
    }
  } catch (const InvalidInputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DeclinedError& e) {
    err << "declined: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace blaschke::cli
