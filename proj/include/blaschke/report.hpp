#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "blaschke/factorize.hpp"
#include "blaschke/io.hpp"
#include "blaschke/permutation.hpp"

namespace blaschke {

/// Full analysis of one product: pipeline outputs plus the normal-subgroup
/// lattice and wall-clock timings. Deterministic apart from the timings.
struct AnalysisReport {
  BlaschkeProduct input;
  FactorizeOutcome pipeline;
  NormalSubgroupReport normal;
  double factorize_ms = 0.0;
  double normal_subgroups_ms = 0.0;
};

inline AnalysisReport analyze(const BlaschkeProduct& b,
                              const Tolerances& tol = default_tolerances(),
                              std::uint64_t grid_seed = 0, int grid_size = 200) {
  AnalysisReport report;
  report.input = b;
  const auto t0 = std::chrono::steady_clock::now();
  report.pipeline = factorize_all(b, tol, grid_seed, grid_size);
  const auto t1 = std::chrono::steady_clock::now();
  report.normal = normal_subgroups(report.pipeline.group);
  const auto t2 = std::chrono::steady_clock::now();
  report.factorize_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  report.normal_subgroups_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  return report;
}

inline void write_block_system(JsonWriter& w, const BlockSystem& bs) {
  w.begin_object();
  w.key("blocks").begin_array();
  for (const auto& block : bs.blocks) {
    w.begin_array();
    for (int pt : block) w.value(pt + 1);  // 1-indexed labels in reports
    w.end_array();
  }
  w.end_array();
  w.key("block_size").value(bs.block_size);
  w.key("block_count").value(bs.block_count);
  w.end_object();
}

inline void write_factorization(JsonWriter& w, const Factorization& f) {
  w.begin_object();
  w.key("outer");
  write_product(w, f.outer);
  w.key("inner");
  write_product(w, f.inner);
  w.key("block_system");
  write_block_system(w, f.source_system);
  w.key("residual").value(f.residual);
  w.key("canonical").value(f.canonical);
  w.end_object();
}

inline void write_factorization_list(JsonWriter& w, const FactorizeOutcome& out) {
  w.key("factorizations").begin_array();
  for (const Factorization& f : out.factorizations) write_factorization(w, f);
  w.end_array();
  w.key("errors").begin_array();
  for (const SystemError& e : out.errors) {
    w.begin_object();
    w.key("block_system");
    write_block_system(w, e.system);
    w.key("message").value(e.message);
    if (std::isfinite(e.best_residual)) w.key("best_residual").value(e.best_residual);
    w.end_object();
  }
  w.end_array();
}

inline std::string factor_report_json(const BlaschkeProduct& input, const FactorizeOutcome& out,
                                      bool pretty) {
  JsonWriter w(pretty);
  w.begin_object();
  w.key("input");
  write_product(w, input);
  w.key("degree").value(input.degree());
  write_factorization_list(w, out);
  w.end_object();
  return w.str();
}

inline std::string analysis_report_json(const AnalysisReport& report, bool pretty) {
  JsonWriter w(pretty);
  const FactorizeOutcome& p = report.pipeline;
  w.begin_object();
  w.key("input");
  write_product(w, report.input);
  w.key("degree").value(report.input.degree());
  w.key("normalization").begin_object();
  w.key("a").value(p.normalization.m.a);
  w.key("rot").value(p.normalization.m.rot);
  w.end_object();
  w.key("critical_points").begin_array();
  for (const Complex& z : p.critical.critical_points) w.value(z);
  w.end_array();
  w.key("critical_values").begin_array();
  for (const Complex& z : p.critical.critical_values) w.value(z);
  w.end_array();
  w.key("base_point").value(p.monodromy.base_point);
  w.key("base_fiber").begin_array();
  for (const Complex& z : p.monodromy.base_fiber) w.value(z);
  w.end_array();
  w.key("punctures").begin_array();
  for (const Complex& z : p.monodromy.punctures) w.value(z);
  w.end_array();
  w.key("generators").begin_array();
  for (const Permutation& g : p.monodromy.generators) {
    w.begin_object();
    w.key("cycles").value(g.cycle_string());
    w.key("images").begin_array();
    for (int v : g.images) w.value(v);
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.key("group_order").value(p.group.order);
  w.key("transitive").value(is_transitive(p.group));
  w.key("abelian").value(p.group.abelian);
  w.key("block_systems").begin_array();
  for (const BlockSystem& bs : p.systems) write_block_system(w, bs);
  w.end_array();
  w.key("trivial_block_systems").value(2);
  w.key("normal_subgroups_declined").value(report.normal.declined);
  w.key("normal_subgroup_orders").begin_array();
  for (const SubgroupDescriptor& d : report.normal.subgroups) w.value(d.order);
  w.end_array();
  write_factorization_list(w, p);
  w.key("timings").begin_object();
  w.key("factorize_ms").value(report.factorize_ms);
  w.key("normal_subgroups_ms").value(report.normal_subgroups_ms);
  w.end_object();
  w.end_object();
  return w.str();
}

inline std::string describe_product(const BlaschkeProduct& b) {
  std::string s = "degree " + std::to_string(b.degree()) + ", lambda = (" +
                  format_double(b.lambda.real()) + ", " + format_double(b.lambda.imag()) + ")";
  return s;
}

inline std::string analysis_report_text(const AnalysisReport& report) {
  const FactorizeOutcome& p = report.pipeline;
  std::string s;
  s += "input: " + describe_product(report.input) + "\n";
  s += "critical values: " + std::to_string(p.critical.critical_values.size()) + " distinct (" +
       std::to_string(p.critical.critical_points.size()) + " critical points)\n";
  s += "monodromy generators:\n";
  for (std::size_t i = 0; i < p.monodromy.generators.size(); ++i)
    s += "  loop " + std::to_string(i + 1) + ": " + p.monodromy.generators[i].cycle_string() + "\n";
  s += "group order: " + std::to_string(p.group.order) +
       (p.group.abelian ? " (abelian)" : "") + "\n";
  s += "block systems: " + std::to_string(p.systems.size()) + " nontrivial\n";
  for (const BlockSystem& bs : p.systems) {
    s += "  ";
    for (const auto& block : bs.blocks) {
      s += "{";
      for (std::size_t i = 0; i < block.size(); ++i)
        s += (i ? " " : "") + std::to_string(block[i] + 1);
      s += "}";
    }
    s += "\n";
  }
  if (report.normal.declined)
    s += "normal subgroups: declined (order above enumeration cap)\n";
  else {
    s += "normal subgroup orders:";
    for (const SubgroupDescriptor& d : report.normal.subgroups)
      s += " " + std::to_string(d.order);
    s += "\n";
  }
  s += "factorizations: " + std::to_string(p.factorizations.size()) + "\n";
  for (const Factorization& f : p.factorizations)
    s += "  outer degree " + std::to_string(f.outer.degree()) + " o inner degree " +
         std::to_string(f.inner.degree()) + "  (residual " + format_double(f.residual) + ")\n";
  for (const SystemError& e : p.errors) s += "  error: " + e.message + "\n";
  return s;
}

}  // namespace blaschke
