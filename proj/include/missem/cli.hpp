#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "missem/density.hpp"
#include "missem/impute.hpp"
#include "missem/ingest.hpp"
#include "missem/model_spec.hpp"
#include "missem/report.hpp"
#include "missem/verify.hpp"
#include "missem/version.hpp"

namespace missem {

namespace cli_detail {

struct Options {
  std::string model_path;
  std::string data_path;
  std::string out_path;
  std::string missing_marker = "NA";
  std::string mode = "F";
  std::string format = "text";
  std::uint64_t seed = 0;
  std::uint64_t m = 1000;
  double tolerance = 0.0;  // 0 = use the model file's tolerance
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write \"" + path + "\"");
  f << content;
}

inline double effective_tolerance(const Options& opt, const ModelDocument& model) {
  return opt.tolerance > 0.0 ? opt.tolerance : model.tolerance;
}

// Collapses per-event reports into one row: pass when every applicable event
// passed, worst deviation across them, first witnesses kept.
inline IdentityReport merge_reports(const std::string& name,
                                    const std::vector<IdentityReport>& reports) {
  IdentityReport merged;
  merged.identity = name;
  std::size_t applicable = 0;
  bool all_pass = true;
  for (const auto& r : reports) {
    if (!r.applicable) continue;
    ++applicable;
    all_pass = all_pass && r.pass;
    if (r.max_abs_deviation > merged.max_abs_deviation) {
      merged.max_abs_deviation = r.max_abs_deviation;
    }
    for (const auto& w : r.witnesses) {
      if (merged.witnesses.size() < 8) merged.witnesses.push_back(w);
    }
  }
  merged.applicable = applicable > 0;
  merged.pass = merged.applicable && all_pass;
  merged.notes.push_back(std::to_string(applicable) + " of " + std::to_string(reports.size()) +
                         " events applicable");
  return merged;
}

inline report_json base_document(const std::string& command, const Options& opt, double tolerance) {
  report_json doc;
  doc["tool"] = tool_block(tolerance);
  doc["command"] = command;
  report_json inputs;
  if (!opt.model_path.empty()) inputs["model"] = opt.model_path;
  if (!opt.data_path.empty()) inputs["data"] = opt.data_path;
  inputs["seed"] = opt.seed;
  doc["inputs"] = std::move(inputs);
  return doc;
}

inline void emit_document(const Options& opt, const report_json& doc, std::ostream& out,
                          bool include_stdout) {
  const std::string text = doc.dump(2) + "\n";
  if (!opt.out_path.empty()) write_file(opt.out_path, text);
  if (include_stdout) out << text;
}

struct MarScan {
  bool everywhere_mar = false;
  std::optional<MarViolation> violation;
};

inline MarScan scan_mar(const ModelDocument& model, double tol) {
  MarScan s;
  s.everywhere_mar = is_mar_everywhere(ModelFamily({{"model", model.density}}), tol);
  s.violation = find_mar_violation(model.density, tol);
  return s;
}

inline report_json violation_json(const ModelSpace& ms, const MarViolation& v) {
  report_json j;
  j["pattern"] = v.event.pattern.to_string();
  j["observed"] = report_json::array();
  for (std::size_t i = 0; i < v.event.observed.size(); ++i) {
    j["observed"].push_back(
        {{"coordinate", v.event.observed.coords[i]},
         {"value", ms.domain(v.event.observed.coords[i]).label(v.event.observed.values[i])}});
  }
  j["deviation"] = v.deviation;
  return j;
}

struct IdentityRun {
  IdentityReport obs_paths;
  IdentityReport mar_chain;
  IdentityReport marginal_removed;
  IdentityReport marginal_removed_reweighted;
  std::size_t events_total = 0;
  std::size_t events_positive = 0;
  std::size_t events_mechanism_constant = 0;
  bool pass = false;
};

inline IdentityRun run_identities(const ModelDocument& model, double tol) {
  const FullDensity& h = model.density;
  const ModelSpace& ms = model.space;
  IdentityRun run;
  run.obs_paths = verify_obs_density_paths(h, tol);

  const auto f = marginal_f(h);
  std::vector<double> g(ms.omega_size(), 0.0);
  for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) {
    if (f[yi] <= 0.0) continue;
    for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
      g[yi * ms.num_patterns() + j] = h.prob(j, yi) / f[yi];
    }
  }

  std::vector<IdentityReport> chain, removed, reweighted;
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    for (const auto& e : event_partition(ms, ms.patterns()[j])) {
      ++run.events_total;
      if (h.event_mass(e) <= 0.0) continue;
      ++run.events_positive;
      if (!is_mar_at(ms, g, e, tol)) continue;  // conditional identities need a constant mechanism
      ++run.events_mechanism_constant;
      chain.push_back(verify_mar_identity(h, e, tol));
      removed.push_back(verify_marginal_removed(h, e, tol));
      reweighted.push_back(verify_marginal_removed_reweighted(h, e, tol));
    }
  }
  run.mar_chain = merge_reports("mar-conditional-chain", chain);
  run.marginal_removed = merge_reports("marginal-removed", removed);
  run.marginal_removed_reweighted = merge_reports("marginal-removed-reweighted", reweighted);

  // classification is structural; it throws on impossibility, so reaching
  // here means every extraction pattern classified cleanly
  for (const auto& r : ms.patterns()) classify_mixture_components(ms, r);

  auto ok = [](const IdentityReport& r) { return !r.applicable || r.pass; };
  run.pass = run.obs_paths.pass && ok(run.mar_chain) && ok(run.marginal_removed) &&
             ok(run.marginal_removed_reweighted);
  return run;
}

inline report_json identities_json(const IdentityRun& run) {
  report_json j;
  j["obs_density_paths"] = to_json(run.obs_paths);
  j["events"] = {{"total", run.events_total},
                 {"positive_mass", run.events_positive},
                 {"mechanism_constant", run.events_mechanism_constant}};
  j["mar_conditional_chain"] = to_json(run.mar_chain);
  j["marginal_removed"] = to_json(run.marginal_removed);
  j["marginal_removed_reweighted"] = to_json(run.marginal_removed_reweighted);
  return j;
}

inline void identities_text(std::ostream& out, const IdentityRun& run) {
  render_text(out, run.obs_paths);
  out << "events: " << run.events_total << " total, " << run.events_positive
      << " with positive mass, " << run.events_mechanism_constant << " mechanism-constant\n";
  render_text(out, run.mar_chain);
  render_text(out, run.marginal_removed);
  render_text(out, run.marginal_removed_reweighted);
}

inline int cmd_patterns(const Options& opt, std::ostream& out) {
  std::optional<ModelDocument> model;
  if (!opt.model_path.empty()) model = load_model(opt.model_path);
  IngestOptions io{opt.missing_marker, true};
  const auto summary = ingest_csv_file(opt.data_path, io, model ? &*model : nullptr);

  report_json doc = base_document("patterns", opt, opt.tolerance > 0 ? opt.tolerance
                                                                     : kDefaultTolerance);
  doc["results"] = to_json(summary);
  doc["status"] = "pass";
  if (opt.format == "machine") {
    emit_document(opt, doc, out, true);
  } else {
    emit_document(opt, doc, out, false);
    render_text(out, summary);
  }
  return 0;
}

inline int cmd_check_mar(const Options& opt, std::ostream& out) {
  const auto model = load_model(opt.model_path);
  const double tol = effective_tolerance(opt, model);
  const auto scan = scan_mar(model, tol);
  const bool pass = scan.everywhere_mar && !scan.violation;

  report_json doc = base_document("check-mar", opt, tol);
  doc["results"]["everywhere_mar"] = scan.everywhere_mar;
  doc["results"]["violation"] =
      scan.violation ? violation_json(model.space, *scan.violation) : report_json(nullptr);
  doc["status"] = pass ? "pass" : "fail";
  if (opt.format == "machine") {
    emit_document(opt, doc, out, true);
  } else {
    emit_document(opt, doc, out, false);
    out << "everywhere MAR: " << (scan.everywhere_mar ? "yes" : "no") << "\n";
    if (scan.violation) {
      out << "violation at event(r=" << scan.violation->event.pattern.to_string()
          << ", ob=" << model.space.render(scan.violation->event.observed)
          << ") deviation = " << scan.violation->deviation << "\n";
    }
    out << "status: " << (pass ? "pass" : "fail") << "\n";
  }
  return pass ? 0 : 1;
}

inline int cmd_verify_identities(const Options& opt, std::ostream& out) {
  const auto model = load_model(opt.model_path);
  const double tol = effective_tolerance(opt, model);
  const auto run = run_identities(model, tol);

  report_json doc = base_document("verify-identities", opt, tol);
  doc["results"] = identities_json(run);
  doc["status"] = run.pass ? "pass" : "fail";
  if (opt.format == "machine") {
    emit_document(opt, doc, out, true);
  } else {
    emit_document(opt, doc, out, false);
    identities_text(out, run);
    out << "status: " << (run.pass ? "pass" : "fail") << "\n";
  }
  return run.pass ? 0 : 1;
}

inline int cmd_impute(const Options& opt, std::ostream& out) {
  const auto model = load_model(opt.model_path);
  const double tol = effective_tolerance(opt, model);
  IngestOptions io{opt.missing_marker, true};
  const auto real = read_realized_row(opt.data_path, io, model);
  const auto chain = opt.mode == "F" ? impute_F(model.density, real, opt.m, opt.seed)
                                     : impute_T(model.density, real, opt.m, opt.seed);
  if (opt.format == "machine") {
    report_json doc = base_document("impute", opt, tol);
    doc["inputs"]["mode"] = opt.mode;
    doc["inputs"]["m"] = opt.m;
    doc["results"] = chain_to_json(chain, model);
    doc["status"] = "pass";
    emit_document(opt, doc, out, true);
  } else {
    const std::string csv = chain_to_csv(chain, model, opt.model_path, tol);
    if (!opt.out_path.empty()) {
      write_file(opt.out_path, csv);
      out << "wrote " << chain.length() << " draws to " << opt.out_path << "\n";
    } else {
      out << csv;
    }
  }
  return 0;
}

inline int cmd_report(const Options& opt, std::ostream& out) {
  const auto model = load_model(opt.model_path);
  const double tol = effective_tolerance(opt, model);
  const auto run = run_identities(model, tol);
  const auto scan = scan_mar(model, tol);
  std::optional<IngestSummary> summary;
  if (!opt.data_path.empty()) {
    IngestOptions io{opt.missing_marker, true};
    summary = ingest_csv_file(opt.data_path, io, &model);
  }
  const bool pass = run.pass && scan.everywhere_mar && !scan.violation;

  report_json doc = base_document("report", opt, tol);
  doc["results"]["identities"] = identities_json(run);
  doc["results"]["everywhere_mar"] = scan.everywhere_mar;
  doc["results"]["violation"] =
      scan.violation ? violation_json(model.space, *scan.violation) : report_json(nullptr);
  if (summary) doc["results"]["ingest"] = to_json(*summary);
  doc["status"] = pass ? "pass" : "fail";
  if (opt.format == "machine") {
    emit_document(opt, doc, out, true);
  } else {
    emit_document(opt, doc, out, false);
    identities_text(out, run);
    out << "everywhere MAR: " << (scan.everywhere_mar ? "yes" : "no") << "\n";
    if (scan.violation) {
      out << "violation at event(r=" << scan.violation->event.pattern.to_string()
          << ", ob=" << model.space.render(scan.violation->event.observed)
          << ") deviation = " << scan.violation->deviation << "\n";
    }
    if (summary) render_text(out, *summary);
    out << "status: " << (pass ? "pass" : "fail") << "\n";
  }
  return pass ? 0 : 1;
}

}  // namespace cli_detail

// Parses and executes one command line (without the program name). Exit
// status: 0 all checks pass, 1 a verification failed, 2 input/usage error.
inline int run_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
  cli_detail::Options opt;
  CLI::App app{"finite-discrete semantics of incomplete data"};
  app.name(kToolName);

  auto add_common = [&](CLI::App* cmd, bool needs_model, bool needs_data) {
    auto* m = cmd->add_option("--model", opt.model_path, "model-spec document (JSON)");
    if (needs_model) m->required();
    auto* d = cmd->add_option("--data", opt.data_path, "incomplete dataset (CSV)");
    if (needs_data) d->required();
    cmd->add_option("--missing-marker", opt.missing_marker, "cell text treated as missing");
    cmd->add_option("--tolerance", opt.tolerance, "numeric tolerance override")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", opt.out_path, "write the structured report / chain here");
    cmd->add_option("--format", opt.format, "text | machine")
        ->check(CLI::IsMember({"text", "machine"}));
  };

  auto* patterns = app.add_subcommand("patterns", "ingest a CSV and report its pattern lattice");
  add_common(patterns, false, true);
  auto* checkmar = app.add_subcommand("check-mar", "decide everywhere-MAR and locate violations");
  add_common(checkmar, true, false);
  auto* verify = app.add_subcommand("verify-identities", "run every density identity check");
  add_common(verify, true, false);
  auto* impute = app.add_subcommand("impute", "draw a seeded imputation chain for one data row");
  add_common(impute, true, true);
  impute->add_option("--mode", opt.mode, "F (fixed pattern) or T (redrawn pattern)")
      ->check(CLI::IsMember({"F", "T"}));
  impute->add_option("--m", opt.m, "chain length");
  impute->add_option("--seed", opt.seed, "RNG stream seed");
  auto* report = app.add_subcommand("report", "full bundle: identities, MAR scan, ingestion");
  add_common(report, true, false);
  app.require_subcommand(1);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back(kToolName);
  for (const auto& a : args) argv_storage.push_back(a);
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (patterns->parsed()) return cli_detail::cmd_patterns(opt, out);
    if (checkmar->parsed()) return cli_detail::cmd_check_mar(opt, out);
    if (verify->parsed()) return cli_detail::cmd_verify_identities(opt, out);
    if (impute->parsed()) return cli_detail::cmd_impute(opt, out);
    if (report->parsed()) return cli_detail::cmd_report(opt, out);
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "usage error: no command\n";
  return 2;
}

}  // namespace missem
