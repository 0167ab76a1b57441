#pragma once

#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "missem/impute.hpp"
#include "missem/ingest.hpp"
#include "missem/model_spec.hpp"
#include "missem/verify.hpp"
#include "missem/version.hpp"

namespace missem {

using report_json = nlohmann::ordered_json;

// Header block shared by every report: enough to reproduce the run.
inline report_json tool_block(double tolerance) {
  report_json t;
  t["name"] = kToolName;
  t["version"] = kVersion;
  t["rng"] = kRngAlgorithm;
  t["canonical_order"] = kCanonicalOrder;
  t["tolerance"] = tolerance;
  return t;
}

inline report_json to_json(const IdentityReport& rep) {
  report_json j;
  j["identity"] = rep.identity;
  j["applicable"] = rep.applicable;
  j["pass"] = rep.pass;
  j["max_abs_deviation"] = rep.max_abs_deviation;
  if (!rep.witnesses.empty()) {
    j["witnesses"] = report_json::array();
    for (const auto& w : rep.witnesses) {
      j["witnesses"].push_back({{"location", w.location}, {"lhs", w.lhs}, {"rhs", w.rhs}});
    }
  }
  if (!rep.notes.empty()) j["notes"] = rep.notes;
  return j;
}

inline report_json to_json(const IngestSummary& s) {
  report_json j;
  j["n_rows"] = s.n_rows;
  j["columns"] = s.columns;
  j["patterns"] = report_json::array();
  for (const auto& st : s.patterns) {
    report_json p;
    p["pattern"] = st.pattern.to_string();
    p["count"] = st.count;
    p["frequency"] = st.frequency;
    p["observed_tables"] = report_json::array();
    for (const auto& [values, count] : st.observed_counts) {
      p["observed_tables"].push_back(
          {{"values", values},
           {"count", count},
           {"frequency", static_cast<double>(count) / static_cast<double>(st.count)}});
    }
    j["patterns"].push_back(std::move(p));
  }
  j["lattice_edges"] = report_json::array();
  for (const auto& [lo, hi] : s.lattice) {
    j["lattice_edges"].push_back({{"below", s.patterns[lo].pattern.to_string()},
                                  {"above", s.patterns[hi].pattern.to_string()}});
  }
  j["monotone_chain"] = s.monotone_chain;
  return j;
}

inline void render_text(std::ostream& out, const IdentityReport& rep) {
  out << (rep.applicable ? (rep.pass ? "[PASS] " : "[FAIL] ") : "[SKIP] ") << rep.identity
      << "  max|dev| = " << std::scientific << std::setprecision(3) << rep.max_abs_deviation
      << std::defaultfloat << "\n";
  for (std::size_t i = 0; i < rep.witnesses.size() && i < 4; ++i) {
    const auto& w = rep.witnesses[i];
    out << "       " << w.location << ": lhs = " << w.lhs << ", rhs = " << w.rhs << "\n";
  }
  if (rep.witnesses.size() > 4) {
    out << "       ... " << rep.witnesses.size() - 4 << " more witnesses\n";
  }
  for (const auto& n : rep.notes) out << "       note: " << n << "\n";
}

inline void render_text(std::ostream& out, const IngestSummary& s) {
  out << "rows: " << s.n_rows << ", realized patterns: " << s.patterns.size() << "\n";
  for (const auto& st : s.patterns) {
    out << "  " << st.pattern.to_string() << "  count " << st.count << "  p(r) = " << st.frequency
        << "\n";
  }
  if (!s.lattice.empty()) {
    out << "lattice cover edges:";
    for (const auto& [lo, hi] : s.lattice) {
      out << "  " << s.patterns[lo].pattern.to_string() << " < "
          << s.patterns[hi].pattern.to_string();
    }
    out << "\n";
  }
  out << "monotone chain: " << (s.monotone_chain ? "yes" : "no") << "\n";
}

// Tabular chain serialization: metadata comment lines, then one record per
// draw. Deterministic byte-for-byte for identical inputs.
inline std::string chain_to_csv(const ImputationChain& chain, const ModelDocument& model,
                                const std::string& model_path, double tolerance) {
  std::ostringstream out;
  const ModelSpace& ms = model.space;
  out << "# " << kToolName << " imputation chain\n";
  out << "# version=" << kVersion << " rng=" << chain.rng << " canonical-order=" << kCanonicalOrder
      << "\n";
  out << "# model=" << model_path << " mode=" << to_char(chain.mode) << " m=" << chain.length()
      << " seed=" << chain.seed << " tolerance=" << tolerance << "\n";
  out << "t";
  for (const auto& name : model.variable_names) out << "," << name;
  out << ",pattern,mode,seed\n";
  for (std::size_t t = 0; t < chain.draws.size(); ++t) {
    const auto& p = chain.draws[t];
    out << (t + 1);
    for (std::size_t i = 0; i < ms.dim(); ++i) out << "," << ms.domain(i).label(p.y.values[i]);
    out << "," << p.r.to_string() << "," << to_char(chain.mode) << "," << chain.seed << "\n";
  }
  return out.str();
}

inline report_json chain_to_json(const ImputationChain& chain, const ModelDocument& model) {
  report_json j;
  j["mode"] = std::string(1, to_char(chain.mode));
  j["seed"] = chain.seed;
  j["m"] = chain.length();
  j["rng"] = chain.rng;
  const ModelSpace& ms = model.space;
  j["draws"] = report_json::array();
  for (std::size_t t = 0; t < chain.draws.size(); ++t) {
    const auto& p = chain.draws[t];
    report_json row;
    row["t"] = t + 1;
    row["y"] = report_json::array();
    for (std::size_t i = 0; i < ms.dim(); ++i) row["y"].push_back(ms.domain(i).label(p.y.values[i]));
    row["r"] = p.r.to_string();
    j["draws"].push_back(std::move(row));
  }
  return j;
}

}  // namespace missem
