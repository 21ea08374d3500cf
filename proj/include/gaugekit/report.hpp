#pragma once

// CSV / JSON emission for sweep, scan and single-run results.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gaugekit/adiabatic.hpp"
#include "gaugekit/pauli.hpp"
#include "gaugekit/vqe.hpp"

namespace gaugekit {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

/// null for non-finite values (JSON has no NaN)
inline Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

/// Comment header shared by every CSV: schema line, then the resolved config.
inline std::string csv_preamble(const Json& config) {
  return "# schema=" + std::to_string(kSchemaVersion) + "\n# config=" + config.dump() + "\n";
}

inline std::string json_document(const std::string& command, const Json& config, Json result) {
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["command"] = command;
  doc["config"] = config;
  doc["result"] = std::move(result);
  return doc.dump(2) + "\n";
}

inline std::string sweep_csv(const SweepResult& r, const Json& config) {
  std::ostringstream out;
  out << csv_preamble(config) << "dt,N,T,eps_bare,eps_cd,ratio\n";
  for (const auto& row : r.rows)
    out << csv_number(row.dt) << ',' << row.n_steps << ',' << csv_number(row.total_time) << ','
        << csv_number(row.eps_bare) << ',' << csv_number(row.eps_cd) << ',' << csv_number(row.ratio) << '\n';
  return out.str();
}

inline Json sweep_json(const SweepResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json j;
    j["dt"] = row.dt;
    j["N"] = row.n_steps;
    j["T"] = row.total_time;
    j["eps_bare"] = json_number(row.eps_bare);
    j["eps_cd"] = json_number(row.eps_cd);
    j["ratio"] = json_number(row.ratio);
    if (!row.error.empty()) j["error"] = row.error;
    rows.push_back(std::move(j));
  }
  Json out;
  out["rows"] = std::move(rows);
  out["failures"] = r.failures();
  return out;
}

inline std::string scan_csv(const ScanResult& r, const Json& config) {
  std::ostringstream out;
  out << csv_preamble(config) << "distance,ansatz,n_parameters,n_terms,energy,e0,eps,chemical_accuracy,error\n";
  for (const auto& row : r.rows)
    out << csv_number(row.distance) << ',' << csv_escape(row.ansatz) << ',' << row.n_parameters << ',' << row.n_terms
        << ',' << csv_number(row.energy) << ',' << csv_number(row.e0) << ',' << csv_number(row.epsilon) << ','
        << (row.chemical_accuracy ? 1 : 0) << ',' << csv_escape(row.error) << '\n';
  return out.str();
}

inline Json scan_json(const ScanResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json j;
    j["distance"] = row.distance;
    j["ansatz"] = row.ansatz;
    j["n_parameters"] = row.n_parameters;
    j["n_terms"] = row.n_terms;
    j["energy"] = json_number(row.energy);
    j["e0"] = json_number(row.e0);
    j["eps"] = json_number(row.epsilon);
    j["chemical_accuracy"] = row.chemical_accuracy;
    if (!row.error.empty()) j["error"] = row.error;
    rows.push_back(std::move(j));
  }
  Json out;
  out["rows"] = std::move(rows);
  out["failures"] = r.failures();
  return out;
}

/// Flat key/value record as one CSV row (keys in insertion order).
inline std::string record_csv(const Json& record, const Json& config) {
  std::string head, vals;
  for (auto it = record.begin(); it != record.end(); ++it) {
    if (it.value().is_structured()) continue;
    if (!head.empty()) {
      head += ',';
      vals += ',';
    }
    head += it.key();
    const auto& v = it.value();
    if (v.is_null()) vals += "nan";
    else if (v.is_number_float()) vals += csv_number(v.get<double>());
    else if (v.is_boolean()) vals += v.get<bool>() ? "1" : "0";
    else if (v.is_string()) vals += csv_escape(v.get<std::string>());
    else vals += v.dump();
  }
  return csv_preamble(config) + head + "\n" + vals + "\n";
}

inline Json pauli_sum_json(const PauliSum& s) {
  Json terms = Json::array();
  for (const auto& [w, c] : s) terms.push_back(Json::array({w.to_string(), c.real(), c.imag()}));
  return terms;
}

}  // namespace gaugekit
