// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/scenario.hpp"

#include "json.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace mimo_pareto {

using Json = nlohmann::json;

inline constexpr int kScenarioSchemaVersion = 1;

namespace io_detail {

inline Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

inline Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw ValidationError("scenario file: complex values are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json vector_to_json(const Eigen::VectorXcd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

inline Eigen::VectorXcd vector_from_json(const Json& j) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline Json matrix_to_json(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const Json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw ValidationError("scenario file: weight matrices must be N x N");
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(j[static_cast<std::size_t>(r)].size()) != n) throw ValidationError("scenario file: weight matrices must be N x N");
    for (int c = 0; c < n; ++c) m(r, c) = complex_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
  }
  return m;
}

inline bool is_diagonal(const Eigen::MatrixXcd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r != c && m(r, c) != Complex(0.0)) return false;
      if (r == c && m(r, c).imag() != 0.0) return false;
    }
  }
  return true;
}

inline Json metric_to_json(const PerformanceMetric& m) {
  Json j{{"metric", m.name()}};
  if (m.kind() == MetricKind::table) {
    j["sinr"] = m.table_sinr();
    j["value"] = m.table_value();
  }
  return j;
}

inline PerformanceMetric metric_from_json(const Json& j) {
  const std::string name = j.at("metric").get<std::string>();
  if (name == "rate") return PerformanceMetric::rate();
  if (name == "mse") return PerformanceMetric::mse();
  if (name == "ser4qam") return PerformanceMetric::ser4qam();
  if (name == "table") {
    return PerformanceMetric::table(j.at("sinr").get<std::vector<double>>(), j.at("value").get<std::vector<double>>());
  }
  throw ValidationError("scenario file: unknown metric '" + name + "'");
}

inline std::vector<PowerConstraint> constraints_from_json(const Json& j, const std::vector<int>& antennas, int kr) {
  const int n = std::accumulate(antennas.begin(), antennas.end(), 0);
  const std::string type = j.value("type", std::string("matrix"));
  const double q = j.at("q").get<double>();
  if (type == "total") return constraints::total(n, kr, q);
  if (type == "per_transmitter" || type == "per_bs") return constraints::per_transmitter(antennas, kr, q);
  if (type == "per_antenna") return constraints::per_antenna(n, kr, q);
  PowerConstraint c;
  c.limit = q;
  c.label = j.value("label", type);
  if (type == "diagonal") {
    const auto diag = j.at("diag").get<std::vector<double>>();
    if (static_cast<int>(diag.size()) != n) throw ValidationError("scenario file: diagonal weights need N entries");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
    c.weights.assign(static_cast<std::size_t>(kr), m);
    return {c};
  }
  if (type == "matrix") {
    if (j.contains("Q")) {
      c.weights.assign(static_cast<std::size_t>(kr), matrix_from_json(j.at("Q"), n));
    } else {
      const Json& per = j.at("Q_per_user");
      if (static_cast<int>(per.size()) != kr) throw ValidationError("scenario file: Q_per_user needs one matrix per user");
      for (const auto& m : per) c.weights.push_back(matrix_from_json(m, n));
    }
    return {c};
  }
  throw ValidationError("scenario file: unknown power constraint type '" + type + "'");
}

inline Json constraint_to_json(const PowerConstraint& c) {
  bool shared = true;
  for (const auto& w : c.weights) shared = shared && (w == c.weights.front());
  Json j{{"q", c.limit}, {"label", c.label}};
  if (shared && is_diagonal(c.weights.front())) {
    j["type"] = "diagonal";
    std::vector<double> diag;
    for (Eigen::Index i = 0; i < c.weights.front().rows(); ++i) diag.push_back(c.weights.front()(i, i).real());
    j["diag"] = diag;
  } else if (shared) {
    j["type"] = "matrix";
    j["Q"] = matrix_to_json(c.weights.front());
  } else {
    j["type"] = "matrix";
    Json per = Json::array();
    for (const auto& w : c.weights) per.push_back(matrix_to_json(w));
    j["Q_per_user"] = per;
  }
  return j;
}

}  // namespace io_detail

inline Json scenario_to_json(const Scenario& s) {
  const ScenarioData& d = s.data();
  Json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["num_transmitters"] = s.num_transmitters();
  j["antennas_per_transmitter"] = d.antennas_per_transmitter;
  j["num_users"] = d.num_users;
  Json ch = Json::array();
  for (const auto& h : d.channels) ch.push_back(io_detail::vector_to_json(h));
  j["channels"] = ch;
  j["data_clusters"] = d.data_clusters;
  j["coord_clusters"] = d.coord_clusters;
  j["noise_powers"] = d.noise_powers;
  Json pc = Json::array();
  for (const auto& c : d.power_constraints) pc.push_back(io_detail::constraint_to_json(c));
  j["power_constraints"] = pc;
  j["evm"] = std::vector<double>(d.evm.data(), d.evm.data() + d.evm.size());
  Json ms = Json::array();
  for (const auto& m : d.metrics) ms.push_back(io_detail::metric_to_json(m));
  j["metrics"] = ms;
  return j;
}

inline Scenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("scenario file: top level must be an object");
  if (!j.contains("schema_version")) throw ValidationError("scenario file: schema_version is mandatory");
  if (j.at("schema_version").get<int>() != kScenarioSchemaVersion) {
    throw ValidationError("scenario file: unsupported schema_version");
  }
  try {
    ScenarioData d;
    d.antennas_per_transmitter = j.at("antennas_per_transmitter").get<std::vector<int>>();
    if (j.contains("num_transmitters") &&
        j.at("num_transmitters").get<std::size_t>() != d.antennas_per_transmitter.size()) {
      throw ValidationError("scenario file: num_transmitters disagrees with antennas_per_transmitter");
    }
    d.num_users = j.at("num_users").get<int>();
    for (const auto& h : j.at("channels")) d.channels.push_back(io_detail::vector_from_json(h));
    d.data_clusters = j.at("data_clusters").get<std::vector<UserSet>>();
    d.coord_clusters = j.at("coord_clusters").get<std::vector<UserSet>>();
    d.noise_powers = j.at("noise_powers").get<std::vector<double>>();
    if (d.num_users <= 0) throw ValidationError("scenario file: num_users must be positive");
    for (const auto& c : j.at("power_constraints")) {
      auto expanded = io_detail::constraints_from_json(c, d.antennas_per_transmitter, d.num_users);
      d.power_constraints.insert(d.power_constraints.end(), expanded.begin(), expanded.end());
    }
    const int n = std::accumulate(d.antennas_per_transmitter.begin(), d.antennas_per_transmitter.end(), 0);
    if (j.contains("evm")) {
      const Json& e = j.at("evm");
      if (e.is_number()) {
        d.evm = Eigen::VectorXd::Constant(n, e.get<double>());
      } else {
        const auto v = e.get<std::vector<double>>();
        d.evm = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      }
    }
    if (j.contains("metrics")) {
      const Json& m = j.at("metrics");
      if (m.is_object()) {
        d.metrics.assign(static_cast<std::size_t>(d.num_users), io_detail::metric_from_json(m));
      } else {
        for (const auto& e : m) d.metrics.push_back(io_detail::metric_from_json(e));
      }
    }
    return Scenario(std::move(d));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("scenario file: ") + e.what());
  }
}

/// FNV-1a over the canonical JSON dump; stable across platforms and runs.
inline std::string fingerprint(const Json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string fingerprint(const Scenario& s) { return fingerprint(scenario_to_json(s)); }

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Write via a temporary sibling and rename, so readers never see partial files.
inline void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ValidationError("scenario file '" + path.string() + "': " + e.what());
  }
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  write_text_file_atomic(path, scenario_to_json(s).dump(2) + "\n");
}

}  // namespace mimo_pareto
