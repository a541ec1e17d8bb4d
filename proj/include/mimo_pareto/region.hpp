// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/explicit_param.hpp"
#include "mimo_pareto/implicit_boundary.hpp"
#include "mimo_pareto/scenario.hpp"
#include "mimo_pareto/scenario_io.hpp"
#include "mimo_pareto/version.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace mimo_pareto {

enum class Provenance { explicit_sweep, implicit_trace, oracle };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::explicit_sweep: return "explicit-sweep";
    case Provenance::implicit_trace: return "implicit-trace";
    case Provenance::oracle: return "oracle";
  }
  return "oracle";
}

inline Provenance parse_provenance(const std::string& s) {
  if (s == "explicit-sweep") return Provenance::explicit_sweep;
  if (s == "implicit-trace") return Provenance::implicit_trace;
  if (s == "oracle") return Provenance::oracle;
  throw ValidationError("unknown provenance tag '" + s + "'");
}

/// One sampled point of the performance region and how it was obtained. Fields that
/// do not apply to a provenance are left empty (vectors) or NaN (scalars).
struct RegionRow {
  Provenance tag = Provenance::oracle;
  Eigen::VectorXd alpha;   // fairness profile (implicit trace)
  double g_sum = std::numeric_limits<double>::quiet_NaN();
  int iterations = -1;
  Eigen::VectorXd mu;      // explicit parameters, or normalized duals of a trace
  Eigen::VectorXd lambda;
  Eigen::VectorXd g;       // performance vector
  Eigen::VectorXd sinr;
  double c = std::numeric_limits<double>::quiet_NaN();  // largest constraint usage before any rescaling
  Eigen::VectorXd usage;   // per-constraint usage of the reported strategy
  bool weak_pareto = false;
};

struct RegionSample {
  std::string fingerprint;
  int num_users = 0;
  int num_constraints = 0;
  std::vector<RegionRow> rows;

  std::vector<Eigen::VectorXd> points() const {
    std::vector<Eigen::VectorXd> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.g);
    return out;
  }

  void check() const {
    for (const auto& r : rows) {
      if (r.g.size() != num_users) throw ValidationError("region sample: point dimension must equal the number of users");
      if ((r.g.array() < 0.0).any()) throw ValidationError("region sample: performance values must be nonnegative");
    }
  }
};

inline RegionSample sample_from_sweep(const Scenario& s, const SweepResult& sweep) {
  RegionSample out{fingerprint(s), s.num_users(), s.num_constraints(), {}};
  for (const auto& e : sweep.entries) {
    if (e.status != Strategy1Status::valid) continue;
    RegionRow r;
    r.tag = Provenance::explicit_sweep;
    r.mu = e.params.mu;
    r.lambda = e.params.lambda;
    r.g = e.point;
    r.sinr = e.sinr;
    r.c = e.c;
    r.usage = e.usage;
    out.rows.push_back(std::move(r));
  }
  return out;
}

inline RegionSample sample_from_boundary(const Scenario& s, const std::vector<BoundaryPoint>& pts) {
  RegionSample out{fingerprint(s), s.num_users(), s.num_constraints(), {}};
  for (const auto& b : pts) {
    RegionRow r;
    r.tag = Provenance::implicit_trace;
    r.alpha = b.profile.alpha;
    r.g_sum = b.g_sum;
    r.iterations = b.iterations;
    if (b.duals) {
      r.mu = b.duals->mu;
      r.lambda = b.duals->lambda;
    }
    r.g = b.point;
    r.sinr = b.sinr;
    r.usage = b.usage;
    r.c = b.usage.size() ? b.usage.maxCoeff() : 0.0;
    r.weak_pareto = b.weak_pareto;
    out.rows.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dominance

enum class ParetoMode {
  pareto,  // drop r when some r' >= r everywhere and r' != r
  outer,   // drop r only when some r' > r in every component
};

namespace detail {

inline bool dominates(const Eigen::VectorXd& a, const Eigen::VectorXd& b, ParetoMode mode, double slack) {
  if (mode == ParetoMode::outer) return ((a.array() - b.array()) > slack).all();
  return ((a.array() - b.array()) >= -slack).all() && ((a.array() - b.array()) > slack).any();
}

inline bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

inline std::vector<std::size_t> nondominated_two(const std::vector<Eigen::VectorXd>& pts, ParetoMode mode, double slack) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a](0) > pts[b](0); });
  std::vector<double> g1(n);
  std::vector<double> prefix(n);
  double run = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    g1[i] = pts[order[i]](0);
    run = std::max(run, pts[order[i]](1));
    prefix[i] = run;
  }
  // Largest g2 among points whose g1 exceeds (strict) or reaches (non-strict) a threshold.
  auto best_above = [&](double thr, bool strict) {
    const auto it = strict ? std::partition_point(g1.begin(), g1.end(), [&](double v) { return v > thr; })
                           : std::partition_point(g1.begin(), g1.end(), [&](double v) { return v >= thr; });
    const auto cnt = static_cast<std::size_t>(it - g1.begin());
    return cnt == 0 ? -std::numeric_limits<double>::infinity() : prefix[cnt - 1];
  };
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    const double r1 = pts[i](0);
    const double r2 = pts[i](1);
    bool dominated = false;
    if (mode == ParetoMode::outer) {
      dominated = best_above(r1 + slack, true) > r2 + slack;
    } else {
      dominated = best_above(r1 + slack, true) >= r2 - slack || best_above(r1 - slack, false) > r2 + slack;
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

}  // namespace detail

/// Indices of non-dominated points (comparison slack is absolute).
inline std::vector<std::size_t> pareto_indices(const std::vector<Eigen::VectorXd>& pts, ParetoMode mode = ParetoMode::pareto,
                                               double slack = 1e-9) {
  if (pts.empty()) return {};
  const auto dim = pts.front().size();
  for (const auto& p : pts) {
    if (p.size() != dim) throw ValidationError("pareto_filter: points must share one dimension");
  }
  if (dim == 2) return detail::nondominated_two(pts, mode, slack);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (j != i && detail::dominates(pts[j], pts[i], mode, slack)) dominated = true;
    }
    if (!dominated) keep.push_back(i);
  }
  return keep;
}

/// Non-dominated points, exact duplicates merged, in lexicographic order.
inline std::vector<Eigen::VectorXd> pareto_filter(const std::vector<Eigen::VectorXd>& pts, ParetoMode mode = ParetoMode::pareto,
                                                  double slack = 1e-9) {
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i : pareto_indices(pts, mode, slack)) out.push_back(pts[i]);
  std::sort(out.begin(), out.end(), detail::lex_less);
  out.erase(std::unique(out.begin(), out.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a == b; }),
            out.end());
  return out;
}

/// Rows of a sample whose points are non-dominated; original order kept.
inline RegionSample pareto_filter(const RegionSample& s, ParetoMode mode = ParetoMode::pareto, double slack = 1e-9) {
  RegionSample out{s.fingerprint, s.num_users, s.num_constraints, {}};
  for (std::size_t i : pareto_indices(s.points(), mode, slack)) out.rows.push_back(s.rows[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Ray-wise comparison against a traced boundary

/// Largest t with p >= t alpha componentwise (only components with alpha_k > 0 count).
inline double ray_value(const Eigen::VectorXd& p, const Eigen::VectorXd& alpha) {
  double t = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    if (alpha(k) > 0.0) t = std::min(t, p(k) / alpha(k));
  }
  return std::isfinite(t) ? t : 0.0;
}

/// Best ray value any of the points reaches along alpha.
inline double best_ray_value(const std::vector<Eigen::VectorXd>& pts, const Eigen::VectorXd& alpha) {
  double best = 0.0;
  for (const auto& p : pts) best = std::max(best, ray_value(p, alpha));
  return best;
}

struct GapReport {
  std::vector<double> shortfall;  // per traced point: (g_sum - best) / g_sum, floored at 0
  std::vector<double> excess;     // per traced point: best - g_sum (absolute, may be negative)
  double max_gap = 0.0;
  double mean_gap = 0.0;
  std::size_t worst_index = 0;
  double max_excess = -std::numeric_limits<double>::infinity();
  std::size_t worst_excess_index = 0;
};

/// Compare sample points with traced boundary points ray by ray.
inline GapReport boundary_gap(const std::vector<Eigen::VectorXd>& samples, const std::vector<Eigen::VectorXd>& alphas,
                              const std::vector<double>& g_sums) {
  if (alphas.size() != g_sums.size()) throw ValidationError("boundary_gap: one g_sum per profile required");
  GapReport rep;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double best = best_ray_value(samples, alphas[i]);
    const double gs = g_sums[i];
    const double sf = gs > 0.0 ? std::max(0.0, (gs - best) / gs) : 0.0;
    rep.shortfall.push_back(sf);
    rep.excess.push_back(best - gs);
    if (sf > rep.max_gap) {
      rep.max_gap = sf;
      rep.worst_index = i;
    }
    if (best - gs > rep.max_excess) {
      rep.max_excess = best - gs;
      rep.worst_excess_index = i;
    }
    rep.mean_gap += sf;
  }
  if (!alphas.empty()) rep.mean_gap /= static_cast<double>(alphas.size());
  return rep;
}

inline GapReport boundary_gap(const RegionSample& samples, const RegionSample& boundary) {
  if (samples.fingerprint != boundary.fingerprint) throw ValidationError("boundary_gap: scenario fingerprints differ");
  std::vector<Eigen::VectorXd> alphas;
  std::vector<double> gs;
  for (const auto& r : boundary.rows) {
    if (r.alpha.size() == 0) throw ValidationError("boundary_gap: boundary rows need a fairness profile");
    alphas.push_back(r.alpha);
    gs.push_back(std::isnan(r.g_sum) ? ray_value(r.g, r.alpha) : r.g_sum);
  }
  return boundary_gap(samples.points(), alphas, gs);
}

// ---------------------------------------------------------------------------
// Export

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline Json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Eigen::VectorXd vec_from(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace detail

/// CSV with a two-line comment header (fingerprint, tool version) and columns
///   tag, alpha_1..K, g_sum, iterations, mu_1..K, lambda_1..L, g_1..K, sinr_1..K, c,
///   usage_1..L, weak_pareto
/// Cells that do not apply to a row are empty.
inline std::string sample_to_csv(const RegionSample& s) {
  const int kr = s.num_users;
  const int nl = s.num_constraints;
  std::ostringstream os;
  os << "# fingerprint: " << s.fingerprint << "\n";
  os << "# tool: mimo_pareto " << kVersion << "\n";
  os << "tag";
  for (int k = 1; k <= kr; ++k) os << ",alpha_" << k;
  os << ",g_sum,iterations";
  for (int k = 1; k <= kr; ++k) os << ",mu_" << k;
  for (int l = 1; l <= nl; ++l) os << ",lambda_" << l;
  for (int k = 1; k <= kr; ++k) os << ",g_" << k;
  for (int k = 1; k <= kr; ++k) os << ",sinr_" << k;
  os << ",c";
  for (int l = 1; l <= nl; ++l) os << ",usage_" << l;
  os << ",weak_pareto\n";
  auto cells = [&](const Eigen::VectorXd& v, int n) {
    for (int i = 0; i < n; ++i) os << ',' << (i < v.size() ? detail::fmt_double(v(i)) : std::string());
  };
  for (const auto& r : s.rows) {
    os << to_string(r.tag);
    cells(r.alpha, kr);
    os << ',' << detail::fmt_double(r.g_sum) << ',' << (r.iterations >= 0 ? std::to_string(r.iterations) : std::string());
    cells(r.mu, kr);
    cells(r.lambda, nl);
    cells(r.g, kr);
    cells(r.sinr, kr);
    os << ',' << detail::fmt_double(r.c);
    cells(r.usage, nl);
    os << ',' << (r.weak_pareto ? 1 : 0) << "\n";
  }
  return os.str();
}

inline RegionSample sample_from_csv(const std::string& text) {
  RegionSample s;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : l) {
      if (ch == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur += ch;
      }
    }
    out.push_back(cur);
    return out;
  };
  while (std::getline(in, line)) {
    if (line.rfind("# fingerprint: ", 0) == 0) {
      s.fingerprint = line.substr(15);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = split(line);
      if (header.empty() || header[0] != "tag") throw ValidationError("region csv: missing header");
      for (const auto& h : header) {
        if (h.rfind("g_", 0) == 0 && h != "g_sum") ++s.num_users;
        if (h.rfind("lambda_", 0) == 0) ++s.num_constraints;
      }
      continue;
    }
    const auto f = split(line);
    if (f.size() != header.size()) throw ValidationError("region csv: row has " + std::to_string(f.size()) + " cells, header has " +
                                                         std::to_string(header.size()));
    RegionRow r;
    r.tag = parse_provenance(f[0]);
    std::vector<double> alpha, mu, lambda, g, sinr, usage;
    for (std::size_t i = 1; i < f.size(); ++i) {
      const std::string& h = header[i];
      if (f[i].empty()) continue;
      double v = 0.0;
      try {
        v = std::stod(f[i]);
      } catch (const std::exception&) {
        throw ValidationError("region csv: cannot parse '" + f[i] + "' in column " + h);
      }
      if (h.rfind("alpha_", 0) == 0) alpha.push_back(v);
      else if (h == "g_sum") r.g_sum = v;
      else if (h == "iterations") r.iterations = static_cast<int>(v);
      else if (h.rfind("mu_", 0) == 0) mu.push_back(v);
      else if (h.rfind("lambda_", 0) == 0) lambda.push_back(v);
      else if (h.rfind("g_", 0) == 0) g.push_back(v);
      else if (h.rfind("sinr_", 0) == 0) sinr.push_back(v);
      else if (h == "c") r.c = v;
      else if (h.rfind("usage_", 0) == 0) usage.push_back(v);
      else if (h == "weak_pareto") r.weak_pareto = v != 0.0;
    }
    auto to_vec = [](const std::vector<double>& v) {
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    r.alpha = to_vec(alpha);
    r.mu = to_vec(mu);
    r.lambda = to_vec(lambda);
    r.g = to_vec(g);
    r.sinr = to_vec(sinr);
    r.usage = to_vec(usage);
    s.rows.push_back(std::move(r));
  }
  if (header.empty()) throw ValidationError("region csv: missing header");
  s.check();
  return s;
}

inline Json sample_to_json(const RegionSample& s) {
  Json j;
  j["schema_version"] = 1;
  j["tool_version"] = kVersion;
  j["fingerprint"] = s.fingerprint;
  j["num_users"] = s.num_users;
  j["num_constraints"] = s.num_constraints;
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    Json o;
    o["tag"] = to_string(r.tag);
    if (r.alpha.size()) o["alpha"] = detail::vec_json(r.alpha);
    if (!std::isnan(r.g_sum)) o["g_sum"] = r.g_sum;
    if (r.iterations >= 0) o["iterations"] = r.iterations;
    if (r.mu.size()) o["mu"] = detail::vec_json(r.mu);
    if (r.lambda.size()) o["lambda"] = detail::vec_json(r.lambda);
    o["g"] = detail::vec_json(r.g);
    if (r.sinr.size()) o["sinr"] = detail::vec_json(r.sinr);
    if (!std::isnan(r.c)) o["c"] = r.c;
    if (r.usage.size()) o["usage"] = detail::vec_json(r.usage);
    if (r.weak_pareto) o["weak_pareto"] = true;
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j;
}

inline RegionSample sample_from_json(const Json& j) {
  try {
    RegionSample s;
    s.fingerprint = j.at("fingerprint").get<std::string>();
    s.num_users = j.at("num_users").get<int>();
    s.num_constraints = j.at("num_constraints").get<int>();
    for (const auto& o : j.at("rows")) {
      RegionRow r;
      r.tag = parse_provenance(o.at("tag").get<std::string>());
      if (o.contains("alpha")) r.alpha = detail::vec_from(o["alpha"]);
      if (o.contains("g_sum")) r.g_sum = o["g_sum"].get<double>();
      if (o.contains("iterations")) r.iterations = o["iterations"].get<int>();
      if (o.contains("mu")) r.mu = detail::vec_from(o["mu"]);
      if (o.contains("lambda")) r.lambda = detail::vec_from(o["lambda"]);
      r.g = detail::vec_from(o.at("g"));
      if (o.contains("sinr")) r.sinr = detail::vec_from(o["sinr"]);
      if (o.contains("c")) r.c = o["c"].get<double>();
      if (o.contains("usage")) r.usage = detail::vec_from(o["usage"]);
      r.weak_pareto = o.value("weak_pareto", false);
      s.rows.push_back(std::move(r));
    }
    s.check();
    return s;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("region json: ") + e.what());
  }
}

/// Write as CSV or JSON, chosen by the file extension (.json means JSON).
inline void export_sample(const RegionSample& s, const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    write_text_file_atomic(path, sample_to_json(s).dump(2) + "\n");
  } else {
    write_text_file_atomic(path, sample_to_csv(s));
  }
}

inline RegionSample load_sample(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  if (path.extension() == ".json") {
    try {
      return sample_from_json(Json::parse(text));
    } catch (const Json::parse_error& e) {
      throw ValidationError("region json '" + path.string() + "': " + e.what());
    }
  }
  return sample_from_csv(text);
}

// ---------------------------------------------------------------------------
// Plot script

/// A self-contained matplotlib script that draws the given sample files. Two-user
/// data is drawn in the plane (traced boundaries as lines, everything else as
/// scatter), three-user data as a 3D scatter coloured by the sum of the components.
inline std::string plot_script(const std::vector<std::string>& files, const std::vector<std::string>& labels, int users,
                               const std::string& image) {
  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
     << "# Generated by mimo_pareto " << kVersion << ". Usage: python3 <this file>\n"
     << "import csv, os\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "HERE = os.path.dirname(os.path.abspath(__file__))\n"
     << "FILES = [\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    py << "    (" << Json(files[i]).dump() << ", " << Json(i < labels.size() ? labels[i] : files[i]).dump() << "),\n";
  }
  py << "]\n"
     << "USERS = " << users << "\n\n"
     << "def load(path):\n"
     << "    with open(os.path.join(HERE, path)) as f:\n"
     << "        rows = [r for r in csv.DictReader(l for l in f if not l.startswith('#'))]\n"
     << "    return rows\n\n"
     << "def col(rows, name):\n"
     << "    return [float(r[name]) for r in rows if r[name] != '']\n\n";
  if (users == 3) {
    py << "fig = plt.figure()\n"
       << "ax = fig.add_subplot(projection='3d')\n"
       << "for path, label in FILES:\n"
       << "    rows = load(path)\n"
       << "    g = [col(rows, 'g_%d' % (k + 1)) for k in range(3)]\n"
       << "    total = [a + b + c for a, b, c in zip(*g)]\n"
       << "    sc = ax.scatter(g[0], g[1], g[2], c=total, s=4, label=label)\n"
       << "fig.colorbar(sc, label='sum')\n"
       << "ax.set_xlabel('user 1')\n"
       << "ax.set_ylabel('user 2')\n"
       << "ax.set_zlabel('user 3')\n";
  } else {
    py << "fig, ax = plt.subplots()\n"
       << "for path, label in FILES:\n"
       << "    rows = load(path)\n"
       << "    traced = [r for r in rows if r['tag'] == 'implicit-trace']\n"
       << "    other = [r for r in rows if r['tag'] != 'implicit-trace']\n"
       << "    if other:\n"
       << "        ax.scatter(col(other, 'g_1'), col(other, 'g_2'), s=2, alpha=0.4, label=label + ' samples')\n"
       << "    if traced:\n"
       << "        traced.sort(key=lambda r: float(r['alpha_1']))\n"
       << "        ax.plot(col(traced, 'g_1'), col(traced, 'g_2'), linewidth=1.5, label=label)\n"
       << "ax.set_xlabel('user 1')\n"
       << "ax.set_ylabel('user 2')\n";
  }
  py << "ax.legend()\n"
     << "fig.savefig(os.path.join(HERE, " << Json(image).dump() << "), dpi=150)\n";
  return py.str();
}

}  // namespace mimo_pareto
