#include "dfrw/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dfrw/config.hpp"
#include "dfrw/error.hpp"
#include "dfrw/stats.hpp"

namespace dfrw {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

double parse_cell(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  const auto v = parse_doubles(s);
  if (v.size() != 1) throw ValidationError("malformed CSV value '" + s + "'");
  return v.front();
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd matrix_from(const Json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (j[i].size() != j.size()) throw ValidationError("sigma2 must be a square matrix");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// Column layout shared by writer and reader.
struct Layout {
  int d = 0;
  std::size_t batches = 0;
  std::vector<std::string> names;
};

Layout make_layout(int d, std::size_t batches) {
  Layout l{d, batches, {}};
  auto& n = l.names;
  auto vec = [&](const std::string& p) {
    for (int a = 1; a <= d; ++a) n.push_back(p + "_" + std::to_string(a));
  };
  auto mat = [&](const std::string& p) {
    for (int a = 1; a <= d; ++a)
      for (int b = 1; b <= d; ++b) n.push_back(p + "_" + std::to_string(a) + std::to_string(b));
  };
  n.push_back("t");
  vec("mean");
  mat("cov");
  mat("covY");
  n.push_back("n");
  vec("meanY");
  mat("covI");
  mat("covYI");
  mat("m2");
  for (std::size_t b = 1; b <= batches; ++b) n.push_back("msd_b" + std::to_string(b));
  for (std::size_t b = 1; b <= batches; ++b) mat("cov_b" + std::to_string(b));
  for (std::size_t b = 1; b <= batches; ++b) mat("covY_b" + std::to_string(b));
  return l;
}

}  // namespace

void write_stats_csv(const WalkEnsembleStats& stats, const std::filesystem::path& path) {
  const int d = stats.dim;
  const std::size_t B = stats.rows.empty() ? 0 : stats.rows.front().batch_msd.size();
  const Layout layout = make_layout(d, B);
  auto out = open_out(path);
  for (std::size_t i = 0; i < layout.names.size(); ++i) out << (i ? "," : "") << layout.names[i];
  out << '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : stats.rows) {
    std::vector<std::string> cells;
    auto vec = [&](const Eigen::VectorXd& v) {
      for (int a = 0; a < d; ++a) cells.push_back(fmt(v.size() ? v(a) : nan));
    };
    auto mat = [&](const Eigen::MatrixXd& m) {
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) cells.push_back(fmt(m.size() ? m(a, b) : nan));
    };
    cells.push_back(fmt(r.t));
    vec(r.mean);
    mat(r.cov);
    mat(r.cov_y);
    cells.push_back(std::to_string(r.n));
    vec(r.mean_y);
    mat(r.cov_i);
    mat(r.cov_yi);
    mat(r.second_moment);
    for (double v : r.batch_msd) cells.push_back(fmt(v));
    for (const auto& m : r.batch_cov) mat(m);
    for (std::size_t b = 0; b < B; ++b) mat(r.batch_cov_y.empty() ? Eigen::MatrixXd() : r.batch_cov_y[b]);
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  }
  close_checked(out, path);
}

WalkEnsembleStats read_stats_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty stats CSV " + path.string());
  const auto header = split_list(line);
  int d = 0;
  std::size_t B = 0;
  for (const auto& h : header) {
    if (h.rfind("mean_", 0) == 0) ++d;
    if (h.rfind("msd_b", 0) == 0) ++B;
  }
  if (d == 0) throw ValidationError("stats CSV has no mean columns");
  const Layout layout = make_layout(d, B);
  if (header != layout.names) throw ValidationError("stats CSV header does not match the expected layout");

  WalkEnsembleStats stats;
  stats.dim = d;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_list(line);
    if (cells.size() != header.size()) throw ValidationError("stats CSV row has the wrong number of columns");
    std::size_t c = 0;
    auto next = [&] { return parse_cell(cells[c++]); };
    auto vec = [&] {
      Eigen::VectorXd v(d);
      for (int a = 0; a < d; ++a) v(a) = next();
      return v;
    };
    auto mat = [&] {
      Eigen::MatrixXd m(d, d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) m(a, b) = next();
      return m;
    };
    TimeStats r;
    r.t = next();
    r.mean = vec();
    r.cov = mat();
    r.cov_y = mat();
    r.n = static_cast<std::size_t>(next());
    r.mean_y = vec();
    r.cov_i = mat();
    r.cov_yi = mat();
    r.second_moment = mat();
    for (std::size_t b = 0; b < B; ++b) r.batch_msd.push_back(next());
    for (std::size_t b = 0; b < B; ++b) r.batch_cov.push_back(mat());
    for (std::size_t b = 0; b < B; ++b) r.batch_cov_y.push_back(mat());
    stats.has_compensator = !std::isnan(r.cov_y(0, 0));
    if (!stats.has_compensator) {
      r.cov_y.resize(0, 0);
      r.mean_y.resize(0);
      r.cov_i.resize(0, 0);
      r.cov_yi.resize(0, 0);
      r.batch_cov_y.clear();
    }
    stats.rows.push_back(std::move(r));
  }
  if (stats.rows.empty()) throw ValidationError("stats CSV has no rows");
  return stats;
}

void write_endpoints_csv(const WalkEnsembleStats& stats, const std::filesystem::path& path) {
  if (stats.rows.empty()) throw ValidationError("no sample times");
  const int d = stats.dim;
  auto out = open_out(path);
  out << "t";
  for (int a = 1; a <= d; ++a) out << ",x_" << a;
  out << '\n';
  const std::string t = fmt(stats.rows.back().t);
  for (std::size_t i = 0; i + d <= stats.endpoints.size(); i += d) {
    out << t;
    for (int a = 0; a < d; ++a) out << ',' << fmt(stats.endpoints[i + a]);
    out << '\n';
  }
  close_checked(out, path);
}

Endpoints read_endpoints_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty endpoints CSV");
  Endpoints e;
  e.dim = static_cast<int>(split_list(line).size()) - 1;
  if (e.dim < 1) throw ValidationError("endpoints CSV needs t and coordinate columns");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_list(line);
    if (static_cast<int>(cells.size()) != e.dim + 1) throw ValidationError("malformed endpoints row");
    e.t = parse_cell(cells[0]);
    for (int a = 1; a <= e.dim; ++a) e.positions.push_back(parse_cell(cells[a]));
  }
  return e;
}

Json sigma_to_json(const DiffusivityEstimate& est, const std::vector<ScanRow>& scan) {
  Json j;
  j["method"] = method_name(est.method);
  j["sigma2"] = matrix_json(est.sigma2);
  j["v"] = vector_json(est.mean_drift);
  Json rows = Json::array();
  for (const auto& r : scan) {
    rows.push_back({{"lambda", r.lambda},
                    {"m_ab", matrix_json(r.m)},
                    {"lam_norm2", r.lam_norm2},
                    {"dirichlet", r.dirichlet},
                    {"residual", r.residual},
                    {"iterations", r.iterations}});
  }
  j["scan"] = rows;
  if (est.stderr) j["stderr"] = matrix_json(*est.stderr);
  j["parameter"] = est.parameter;
  j["withheld"] = est.withheld;
  if (!est.note.empty()) j["note"] = est.note;
  return j;
}

DiffusivityEstimate sigma_from_json(const Json& j) {
  try {
    DiffusivityEstimate est;
    const std::string m = j.at("method").get<std::string>();
    if (m == "cell_exact") est.method = SigmaMethod::CellExact;
    else if (m == "resolvent_scan") est.method = SigmaMethod::ResolventScan;
    else if (m == "monte_carlo") est.method = SigmaMethod::MonteCarlo;
    else throw ValidationError("unknown sigma method '" + m + "'");
    est.sigma2 = matrix_from(j.at("sigma2"));
    const auto& v = j.at("v");
    est.mean_drift.resize(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) est.mean_drift(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    if (j.contains("stderr")) est.stderr = matrix_from(j.at("stderr"));
    est.parameter = j.value("parameter", 0.0);
    est.withheld = j.value("withheld", false);
    est.note = j.value("note", std::string());
    return est;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed sigma JSON: ") + e.what());
  }
}

Json kv_report(const StreamTensor& h, KvOperator op, std::size_t pairs, const std::vector<double>& Ks,
               std::uint64_t seed) {
  const SkewReport skew = skew_residual(h, op, pairs, seed);
  Json j;
  j["op"] = op == KvOperator::B ? "B" : "F";
  j["d"] = h.torus().dim();
  j["L"] = h.torus().side();
  j["pairs"] = pairs;
  j["skew_residual"] = skew.max_residual;
  j["conjugacy_residual"] = conjugacy_residual(h, std::min<std::size_t>(pairs, 10), seed);
  j["max_abs_h"] = h.max_abs();
  Json rows = Json::array();
  for (const auto& r : truncation_scan(h, Ks, std::min<std::size_t>(pairs, 10), seed)) {
    rows.push_back({{"K", r.K},
                    {"max_abs", r.max_abs},
                    {"max_relative", r.max_relative},
                    {"truncated_entries", r.truncated_entries}});
  }
  j["truncation"] = rows;
  return j;
}

void write_h1_csv(const std::vector<H1Statistic>& table, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "model,d,L,S,stderr,n\n";
  for (const auto& r : table) {
    out << r.model << ',' << r.dim << ',' << r.side << ',' << fmt(r.value) << ',' << fmt(r.stderr) << ','
        << r.samples << '\n';
  }
  close_checked(out, path);
}

Json stats_report(const WalkEnsembleStats& stats, const DiffusivityEstimate& reference,
                  const std::optional<Endpoints>& endpoints) {
  if (stats.rows.empty()) throw ValidationError("no sample times in walk statistics");
  Json j;
  const double t_last = stats.rows.back().t;
  j["t_max"] = t_last;
  j["d"] = stats.dim;

  const MsdCurve raw = msd_curve(stats, false);
  const MsdCurve centered = msd_curve(stats, true);
  auto fit_json = [&](const MsdCurve& c) -> Json {
    const double lo = std::max(c.times.front(), t_last / 100.0);
    try {
      const ExponentFit f = exponent_fit(c, lo, t_last);
      return {{"alpha", f.alpha}, {"stderr", f.stderr}, {"ci", {f.ci_low, f.ci_high}},
              {"t_lo", f.t_lo},   {"t_hi", f.t_hi},     {"points", f.points}};
    } catch (const ValidationError& e) {
      return {{"withheld", e.what()}};
    }
  };
  j["msd_exponent"] = fit_json(raw);
  j["msd_exponent_centered"] = fit_json(centered);

  Json sig;
  sig["reference_method"] = method_name(reference.method);
  sig["reference"] = matrix_json(reference.sigma2);
  try {
    const DiffusivityEstimate mc = sigma_monte_carlo(stats);
    sig["monte_carlo"] = matrix_json(mc.sigma2);
    if (mc.stderr) sig["monte_carlo_stderr"] = matrix_json(*mc.stderr);
    sig["velocity"] = vector_json(mc.mean_drift);
    if (reference.sigma2.rows() == mc.sigma2.rows()) {
      const double tr = reference.sigma2.trace();
      sig["relative_trace_error"] = std::abs(mc.sigma2.trace() - tr) / std::abs(tr);
    }
    sig["withheld"] = mc.withheld;
    if (!mc.note.empty()) sig["note"] = mc.note;
  } catch (const ValidationError& e) {
    sig["monte_carlo"] = nullptr;
    sig["note"] = e.what();
  }
  j["sigma"] = sig;

  Json cov_t = Json::array();
  for (const auto& r : stats.rows) cov_t.push_back({{"t", r.t}, {"trcov_over_t", r.cov.trace() / r.t}});
  j["cov_over_t"] = cov_t;

  if (stats.has_compensator) {
    const MartingaleReport m = martingale_check(stats);
    j["martingale"] = {{"mean_zero", m.mean_zero},
                       {"max_mean_y_z", *std::max_element(m.mean_y_z.begin(), m.mean_y_z.end())},
                       {"linear_r2", m.linear_r2},
                       {"linear", m.linear},
                       {"var_y_over_t_last", m.var_y_over_t.back()},
                       {"cross_cov_last", matrix_json(m.cross_cov_last)}};
  }

  if (endpoints && !reference.withheld && reference.sigma2.rows() == endpoints->dim) {
    const GaussianityReport g = gaussianity_tests(endpoints->positions, endpoints->dim, endpoints->t, reference.sigma2);
    j["gaussianity"] = {{"t", endpoints->t},
                        {"samples", g.samples},
                        {"ks", g.ks},
                        {"excess_kurtosis", g.excess_kurtosis},
                        {"cov_relative_error", g.cov_relative_error}};
  }
  return j;
}

void write_curves_csv(const WalkEnsembleStats& stats, const std::filesystem::path& path) {
  const MsdCurve raw = msd_curve(stats, false);
  auto out = open_out(path);
  out << "t,msd,msd_se,trcov_over_t,trcovY_over_t\n";
  for (std::size_t i = 0; i < stats.rows.size(); ++i) {
    const auto& r = stats.rows[i];
    const double y = stats.has_compensator ? r.cov_y.trace() / r.t : std::numeric_limits<double>::quiet_NaN();
    out << fmt(r.t) << ',' << fmt(raw.values[i]) << ',' << fmt(raw.stderr[i]) << ',' << fmt(r.cov.trace() / r.t)
        << ',' << fmt(y) << '\n';
  }
  close_checked(out, path);
}

void write_json(const Json& j, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  close_checked(out, path);
}

Json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace dfrw
