#include "topobohm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "topobohm/errors.hpp"
#include "topobohm/hash.hpp"

namespace topobohm {

using nlohmann::json;

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw DomainError("complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw DomainError("matrix must be a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[static_cast<size_t>(r)].size()) != cols) throw DomainError("matrix rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[static_cast<size_t>(r)][static_cast<size_t>(c)]);
  }
  return m;
}

namespace {

json units() { return {{"hbar", 1}, {"mass", 1}, {"radius", 1}}; }

}  // namespace

json state_to_json(const WaveGrid& s) {
  json doc;
  doc["schema"] = kStateSchemaTag;
  doc["space"] = "ring";
  doc["n_points"] = s.n;
  doc["components"] = s.components;
  doc["units"] = units();
  const CMatrix& g = s.factor.generator_matrices().front();
  if (s.components == 1)
    doc["twist"] = {{"beta", wrap_phase(std::arg(g(0, 0)))}};
  else
    doc["twist"] = {{"generator", matrix_to_json(g)}};
  doc["vector_potential"] = s.vector_potential;
  doc["representation"] = "gauge_fixed";
  json comps = json::array();
  for (int c = 0; c < s.components; ++c) {
    json arr = json::array();
    for (int j = 0; j < s.n; ++j) arr.push_back(complex_to_json(s.at(c, j)));
    comps.push_back(arr);
  }
  doc["chi"] = comps;
  return doc;
}

WaveGrid state_from_json(const json& doc) {
  if (doc.value("schema", "") != kStateSchemaTag) throw DomainError("not a topobohm.state/1 document");
  if (doc.value("space", "") != "ring") throw DomainError("only ring states can be read back");
  const int n = doc.at("n_points");
  const int k = doc.at("components");
  std::vector<cplx> values;
  for (const auto& comp : doc.at("chi")) {
    if (static_cast<int>(comp.size()) != n) throw DomainError("component length differs from n_points");
    for (const auto& z : comp) values.push_back(complex_from_json(z));
  }
  const auto& tw = doc.at("twist");
  MatrixRep factor = tw.contains("beta") ? scalar_rep(ring_character(tw["beta"].get<double>()), k)
                                         : make_matrix_rep(DeckGroup::integers(), {matrix_from_json(tw.at("generator"))});
  WaveGrid g = twist_embed(std::move(values), k, factor);
  g.vector_potential = doc.value("vector_potential", 0.0);
  return g;
}

json state_to_json(const TorusGrid& s) {
  json doc;
  doc["schema"] = kStateSchemaTag;
  doc["space"] = "two_particle_ring";
  doc["n_points"] = s.n;
  doc["components"] = 1;
  doc["units"] = units();
  doc["twist"] = {{"beta", s.beta}, {"exchange_sector", s.sector}};
  doc["representation"] = "gauge_fixed";
  json rows = json::array();
  for (int i = 0; i < s.n; ++i) {
    json row = json::array();
    for (int j = 0; j < s.n; ++j) row.push_back(complex_to_json(s.at(i, j)));
    rows.push_back(row);
  }
  doc["chi"] = rows;
  return doc;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trajectories_csv(const std::vector<Trajectory>& trajs) {
  std::ostringstream os;
  const int dims = trajs.empty() ? 1 : trajs.front().dims;
  os << "id,t";
  for (int d = 0; d < dims; ++d) os << ",theta_" << d + 1;
  for (int d = 0; d < dims; ++d) os << ",winding_" << d + 1;
  os << ",status\n";
  for (size_t id = 0; id < trajs.size(); ++id) {
    const auto& tr = trajs[id];
    for (size_t i = 0; i < tr.size(); ++i) {
      const bool last = i + 1 == tr.size();
      os << id << ',' << format_number(tr.times[i]);
      for (int d = 0; d < dims; ++d) os << ',' << format_number(tr.angle(i, d));
      for (int d = 0; d < dims; ++d) os << ',' << tr.winding(i, d);
      os << ',' << (last ? to_string(tr.status) : "running") << '\n';
    }
  }
  return os.str();
}

std::string events_csv(const std::vector<CollapseEvent>& events) {
  std::ostringstream os;
  os << "t,x,pre_norm,collapsed_norm,post_norm,label,twist_residual\n";
  for (const auto& e : events)
    os << format_number(e.time) << ',' << format_number(e.x) << ',' << format_number(e.pre_norm) << ','
       << format_number(e.collapsed_norm) << ',' << format_number(e.post_norm) << ',' << e.label << ','
       << format_number(e.twist_residual) << '\n';
  return os.str();
}

std::string spectrum_csv(const std::vector<double>& levels, const std::vector<double>& analytic) {
  std::ostringstream os;
  os << (analytic.empty() ? "level,energy\n" : "level,energy,analytic\n");
  for (size_t i = 0; i < levels.size(); ++i) {
    os << i << ',' << format_number(levels[i]);
    if (!analytic.empty()) os << ',' << format_number(analytic[i]);
    os << '\n';
  }
  return os.str();
}

WrittenFile write_atomic(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto final_path = dir / name;
  const auto tmp = dir / (name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, final_path);
  return {name, content.size(), "fnv1a64:" + hex64(fnv1a64(content))};
}

}  // namespace topobohm
