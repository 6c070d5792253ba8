#include "hygronet/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace hygronet {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputDomainError(std::string("network JSON: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputDomainError(std::string("network JSON: bad field '") + key + "': " + e.what());
  }
}

Json vec(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

}  // namespace

Json to_json(const Material& m) {
  return Json{{"E_l", m.E_l},       {"E_t", m.E_t},       {"G_lt", m.G_lt},
              {"nu_lt", m.nu_lt},   {"nu_tl", m.nu_tl},   {"beta_l", m.beta_l},
              {"beta_t", m.beta_t}};
}

Material material_from_json(const Json& j) {
  Material m;
  m.E_l = field<double>(j, "E_l");
  m.E_t = field<double>(j, "E_t");
  m.G_lt = field<double>(j, "G_lt");
  m.nu_lt = field<double>(j, "nu_lt");
  m.nu_tl = field<double>(j, "nu_tl");
  m.beta_l = field<double>(j, "beta_l");
  m.beta_t = field<double>(j, "beta_t");
  return m;
}

Json to_json(const Network& net) {
  Json j;
  j["cell_size"] = net.cell_size;
  j["q"] = net.q;
  j["seed"] = net.seed;
  j["coverage"] = coverage(net);
  j["materials"] = Json::array();
  for (const auto& m : net.materials) j["materials"].push_back(to_json(m));
  j["fibres"] = Json::array();
  for (const auto& f : net.fibres)
    j["fibres"].push_back({{"x", f.centroid.x()},
                           {"y", f.centroid.y()},
                           {"theta", f.theta},
                           {"length", f.length},
                           {"width", f.width},
                           {"thickness", f.thickness},
                           {"material", f.material}});
  return j;
}

Network network_from_json(const Json& j) {
  Network net;
  net.cell_size = field<double>(j, "cell_size");
  net.q = j.value("q", 0.0);
  net.seed = j.value("seed", std::uint64_t{0});
  net.materials.clear();
  for (const auto& m : field<Json>(j, "materials")) net.materials.push_back(material_from_json(m));
  for (const auto& fj : field<Json>(j, "fibres")) {
    Fibre f;
    f.centroid = Vec2(field<double>(fj, "x"), field<double>(fj, "y"));
    f.theta = field<double>(fj, "theta");
    f.length = field<double>(fj, "length");
    f.width = field<double>(fj, "width");
    f.thickness = fj.value("thickness", 1.0);
    f.material = fj.value("material", 0);
    net.fibres.push_back(f);
  }
  net.validate();
  return net;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputDomainError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputDomainError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Network read_network(const std::filesystem::path& path) { return network_from_json(read_json(path)); }

void write_network(const std::filesystem::path& path, const Network& net) {
  write_json(path, to_json(net));
}

Json to_json(const EffectiveExpansion& e) {
  return Json{{"beta", {{"xx", e.beta[0]}, {"yy", e.beta[1]}, {"xy", e.beta[2]}}},
              {"beta_normalized", vec(e.normalized())},
              {"beta_l", e.beta_l},
              {"nodes", e.nodes},
              {"elements", e.elements},
              {"dofs", e.dofs},
              {"components", e.components},
              {"pinned_dofs", e.pinned_dofs},
              {"macro_rank", e.macro_rank},
              {"regularized", e.regularized},
              {"modelled_area", e.modelled_area},
              {"quadrature",
               {{"calls", e.quadrature.calls},
                {"triangles", e.quadrature.triangles},
                {"leaves", e.quadrature.leaves}}}};
}

Json timings_json(const Timings& t) {
  return Json{{"mesh", t.mesh},
              {"coverage", t.coverage},
              {"assembly", t.assembly},
              {"solve", t.solve},
              {"total", t.total()}};
}

void write_vtk(const std::filesystem::path& path, const FieldSnapshot& snap, bool deformed) {
  const Mesh& mesh = snap.run.mesh;
  const auto& elems = snap.run.system.elements;
  std::vector<int> covered;
  for (std::size_t e = 0; e < elems.size(); ++e)
    if (!elems[e].terms.empty()) covered.push_back(static_cast<int>(e));
  const std::vector<Vec2> pts = deformed ? snap.deformed_nodes() : mesh.nodes();

  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\nhygronet fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << pts.size() << " double\n";
  for (const auto& p : pts) out << p.x() << ' ' << p.y() << " 0\n";
  out << "CELLS " << covered.size() << ' ' << 4 * covered.size() << '\n';
  for (int e : covered) {
    const auto& v = mesh.elements()[e].v;
    out << "3 " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
  }
  out << "CELL_TYPES " << covered.size() << '\n';
  for (std::size_t i = 0; i < covered.size(); ++i) out << "5\n";

  out << "CELL_DATA " << covered.size() << '\n';
  const char* names[3] = {"xx", "yy", "xy"};
  for (int c = 0; c < 3; ++c) {
    out << "SCALARS strain_" << names[c] << " double 1\nLOOKUP_TABLE default\n";
    for (int e : covered) out << snap.normalized_strain(e)[c] << '\n';
  }
  for (int c = 0; c < 3; ++c) {
    out << "SCALARS stress_" << names[c] << " double 1\nLOOKUP_TABLE default\n";
    for (int e : covered) {
      double sum = 0.0;
      double w = 0.0;
      for (std::size_t k = 0; k < elems[e].terms.size(); ++k) {
        sum += elems[e].terms[k].area * snap.run.solution.fibre_stress[e][k].stress[c];
        w += elems[e].terms[k].area;
      }
      const double s = sum / w;
      out << (snap.sigma0 != 0.0 ? s / snap.sigma0 : s) << '\n';
    }
  }
  out << "SCALARS coverage double 1\nLOOKUP_TABLE default\n";
  for (int e : covered) {
    double a = 0.0;
    for (const auto& t : elems[e].terms) a += t.area;
    out << a / mesh.area(e) << '\n';
  }
  out << "SCALARS fibres int 1\nLOOKUP_TABLE default\n";
  for (int e : covered) out << elems[e].terms.size() << '\n';

  out << "POINT_DATA " << pts.size() << "\nVECTORS displacement double\n";
  for (std::size_t n = 0; n < pts.size(); ++n) {
    const Vec2 u = snap.run.solution.displacement(mesh, static_cast<int>(n));
    out << u.x() << ' ' << u.y() << " 0\n";
  }
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& K) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << K.rows() << ' ' << K.cols() << ' ' << K.nonZeros() << '\n';
  for (Eigen::Index j = 0; j < K.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(K, j); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void write_matrix_market(const std::filesystem::path& path, const Eigen::VectorXd& f) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix array real general\n" << f.size() << " 1\n";
  for (Eigen::Index i = 0; i < f.size(); ++i) out << f[i] << '\n';
}

void write_profile_csv(const std::filesystem::path& path, const std::vector<ProfilePoint>& profile) {
  auto out = open_out(path);
  out << "s,x,y,value\n";
  for (const auto& p : profile) {
    out << p.s << ',' << p.x.x() << ',' << p.x.y() << ',';
    if (p.value) out << *p.value;
    else out << "nan";
    out << '\n';
  }
}

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows) {
  auto out = open_out(path);
  out << "n_div,h,beta_xx,beta_yy,beta_xy,nodes,elements\n";
  for (const auto& r : rows) {
    const Vec3 b = r.result.normalized();
    out << r.n_div << ',' << r.h << ',' << b[0] << ',' << b[1] << ',' << b[2] << ','
        << r.result.nodes << ',' << r.result.elements << '\n';
  }
}

}  // namespace hygronet
