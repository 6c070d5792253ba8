#include "hygronet/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hygronet {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"cell", {"size"}},
      {"fibre", {"length", "width", "thickness"}},
      {"material", {"E_l", "E_t", "G_lt", "nu_lt", "nu_tl", "beta_l", "beta_t"}},
      {"network", {"coverage", "q", "seed", "seeds", "file"}},
      {"mesh", {"n_div", "levels", "generation_cap", "tol_frac", "discretization"}},
      {"load", {"kind", "delta_chi", "sigma_xx", "sigma_yy", "sigma_xy", "preset", "sigma0",
                "width_frac"}},
      {"output", {"dir", "magnification", "vtk", "matrix_market", "profile_samples"}},
  };
  return s;
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
  if (!node) return fallback;
  std::istringstream in(*node);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) throw ConfigError(key, "cannot parse '" + *node + "'");
  return value;
}

std::string get_str(const pt::ptree& tree, const std::string& key, const std::string& fallback) {
  return tree.get<std::string>(pt::ptree::path_type(key, '.'), fallback);
}

bool get_bool(const pt::ptree& tree, const std::string& key, bool fallback) {
  const std::string v = get_str(tree, key, fallback ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError(section, "unknown section");
    if (!body.data().empty()) throw ConfigError(section, "key outside of a section");
    for (const auto& [key, value] : body)
      if (!it->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
  }
}

void apply_override(pt::ptree& tree, const std::string& entry) {
  const auto eq = entry.find('=');
  const auto dot = entry.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ConfigError(entry, "override must look like section.key=value");
  tree.put(pt::ptree::path_type(entry.substr(0, eq), '.'), entry.substr(eq + 1));
}

void need(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

void RunConfig::validate() const {
  const auto& g = generation;
  need(g.cell_size > 0.0, "cell.size", "must be positive");
  need(g.fibre_length > 0.0, "fibre.length", "must be positive");
  need(g.fibre_width > 0.0, "fibre.width", "must be positive");
  need(g.thickness > 0.0, "fibre.thickness", "must be positive");
  need(g.target_coverage > 0.0, "network.coverage", "must be positive");
  need(g.q >= 0.0 && g.q < 1.0, "network.q", "must lie in [0, 1)");
  try {
    g.material.validate();
  } catch (const InputDomainError& e) {
    throw ConfigError("material", e.what());
  }
  need(mesh.n_div >= 2, "mesh.n_div", "must be at least 2");
  need(mesh.levels >= 0, "mesh.levels", "must be non-negative");
  need(mesh.generation_cap >= 0, "mesh.generation_cap", "must be non-negative");
  need(mesh.tol_frac > 0.0 && mesh.tol_frac <= 1.0, "mesh.tol_frac", "must lie in (0, 1]");
  need(std::isfinite(delta_chi), "load.delta_chi", "must be finite");
  need(macro_stress.allFinite(), "load.sigma", "must be finite");
  need(std::isfinite(sigma0), "load.sigma0", "must be finite");
  need(width_frac > 0.0 && width_frac < 1.0, "load.width_frac", "must lie in (0, 1)");
  need(magnification >= 0.0, "output.magnification", "must be non-negative");
  need(profile_samples > 0, "output.profile_samples", "must be positive");
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", e.what());
  }
  for (const auto& o : overrides) apply_override(tree, o);
  check_keys(tree);

  RunConfig c;
  auto& g = c.generation;
  g.cell_size = get(tree, "cell.size", g.cell_size);
  g.fibre_length = get(tree, "fibre.length", g.fibre_length);
  g.fibre_width = get(tree, "fibre.width", g.fibre_width);
  g.thickness = get(tree, "fibre.thickness", g.thickness);
  auto& m = g.material;
  m.E_l = get(tree, "material.E_l", m.E_l);
  m.E_t = get(tree, "material.E_t", m.E_t);
  m.G_lt = get(tree, "material.G_lt", m.G_lt);
  m.nu_lt = get(tree, "material.nu_lt", m.nu_lt);
  m.nu_tl = get(tree, "material.nu_tl", m.nu_tl);
  m.beta_l = get(tree, "material.beta_l", m.beta_l);
  m.beta_t = get(tree, "material.beta_t", m.beta_t);
  g.target_coverage = get(tree, "network.coverage", g.target_coverage);
  g.q = get(tree, "network.q", g.q);
  g.seed = get<std::uint64_t>(tree, "network.seed", g.seed);
  {
    std::string list = get_str(tree, "network.seeds", "");
    std::replace(list.begin(), list.end(), ',', ' ');
    std::istringstream in(list);
    std::string tok;
    while (in >> tok) {
      try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(tok, &used);
        if (used != tok.size() || tok.front() == '-') throw std::invalid_argument(tok);
        c.seeds.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError("network.seeds", "cannot parse '" + tok + "'");
      }
    }
  }
  const std::string file = get_str(tree, "network.file", "");
  if (!file.empty()) c.network_file = file;

  c.mesh.n_div = get(tree, "mesh.n_div", c.mesh.n_div);
  c.mesh.levels = get(tree, "mesh.levels", c.mesh.levels);
  c.mesh.generation_cap = get(tree, "mesh.generation_cap", c.mesh.generation_cap);
  c.mesh.tol_frac = get(tree, "mesh.tol_frac", c.mesh.tol_frac);
  const std::string disc = get_str(tree, "mesh.discretization", "ls_xfem");
  if (disc == "ls_xfem") c.mesh.disc = Discretization::LsXfem;
  else if (disc == "centroid_fem") c.mesh.disc = Discretization::CentroidFem;
  else throw ConfigError("mesh.discretization", "expected ls_xfem or centroid_fem");

  const std::string kind = get_str(tree, "load.kind", "free_swelling");
  if (kind == "free_swelling") c.load = LoadKind::FreeSwelling;
  else if (kind == "macro_stress") c.load = LoadKind::MacroStress;
  else throw ConfigError("load.kind", "expected free_swelling or macro_stress");
  c.delta_chi = get(tree, "load.delta_chi", c.delta_chi);
  c.macro_stress = Vec3(get(tree, "load.sigma_xx", 0.0), get(tree, "load.sigma_yy", 0.0),
                        get(tree, "load.sigma_xy", 0.0));
  try {
    c.preset = parse_preset(get_str(tree, "load.preset", "parallel_strip"));
  } catch (const InputDomainError& e) {
    throw ConfigError("load.preset", e.what());
  }
  c.sigma0 = get(tree, "load.sigma0", c.sigma0);
  c.width_frac = get(tree, "load.width_frac", c.width_frac);

  c.output_dir = get_str(tree, "output.dir", c.output_dir.string());
  c.magnification = get(tree, "output.magnification", c.magnification);
  c.write_vtk = get_bool(tree, "output.vtk", c.write_vtk);
  c.write_matrix = get_bool(tree, "output.matrix_market", c.write_matrix);
  c.profile_samples = get(tree, "output.profile_samples", c.profile_samples);

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  const auto& g = c.generation;
  const auto& m = g.material;
  os << "[cell]\nsize = " << g.cell_size << "\n\n";
  os << "[fibre]\nlength = " << g.fibre_length << "\nwidth = " << g.fibre_width
     << "\nthickness = " << g.thickness << "\n\n";
  os << "[material]\nE_l = " << m.E_l << "\nE_t = " << m.E_t << "\nG_lt = " << m.G_lt
     << "\nnu_lt = " << m.nu_lt << "\nnu_tl = " << m.nu_tl << "\nbeta_l = " << m.beta_l
     << "\nbeta_t = " << m.beta_t << "\n\n";
  os << "[network]\ncoverage = " << g.target_coverage << "\nq = " << g.q << "\nseed = " << g.seed
     << '\n';
  if (!c.seeds.empty()) {
    os << "seeds = ";
    for (std::size_t i = 0; i < c.seeds.size(); ++i) os << (i ? "," : "") << c.seeds[i];
    os << '\n';
  }
  if (c.network_file) os << "file = " << c.network_file->string() << '\n';
  os << "\n[mesh]\nn_div = " << c.mesh.n_div << "\nlevels = " << c.mesh.levels
     << "\ngeneration_cap = " << c.mesh.generation_cap << "\ntol_frac = " << c.mesh.tol_frac
     << "\ndiscretization = "
     << (c.mesh.disc == Discretization::LsXfem ? "ls_xfem" : "centroid_fem") << "\n\n";
  os << "[load]\nkind = " << (c.load == LoadKind::MacroStress ? "macro_stress" : "free_swelling")
     << "\ndelta_chi = " << c.delta_chi << "\nsigma_xx = " << c.macro_stress[0]
     << "\nsigma_yy = " << c.macro_stress[1] << "\nsigma_xy = " << c.macro_stress[2]
     << "\npreset = " << preset_name(c.preset) << "\nsigma0 = " << c.sigma0
     << "\nwidth_frac = " << c.width_frac << "\n\n";
  os << "[output]\ndir = " << c.output_dir.string() << "\nmagnification = " << c.magnification
     << "\nvtk = " << (c.write_vtk ? "true" : "false")
     << "\nmatrix_market = " << (c.write_matrix ? "true" : "false")
     << "\nprofile_samples = " << c.profile_samples << '\n';
  return os.str();
}

}  // namespace hygronet
