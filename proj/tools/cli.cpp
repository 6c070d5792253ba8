#include "cli.hpp"

#include "hygronet/config.hpp"
#include "hygronet/io.hpp"
#include "hygronet/parallel.hpp"
#include "hygronet/reference.hpp"
#include "hygronet/validation.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iomanip>
#include <ostream>

namespace hygronet::cli {
namespace {

using Clock = std::chrono::steady_clock;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string output_dir;
};

RunConfig make_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? parse_config("", c.overrides)
                                   : load_config(c.config, c.overrides);
  if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
  return cfg;
}

Json inputs_json(const RunConfig& c) {
  const auto& g = c.generation;
  return Json{{"cell_size", g.cell_size},
              {"fibre_length", g.fibre_length},
              {"fibre_width", g.fibre_width},
              {"thickness", g.thickness},
              {"target_coverage", g.target_coverage},
              {"q", g.q},
              {"seed", g.seed},
              {"material", to_json(g.material)},
              {"n_div", c.mesh.n_div},
              {"levels", c.mesh.levels},
              {"generation_cap", c.mesh.generation_cap},
              {"tol_frac", c.mesh.tol_frac},
              {"discretization",
               c.mesh.disc == Discretization::LsXfem ? "ls_xfem" : "centroid_fem"},
              {"delta_chi", c.delta_chi}};
}

Network network_for(const RunConfig& cfg, const std::string& file) {
  if (!file.empty()) return read_network(file);
  if (cfg.network_file) return read_network(*cfg.network_file);
  return generate_network(cfg.generation);
}

void log_run(std::ostream& err, const Network& net, const EffectiveExpansion& e) {
  err << "fibres " << net.fibres.size() << ", coverage " << coverage(net) << ", nodes " << e.nodes
      << ", elements " << e.elements << ", components " << e.components << ", pinned DOFs "
      << e.pinned_dofs << ", quadrature calls " << e.quadrature.calls << " leaves "
      << e.quadrature.leaves << ", wall time " << std::setprecision(3) << e.timings.total()
      << " s\n";
}

int cmd_generate(const Common& common, const std::string& out_file, std::ostream& out,
                 std::ostream& err) {
  const RunConfig cfg = make_config(common);
  const Network net = generate_network(cfg.generation);
  const std::filesystem::path path =
      out_file.empty() ? cfg.output_dir / "network.json" : std::filesystem::path(out_file);
  write_network(path, net);
  out << "wrote " << path.string() << ": " << net.fibres.size() << " fibres, coverage "
      << coverage(net) << '\n';
  (void)err;
  return kOk;
}

int cmd_homogenize(const Common& common, const std::string& network_file, std::ostream& out,
                   std::ostream& err) {
  const RunConfig cfg = make_config(common);
  const Network net = network_for(cfg, network_file);
  const auto t0 = Clock::now();
  PipelineResult run = run_pipeline(net, cfg.mesh, cfg.delta_chi, LoadCase::free_swelling());
  EffectiveExpansion e = summarize(run, net, cfg.delta_chi == 0.0 ? 1.0 : cfg.delta_chi);
  if (cfg.delta_chi == 0.0) e.beta.setZero();
  if (cfg.delta_chi != 0.0 && run.solution.macro_rank < 3)
    throw DisconnectedStructureError("no fibre path carries all three macroscopic strains (" +
                                     std::to_string(run.system.components.size()) +
                                     " components, macro rank " +
                                     std::to_string(run.solution.macro_rank) + ")");
  log_run(err, net, e);

  Json result{{"command", "homogenize"},
              {"inputs", inputs_json(cfg)},
              {"fibres", net.fibres.size()},
              {"realized_coverage", coverage(net)},
              {"effective_expansion", to_json(e)}};
  std::filesystem::create_directories(cfg.output_dir);
  write_json(cfg.output_dir / "results.json", result);
  Json timings = timings_json(e.timings);
  timings["wall"] = std::chrono::duration<double>(Clock::now() - t0).count();
  write_json(cfg.output_dir / "timings.json", timings);

  if (cfg.write_matrix) {
    write_matrix_market(cfg.output_dir / "K.mtx", run.system.K);
    write_matrix_market(cfg.output_dir / "f.mtx", run.system.f);
  }
  if (cfg.write_vtk) {
    FieldSnapshot snap = make_snapshot(net, std::move(run), 0.0, cfg.delta_chi, 0.0);
    snap.magnification = cfg.magnification;
    write_vtk(cfg.output_dir / "fields.vtk", snap);
    write_vtk(cfg.output_dir / "deformed.vtk", snap, true);
  }
  const Vec3 b = e.normalized();
  out << "beta/beta_l = (" << b[0] << ", " << b[1] << ", " << b[2] << ")\n";
  return kOk;
}

int cmd_uniaxial(const Common& common, const std::string& preset, bool reference,
                 std::ostream& out, std::ostream& err) {
  RunConfig cfg = make_config(common);
  if (!preset.empty()) cfg.preset = parse_preset(preset);
  const auto t0 = Clock::now();
  FieldSnapshot snap = reference
                           ? reference_uniaxial(cfg.preset, cfg.mesh.n_div, cfg.sigma0, cfg.width_frac)
                           : uniaxial_case(cfg.preset, cfg.sigma0, cfg.mesh, cfg.width_frac);
  snap.magnification = cfg.magnification;
  const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
  const Vec3 s = snap.mean_fibre_stress();
  err << "nodes " << snap.run.mesh.node_count() << ", elements " << snap.run.mesh.element_count()
      << ", wall time " << std::setprecision(3) << wall << " s\n";

  FieldSelector sel;
  sel.fibre = 0;
  const double y = 0.25 * cfg.width_frac;
  const auto profile = sample_cross_section(snap, Vec2(0.0, y), Vec2(snap.network.cell_size, y),
                                            cfg.profile_samples, sel);
  Json result{{"command", "uniaxial"},
              {"preset", preset_name(cfg.preset)},
              {"solver", reference ? "conforming_reference" : "non_conforming"},
              {"inputs", inputs_json(cfg)},
              {"sigma0", cfg.sigma0},
              {"width_frac", cfg.width_frac},
              {"nodes", snap.run.mesh.node_count()},
              {"elements", snap.run.mesh.element_count()},
              {"stress_ratio", {s[0], s[1], s[2]}},
              {"area_ratio", snap.area_ratio()}};
  std::filesystem::create_directories(cfg.output_dir);
  write_json(cfg.output_dir / "results.json", result);
  write_json(cfg.output_dir / "timings.json", Json{{"wall", wall}});
  write_profile_csv(cfg.output_dir / "profile_A-A.csv", profile);
  if (cfg.write_vtk) write_vtk(cfg.output_dir / "fields.vtk", snap);
  out << "sigma_xx/sigma0 = " << s[0] << ", A/A0 = " << snap.area_ratio() << '\n';
  return kOk;
}

int cmd_validate(bool full, const std::vector<int>& only, std::ostream& out) {
  const std::vector<int> ids = !only.empty() ? only : (full ? all_criteria() : quick_criteria());
  bool ok = true;
  run_criteria(ids, [&](const CriterionResult& r) {
    out << format_result(r) << std::endl;
    ok = ok && r.passed;
  });
  return ok ? kOk : kFailure;
}

int cmd_sweep(const Common& common, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = make_config(common);
  std::vector<std::uint64_t> seeds = cfg.seeds;
  if (seeds.empty()) seeds.push_back(cfg.generation.seed);
  struct Row {
    std::uint64_t seed;
    std::optional<EffectiveExpansion> e;
    std::string error;
  };
  std::vector<Row> rows(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    GenerationParams g = cfg.generation;
    g.seed = seeds[i];
    rows[i].seed = seeds[i];
    try {
      rows[i].e = effective_expansion(generate_network(g), cfg.mesh, cfg.delta_chi);
    } catch (const DisconnectedStructureError& ex) {
      rows[i].error = ex.what();
    }
  });

  Json list = Json::array();
  Vec3 mean = Vec3::Zero();
  int n = 0;
  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream csv(cfg.output_dir / "sweep.csv");
  csv << std::setprecision(17) << "seed,beta_xx,beta_yy,beta_xy,status\n";
  for (const auto& r : rows) {
    if (r.e) {
      const Vec3 b = r.e->normalized();
      mean += b;
      ++n;
      list.push_back({{"seed", r.seed}, {"effective_expansion", to_json(*r.e)}});
      csv << r.seed << ',' << b[0] << ',' << b[1] << ',' << b[2] << ",ok\n";
    } else {
      err << "seed " << r.seed << ": " << r.error << '\n';
      list.push_back({{"seed", r.seed}, {"error", r.error}});
      csv << r.seed << ",,,,disconnected\n";
    }
  }
  if (n > 0) mean /= n;
  write_json(cfg.output_dir / "sweep.json",
             Json{{"command", "sweep"},
                  {"inputs", inputs_json(cfg)},
                  {"runs", list},
                  {"mean_beta_normalized", {mean[0], mean[1], mean[2]}},
                  {"successful_runs", n}});
  out << n << " of " << rows.size() << " realizations solved; mean beta/beta_l = (" << mean[0]
      << ", " << mean[1] << ", " << mean[2] << ")\n";
  return n > 0 ? kOk : kSolverError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hygronet: hygro-expansion homogenization of periodic fibre networks"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores, env HYGRONET_THREADS)");

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config, "INI configuration file");
    sub->add_option("-s,--set", common.overrides, "Override, e.g. mesh.n_div=50");
    sub->add_option("-o,--output", common.output_dir, "Output directory");
  };

  std::string out_file;
  auto* gen = app.add_subcommand("generate", "Generate a random network");
  add_common(gen);
  gen->add_option("--network-out", out_file, "Network JSON path");

  std::string network_file;
  auto* hom = app.add_subcommand("homogenize", "Effective hygro-expansivity of a network");
  add_common(hom);
  hom->add_option("-n,--network", network_file, "Network JSON (default: generate from config)");

  std::string preset;
  bool reference = false;
  auto* uni = app.add_subcommand("uniaxial", "Preset geometry under a horizontal stress");
  add_common(uni);
  uni->add_option("-p,--preset", preset, "parallel_strip or orthogonal_cross");
  uni->add_flag("--reference", reference, "Use the conforming reference discretization");

  bool full = false;
  std::vector<int> only;
  auto* val = app.add_subcommand("validate", "Run the acceptance checks");
  val->add_flag("--full", full, "Include the long-running checks");
  val->add_option("--criterion", only, "Run only these criteria")->check(CLI::Range(1, 10));

  auto* sweep = app.add_subcommand("sweep", "Effective expansivity over several seeds");
  add_common(sweep);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  if (threads > 0) set_thread_count(threads);

  try {
    if (*gen) return cmd_generate(common, out_file, out, err);
    if (*hom) return cmd_homogenize(common, network_file, out, err);
    if (*uni) return cmd_uniaxial(common, preset, reference, out, err);
    if (*val) return cmd_validate(full, only, out);
    if (*sweep) return cmd_sweep(common, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InputDomainError& e) {
    err << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SingularSystemError& e) {
    err << "solver error: " << e.what() << " (DOF " << e.dof() << ")\n";
    return kSolverError;
  } catch (const DisconnectedStructureError& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace hygronet::cli
