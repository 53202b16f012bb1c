#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <vector>

#include "hypcurv/config.hpp"
#include "hypcurv/mesh_export.hpp"
#include "hypcurv/radial.hpp"
#include "hypcurv/verify.hpp"

namespace fs = std::filesystem;
using namespace hypcurv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoConverge = 2;
constexpr int kExitCheckFailed = 3;

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;
  std::vector<verify::CheckReport> checks;

  explicit Outputs(const std::string& out_dir) : dir(out_dir) {
    fs::create_directories(dir);
  }

  std::ofstream open(const std::string& name) {
    files.push_back(name);
    return std::ofstream(dir / name);
  }

  void write_report() {
    auto f = open("report.csv");
    f << verify::csv_header() << '\n';
    for (const auto& c : checks) f << verify::to_csv_row(c) << '\n';
  }

  void write_manifest(const std::string& command, int exit_code) {
    auto f = open("manifest.txt");
    f << "command = " << command << '\n';
    f << "exit_code = " << exit_code << '\n';
    for (const auto& name : files)
      if (name != "manifest.txt") f << "artifact = " << name << '\n';
  }

  bool all_checks_pass() const {
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return true;
  }
};

std::string sigma_name(double sigma) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "surface_sigma%.3f.obj", sigma);
  return buf;
}

void append_solution_checks(Outputs& out, const config::RunConfig& cfg,
                            const solver::ScalarField& field,
                            const solver::SolveReport& rep) {
  const double r1 = cfg.domain.exterior_tangent_radius();
  out.checks.push_back(verify::boundary_angle_check(field, rep, r1));
  out.checks.push_back(verify::eta_maximum_principle(field, rep));
  out.checks.push_back(verify::gradient_bound_check(field));
  out.checks.push_back(verify::curvature_domination_check(rep));
  out.checks.push_back(verify::interior_bound_HnHn1(field, cfg.spec));
}

int run_radial(Outputs& out, const config::RunConfig& cfg) {
  auto p = radial::radial_solve(cfg.spec, cfg.radial_delta, cfg.solver.sigma,
                                cfg.solver.eps_target, cfg.radial);
  std::printf("radial: converged=%d iterations=%d residual=%.3e\n",
              p.converged, p.iterations, p.final_max_residual);
  auto f = out.open("radial_profile.csv");
  f << "r,u\n";
  f.precision(12);
  for (int i = 0; i < p.r.size(); ++i) f << p.r[i] << ',' << p.u[i] << '\n';

  verify::CheckReport c;
  c.check_name = "radial_vs_cap";
  c.citation = "on a ball the solution is the umbilic cap";
  const double err = radial::profile_error_vs_cap(p, cfg.radial_delta,
                                                  cfg.solver.sigma, cfg.solver.eps_target);
  c.measured = {{"max_error", err}, {"final_residual", p.final_max_residual}};
  c.bound = "max_error <= 1e-6";
  c.status = (p.converged && err <= 1e-6) ? verify::Status::Pass : verify::Status::Fail;
  out.checks.push_back(c);
  return p.converged ? kExitOk : kExitNoConverge;
}

int cmd_solve(Outputs& out, const config::RunConfig& cfg) {
  if (cfg.radial_mode) return run_radial(out, cfg);
  auto geom = std::make_shared<grid::MaskedGrid>(cfg.domain, cfg.solver.grid_h);
  auto run = solver::eps_continuation(cfg.spec, geom, cfg.solver);
  for (const auto& st : run.stages)
    std::printf("stage eps=%.4f converged=%d iters=%d residual=%.3e\n", st.eps,
                st.converged, st.iterations, st.final_max_residual);
  if (!run.converged) return kExitNoConverge;

  mesh::export_mesh(run.field, (out.dir / sigma_name(cfg.solver.sigma)).string());
  out.files.push_back(sigma_name(cfg.solver.sigma));
  out.files.push_back(sigma_name(cfg.solver.sigma) + ".csv");
  append_solution_checks(out, cfg, run.field, run.stages.back());
  return out.all_checks_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(Outputs& out, const config::RunConfig& cfg) {
  if (cfg.sigmas.size() < 2) {
    std::fprintf(stderr, "sweep needs 'sigmas' with at least two values\n");
    return kExitCheckFailed;
  }
  auto geom = std::make_shared<grid::MaskedGrid>(cfg.domain, cfg.solver.grid_h);
  auto sw = solver::sigma_sweep(cfg.spec, geom, cfg.sigmas, cfg.solver);
  if (!sw.all_converged) return kExitNoConverge;

  for (std::size_t i = 0; i < sw.sigmas.size(); ++i) {
    mesh::export_mesh(sw.fields[i], (out.dir / sigma_name(sw.sigmas[i])).string());
    out.files.push_back(sigma_name(sw.sigmas[i]));
    out.files.push_back(sigma_name(sw.sigmas[i]) + ".csv");
    append_solution_checks(out, cfg, sw.fields[i], sw.runs[i].stages.back());
  }
  verify::CheckReport c;
  c.check_name = "sweep_ordering";
  c.citation = "graphs for increasing sigma are strictly nested";
  c.measured = {{"min_gap", sw.min_gap},
                {"crossing_node", static_cast<double>(sw.crossing_node)}};
  c.bound = "min_gap > 0";
  c.status = sw.ordered ? verify::Status::Pass : verify::Status::Fail;
  out.checks.push_back(c);
  return out.all_checks_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_verify(Outputs& out, const config::RunConfig& cfg) {
  int rc = cmd_solve(out, cfg);
  if (rc == kExitNoConverge) return rc;
  auto suite = verify::run_structure_suite({cfg.spec}, cfg.seed, cfg.structure_samples);
  out.checks.insert(out.checks.end(), suite.begin(), suite.end());
  return out.all_checks_pass() ? kExitOk : kExitCheckFailed;
}

int cmd_oracle(Outputs& out, const config::RunConfig& cfg) {
  auto suite = verify::run_structure_suite({cfg.spec}, cfg.seed, cfg.structure_samples);
  out.checks.insert(out.checks.end(), suite.begin(), suite.end());
  int rc = run_radial(out, cfg);
  if (rc != kExitOk) return rc;
  return out.all_checks_pass() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constant-curvature graphs over planar domains"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
  for (auto* name : {"solve", "sweep", "verify", "oracle"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the sampling seed")
        ->each([&](const std::string&) { seed_set = true; });
  }
  CLI11_PARSE(app, argc, argv);

  auto parsed = config::parse_config_file(config_path);
  if (!parsed.ok()) {
    std::fprintf(stderr, "%s", parsed.render_errors().c_str());
    return kExitCheckFailed;
  }
  config::RunConfig cfg = parsed.config;
  if (seed_set) cfg.seed = seed;

  const std::string command = app.get_subcommands().front()->get_name();
  Outputs out(out_dir);
  int rc = kExitCheckFailed;
  try {
    if (command == "solve") rc = cmd_solve(out, cfg);
    else if (command == "sweep") rc = cmd_sweep(out, cfg);
    else if (command == "verify") rc = cmd_verify(out, cfg);
    else rc = cmd_oracle(out, cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    rc = kExitNoConverge;
  }
  out.write_report();
  out.write_manifest(command, rc);
  for (const auto& c : out.checks)
    std::printf("%-45s %s\n", c.check_name.c_str(),
                verify::status_name(c.status).c_str());
  return rc;
}
