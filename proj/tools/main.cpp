#include <CLI11.hpp>

#include <cstdio>

#include "commands.hpp"
#include "eshelby/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generalized Eshelby tensors for transient heat conduction"};
  app.require_subcommand(1);
  cli::RunOptions opt;
  std::string config, out = ".";
  int n_max = -1;
  double gate = -1;
  struct Cmd {
    const char* name;
    const char* help;
    int (*run)(const cli::RunOptions&);
  };
  const Cmd cmds[] = {
      {"verify-helmholtz", "harmonic potential on tessellated spheres vs the exact ball", cli::cmd_verify_helmholtz},
      {"verify-sphere", "spatial and time tensors on tessellated spheres vs closed forms", cli::cmd_verify_sphere},
      {"cuboid-maps", "series vs Fourier-grid maps on a cube, jump report", cli::cmd_cuboid_maps},
      {"eim", "equivalent inclusion run for a spherical inhomogeneity", cli::cmd_eim},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : cmds) {
    auto* s = app.add_subcommand(c.name, c.help);
    s->add_option("--config", config, "JSON configuration")->check(CLI::ExistingFile);
    s->add_option("--out", out, "output directory");
    s->add_option("--n-max", n_max, "series truncation override")->check(CLI::Range(0, 200));
    s->add_option("--gate", gate, "gate override in percent")->check(CLI::PositiveNumber);
    subs.push_back(s);
  }
  CLI11_PARSE(app, argc, argv);

  opt.config = config;
  opt.out = out;
  if (n_max >= 0) opt.n_max = n_max;
  if (gate > 0) opt.gate = gate;
  try {
    std::error_code ec;
    cli::fs::create_directories(opt.out, ec);
    if (!cli::fs::is_directory(opt.out)) throw eshelby::ConfigError("output directory not usable: " + out);
    for (size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) return cmds[i].run(opt);
  } catch (const eshelby::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
