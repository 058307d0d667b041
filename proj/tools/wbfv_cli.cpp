#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "wbfv/scenario.hpp"

namespace {

void print_file(const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  std::cout << in.rdbuf();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wbfv: well-balanced finite-volume runner"};
  app.require_subcommand(1);
  app.fallthrough();

  std::vector<std::string> overrides;
  std::string out_dir;
  app.add_option("--set", overrides, "override a config key, section.key=value")->allow_extra_args(false);
  app.add_option("--out", out_dir, "output directory (default: $WBFV_OUTPUT_DIR or ./wbfv_output)");

  std::string path;
  auto* run = app.add_subcommand("run", "run a scenario and write snapshot and time-series CSVs");
  run->add_option("config", path)->required()->check(CLI::ExistingFile);

  double preserve_time = 5.0;
  auto* preserve = app.add_subcommand("preserve", "start at the discrete steady state and measure drift");
  preserve->add_option("config", path)->required()->check(CLI::ExistingFile);
  preserve->add_option("--time", preserve_time, "final time");

  std::vector<std::size_t> cells;
  std::size_t ref = 0;
  double study_time = -1.0;
  std::vector<int> orders{1, 2};
  auto* converge = app.add_subcommand("converge", "L1 errors and orders on doubling meshes");
  converge->add_option("config", path)->required()->check(CLI::ExistingFile);
  converge->add_option("--cells", cells, "resolutions, each twice the previous");
  converge->add_option("--ref", ref, "reference cells");
  converge->add_option("--time", study_time, "comparison time");
  converge->add_option("--orders", orders, "scheme orders")->check(CLI::IsMember({1, 2}));

  std::vector<double> sigmas;
  auto* cont = app.add_subcommand("continue", "differential continuation over decreasing sigma");
  cont->add_option("config", path)->required()->check(CLI::ExistingFile);
  cont->add_option("--sigmas", sigmas, "decreasing noise values");

  CLI11_PARSE(app, argc, argv);

  try {
    wbfv::ScenarioConfig cfg = wbfv::load_config(path);
    wbfv::apply_overrides(cfg, overrides);
    if (!cells.empty()) cfg.run.study_cells = cells;
    if (ref) cfg.run.reference_cells = ref;
    if (study_time >= 0.0) cfg.run.study_time = study_time;
    if (!sigmas.empty()) cfg.run.sigmas = sigmas;

    wbfv::OutputOptions out{out_dir.empty() ? wbfv::output_dir_from_env() : out_dir};
    wbfv::RunReport rep;
    if (*run)
      rep = wbfv::run_scenario(cfg, out);
    else if (*preserve)
      rep = wbfv::preservation_test(cfg, preserve_time, out);
    else if (*converge)
      rep = wbfv::convergence_study(cfg, out, orders);
    else
      rep = wbfv::continuation_study(cfg, out);

    print_file(rep.report_path);
    if (!rep.completed) std::cerr << "run failed: " << rep.error << "\n";
    return rep.ok() ? 0 : 1;
  } catch (const wbfv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
