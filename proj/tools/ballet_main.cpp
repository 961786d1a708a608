#include <iostream>

#include "CLI11.hpp"
#include "ballet/cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Candidate-pool Bayesian optimization with superlevel-set ROI "
               "filtering"};
  ballet::cli::RunManifest manifest;
  bool list = false;
  app.add_option("config", manifest.config_path, "Experiment config file");
  app.add_option("--out", manifest.out_dir, "Output directory")
      ->capture_default_str();
  app.add_option("--jobs", manifest.jobs, "Trials run in parallel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--overwrite", manifest.overwrite, "Replace existing outputs");
  app.add_flag("--list-methods", list, "Print acquisition families and exit");
  app.add_option("--seed-offset", manifest.seed_offset,
                 "Added to every configured seed")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ballet::cli::kExitConfig;
  }

  if (list) {
    std::cout << ballet::cli::list_methods();
    return ballet::cli::kExitOk;
  }
  if (manifest.config_path.empty()) {
    std::cerr << "error kind=config code=1 key=config message=\"a config "
                 "path is required\"\n";
    return ballet::cli::kExitConfig;
  }
  return ballet::cli::run(manifest, std::cout, std::cerr);
}
