// fredlab-cli <experiment> --config <file> [--seeds a,b,c] [--workers n] [--out dir]
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fredlab/fredlab.h"

namespace {

int report(fredlab_status s, const char* what) {
  std::fprintf(stderr, "fredlab: %s failed (%s): %s\n", what, fredlab_status_name(s), fredlab_last_error());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> experiments{"bulk-index",     "edge-index",     "bec-check", "phase-scan",
                                             "mu-scan",        "homotopy-check", "locality-check", "selfcheck"};
  CLI::App app{"Fredholm and Z2 indices of lattice insulators"};
  app.set_version_flag("--version", fredlab_version());
  std::string experiment, config_path, seeds, out_dir, fault;
  int workers = 0;
  app.add_option("experiment", experiment, "experiment to run")->required()->check(CLI::IsMember(experiments));
  app.add_option("--config", config_path, "configuration file (JSON, comments allowed)");
  app.add_option("--seeds", seeds, "comma separated seed list, overrides the config");
  app.add_option("--workers", workers, "sample-level worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory, overrides the config");
  app.add_option("--inject-fault", fault, "selfcheck mutation fixture")
      ->check(CLI::IsMember({"flip-flux-sign", "flip-step-convention"}))
      ->group("");
  CLI11_PARSE(app, argc, argv);

  if (experiment != "selfcheck" && config_path.empty()) {
    std::fprintf(stderr, "fredlab: --config is required for %s\n", experiment.c_str());
    return 1;
  }

  fredlab_config* config = nullptr;
  fredlab_status s = config_path.empty() ? fredlab_config_default(experiment.c_str(), &config)
                                         : fredlab_config_load(config_path.c_str(), &config);
  if (s != FREDLAB_OK) return report(s, "loading the configuration");
  struct ConfigGuard {
    fredlab_config* c;
    ~ConfigGuard() { fredlab_config_free(c); }
  } config_guard{config};

  if ((s = fredlab_config_set_experiment(config, experiment.c_str())) != FREDLAB_OK) return report(s, "--experiment");
  if (!seeds.empty() && (s = fredlab_config_set_seeds(config, seeds.c_str())) != FREDLAB_OK) return report(s, "--seeds");
  if (workers > 0 && (s = fredlab_config_set_workers(config, workers)) != FREDLAB_OK) return report(s, "--workers");
  if (!out_dir.empty() && (s = fredlab_config_set_output_dir(config, out_dir.c_str())) != FREDLAB_OK)
    return report(s, "--out");

  fredlab_result* result = nullptr;
  if (experiment == "selfcheck") {
    unsigned flags = 0;
    if (fault == "flip-flux-sign") flags |= FREDLAB_FAULT_FLIP_FLUX_SIGN;
    if (fault == "flip-step-convention") flags |= FREDLAB_FAULT_FLIP_STEP_CONVENTION;
    s = fredlab_selfcheck(config, flags, &result);
  } else {
    s = fredlab_run(config, &result);
  }
  if (s != FREDLAB_OK) return report(s, experiment.c_str());
  struct ResultGuard {
    fredlab_result* r;
    ~ResultGuard() { fredlab_result_free(r); }
  } result_guard{result};

  if ((s = fredlab_result_write(result, nullptr)) != FREDLAB_OK) return report(s, "writing outputs");
  std::printf("%s\n", fredlab_result_summary(result));
  return fredlab_result_exit_code(result);
}
