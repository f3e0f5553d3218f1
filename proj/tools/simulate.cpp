#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "packetsim/parallel.hpp"
#include "packetsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitAssertion = 4;
constexpr int kExitNumerical = 5;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seeded phase-space collapse scenarios: run, verify, report"};
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool verify_only = false;
  app.add_option("config", config_path, "scenario config file (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides the config's out_dir)");
  app.add_option("--threads", threads, "worker thread cap (default: hardware)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--verify-only", verify_only, "validate the config, run nothing");
  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) packetsim::set_max_threads(threads);
    packetsim::ScenarioConfig cfg = packetsim::load_scenario_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    packetsim::validate_scenario_config(cfg);
    if (verify_only) {
      std::printf("config ok: scenario %s\n", packetsim::scenario_name(cfg.scenario));
      return kExitOk;
    }
    const packetsim::ScenarioResult res = packetsim::run_scenario(cfg);
    std::fputs(packetsim::emit_report(cfg.out_dir).c_str(), stdout);
    if (!res.all_pass()) {
      std::fprintf(stderr, "scenario assertion failed\n");
      return kExitAssertion;
    }
    return kExitOk;
  } catch (const packetsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const packetsim::PreconditionError& e) {
    std::fprintf(stderr, "precondition failure: %s\n", e.what());
    return kExitPrecondition;
  } catch (const packetsim::NumericalError& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitAssertion;
  }
}
