#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "pmelab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pmelab: nonlinear-diffusion regularity experiments"};
  app.require_subcommand(1);

  std::string config, out = "out";
  int threads = 1;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd, bool config_required = true) {
    cmd->add_option("--config", config, "JSON experiment config")->required(config_required);
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--threads", threads, "worker threads (speed only, results identical)");
    cmd->add_option("--seed", seed, "seed recorded for randomized experiments");
  };

  // `run` dispatches on the config's "kind"; named subcommands are aliases
  // that also check the kind matches.
  const char* kinds[] = {"exponents", "barenblatt", "solve",         "norms",
                         "sweep",     "kinetic",    "scaling-check", "verify-appendix-b"};
  CLI::App* run_cmd = app.add_subcommand("run", "run a config (kind taken from the file)");
  add_common(run_cmd);
  std::string expected_kind;
  for (const char* k : kinds) {
    CLI::App* c = app.add_subcommand(k, std::string("run a '") + k + "' config");
    add_common(c);
    c->callback([&expected_kind, k] { expected_kind = k; });
  }

  std::string cmp_a, cmp_b, cmp_sa, cmp_sb;
  CLI::App* cmp = app.add_subcommand("compare", "L1 contraction check between two stored runs");
  cmp->add_option("--a", cmp_a, "first run (PMEF trajectory)")->required();
  cmp->add_option("--b", cmp_b, "second run (PMEF trajectory)")->required();
  cmp->add_option("--source-a", cmp_sa, "source trajectory of the first run");
  cmp->add_option("--source-b", cmp_sb, "source trajectory of the second run");
  cmp->add_option("--out", out, "output directory");

  CLI11_PARSE(app, argc, argv);

  if (cmp->parsed()) return pme::runner::compare(cmp_a, cmp_b, cmp_sa, cmp_sb, out);

  if (!expected_kind.empty()) {
    // verify the config kind matches the subcommand before running
    std::ifstream is(config);
    if (is) {
      try {
        nlohmann::json cfg;
        is >> cfg;
        if (cfg.value("kind", expected_kind) != expected_kind) {
          fprintf(stderr, "config kind '%s' does not match subcommand '%s'\n",
                  cfg.value("kind", "").c_str(), expected_kind.c_str());
          return 2;
        }
      } catch (...) {
        // parse errors are reported by run()
      }
    }
  }
  return pme::runner::run(config, out, threads, seed);
}
