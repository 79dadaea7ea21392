#include <iostream>

#include "CLI11.hpp"

#include "btv/random_model.hpp"

int main(int argc, char** argv) {
  btv::RandomModelOptions options;
  std::uint64_t seed = 0;
  bool nondeterministic = false;
  bool invariant = false;

  CLI::App app{"Print a seeded random behavior tree model"};
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  app.add_option("--max-nodes", options.max_nodes, "Node limit including the root")->capture_default_str();
  app.add_option("--max-depth", options.max_depth, "Depth limit")->capture_default_str();
  app.add_option("--max-vars", options.max_vars, "Variable limit")->capture_default_str();
  app.add_option("--max-domain", options.max_domain, "Values per integer variable")->capture_default_str();
  app.add_flag("--nondeterministic", nondeterministic, "Allow overlapping outcome guards");
  app.add_flag("--invariant", invariant, "Emit a random invariant");
  CLI11_PARSE(app, argc, argv);

  options.deterministic = !nondeterministic;
  options.with_invariant = invariant;
  std::cout << btv::random_model_text(seed, options);
  return 0;
}
