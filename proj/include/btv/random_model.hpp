#pragma once

#include <cstdint>
#include <string>

#include "btv/semantics.hpp"

namespace btv {

/// Shape limits for generated models. Depth counts edges from the root, so
/// the deepest leaf sits at `max_depth`.
struct RandomModelOptions {
  std::size_t max_nodes = 10;
  std::uint32_t max_depth = 4;
  std::size_t max_vars = 3;
  std::uint64_t max_domain = 20;  // values per integer variable
  bool deterministic = true;      // exactly one enabled outcome per action
  bool allow_running = true;
  bool allow_effects = true;
  bool allow_hook = true;
  bool with_invariant = false;
};

/// A random well-formed model in .bt syntax, fully determined by `seed`.
/// Generated effects never leave their domains.
std::string random_model_text(std::uint64_t seed, const RandomModelOptions& options = {});

/// random_model_text, parsed and elaborated.
Model random_model(std::uint64_t seed, const RandomModelOptions& options = {});

}  // namespace btv
