#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/gradcheck.hpp"
#include "core/model.hpp"

namespace mmb {

struct GradCheckCase {
  std::string name;
  std::uint64_t seed = 0;
  double max_rel_error = 0.0;
  std::size_t worst_coord = 0;
  bool finite = true;
  bool passed = false;
};

struct GradCheckSuite {
  std::vector<GradCheckCase> cases;
  bool all_passed = true;
  double tolerance = 1e-4;

  std::string to_text() const;
};

// Runs the finite-difference suite over every loss path: the individual
// ops, the addressing -> softmax -> recall -> fusion -> cross-entropy
// chain, and the saving / bridging / task / total losses differentiated
// against every model parameter. Structural dimensions are drawn per seed
// in [1, max_dim]. sabotage_case, when non-empty, injects a deliberately
// wrong adjoint into the named case; the suite must then flag it.
GradCheckSuite run_gradcheck_suite(std::uint64_t seed_base, int num_seeds,
                                   int max_dim, double tolerance = 1e-4,
                                   const std::string& sabotage_case = "");

// Packs all learnable tensors into one flat vector (checkpoint order).
Tensor flatten_parameters(const Model& model);

// Rebuilds a model whose parameters are graph-linked slices of the flat
// vector, so one grad_check covers every parameter at once.
Model model_from_flat(Graph& g, const Model& shape_template,
                      const Tensor& flat);

}  // namespace mmb
