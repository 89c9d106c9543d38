#pragma once

// Data-parallel kernels. Every output entry is computed by exactly one
// iteration with a fixed inner summation order, so results are bit-identical
// for any thread count. The *_reference variants are the plain serial
// formulas kept for tests and benchmarks.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace decohist {

using ComplexMatrix = Eigen::MatrixXcd;

enum class Execution { serial, parallel };

/// Runs body(i) for i in [0, n). Bodies must not throw.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  const long count = static_cast<long>(n);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  }
}

/// values(a, b) = tr(C_a rho C_b^dag). Caches C_a rho once per row and
/// evaluates each trace as an entrywise inner product.
ComplexMatrix functional_grid(const std::vector<ComplexMatrix>& path_ops, const ComplexMatrix& rho,
                              Execution exec = Execution::parallel);

/// Same quantity, forming the full product C_a rho C_b^dag for every pair.
ComplexMatrix functional_grid_reference(const std::vector<ComplexMatrix>& path_ops,
                                        const ComplexMatrix& rho);

/// One time step of a two-sided propagation X -> L X R^dag.
struct SandwichStage {
  std::optional<ComplexMatrix> unitary;  // applied first, on both sides
  std::vector<ComplexMatrix> select;     // left/right operator picked by the pair's coordinate
  std::vector<ComplexMatrix> forget;     // X -> sum_k K X K^dag
};

/// values(a, b) = tr of rho propagated through `stages`, where stage s picks
/// select[coords[a][c]] on the left and select[coords[b][c]] on the right
/// (c counts the stages that have a non-empty `select`).
ComplexMatrix sandwich_grid(const std::vector<SandwichStage>& stages,
                            const std::vector<std::vector<std::size_t>>& coords, const ComplexMatrix& rho,
                            Execution exec = Execution::parallel);

}  // namespace decohist
