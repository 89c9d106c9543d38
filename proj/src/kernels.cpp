#include "decohist/kernels.hpp"

#include <complex>

#include "decohist/core.hpp"

namespace decohist {

ComplexMatrix functional_grid(const std::vector<ComplexMatrix>& path_ops, const ComplexMatrix& rho,
                              Execution exec) {
  const std::size_t n = path_ops.size();
  std::vector<ComplexMatrix> left(n);
  for_each_index(n, exec, [&](std::size_t a) { left[a] = path_ops[a] * rho; });

  ComplexMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  // tr(W C^dag) = sum_jk W(j,k) conj(C(j,k))
  for_each_index(n * n, exec, [&](std::size_t flat) {
    const std::size_t a = flat / n, b = flat % n;
    const Complex* w = left[a].data();
    const Complex* c = path_ops[b].data();
    const Eigen::Index len = left[a].size();
    Complex acc(0.0, 0.0);
    for (Eigen::Index k = 0; k < len; ++k) acc += w[k] * std::conj(c[k]);
    values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
  });
  return values;
}

ComplexMatrix functional_grid_reference(const std::vector<ComplexMatrix>& path_ops,
                                        const ComplexMatrix& rho) {
  const auto n = static_cast<Eigen::Index>(path_ops.size());
  ComplexMatrix values(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      values(a, b) = (path_ops[static_cast<std::size_t>(a)] * rho *
                      path_ops[static_cast<std::size_t>(b)].adjoint())
                         .trace();
  return values;
}

ComplexMatrix sandwich_grid(const std::vector<SandwichStage>& stages,
                            const std::vector<std::vector<std::size_t>>& coords, const ComplexMatrix& rho,
                            Execution exec) {
  const std::size_t n = coords.size();
  ComplexMatrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for_each_index(n * n, exec, [&](std::size_t flat) {
    const std::size_t a = flat / n, b = flat % n;
    ComplexMatrix x = rho;
    std::size_t c = 0;
    for (const auto& stage : stages) {
      if (stage.unitary) x = (*stage.unitary) * x * stage.unitary->adjoint();
      if (!stage.select.empty()) {
        x = stage.select[coords[a][c]] * x * stage.select[coords[b][c]].adjoint();
        ++c;
      }
      if (!stage.forget.empty()) {
        ComplexMatrix acc = ComplexMatrix::Zero(x.rows(), x.cols());
        for (const auto& k : stage.forget) acc += sandwich(k, x);
        x = std::move(acc);
      }
    }
    values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = x.trace();
  });
  return values;
}

}  // namespace decohist
