#pragma once

// Validated complex-matrix algebra and the quantum primitives shared by the
// rest of the library: density matrices, unitaries, instruments and the
// measure-and-forget channel. All values are immutable once constructed.

#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "decohist/error.hpp"

namespace decohist {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

struct Tolerances {
  double validation = 1e-9;   // matrix-entry scale checks
  double decoherence = 1e-9;  // verdict threshold on residuals

  void check() const;
};

/// Throws NotSquare / NonFinite for malformed input.
void require_square_finite(const ComplexMatrix& m, std::string_view what);

double max_abs(const ComplexMatrix& m);
double hermiticity_defect(const ComplexMatrix& m);
ComplexMatrix identity(Eigen::Index dim);

class DensityMatrix {
 public:
  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  double purity() const;

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  friend DensityMatrix validate_density(const ComplexMatrix&, const Tolerances&);

  ComplexMatrix m_;
};

class UnitaryOp {
 public:
  const ComplexMatrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  bool is_identity() const noexcept { return identity_; }

  static UnitaryOp identity(Eigen::Index dim);

 private:
  UnitaryOp(ComplexMatrix m, bool is_id) : m_(std::move(m)), identity_(is_id) {}
  friend UnitaryOp validate_unitary(const ComplexMatrix&, const Tolerances&);

  ComplexMatrix m_;
  bool identity_ = false;
};

/// One operator A_{mu i} of an instrument: outcome label mu, internal index i.
struct Effect {
  std::string label;
  int index = 0;
  ComplexMatrix matrix;
};

enum class InstrumentKind { projective, generalized };

std::string_view to_string(InstrumentKind kind);

class Instrument {
 public:
  const std::vector<Effect>& effects() const noexcept { return effects_; }
  InstrumentKind kind() const noexcept { return kind_; }
  Eigen::Index dim() const noexcept { return effects_.front().matrix.rows(); }

  /// Distinct outcome labels in order of first appearance.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  /// Effect positions that belong to labels()[k].
  const std::vector<std::size_t>& members(std::size_t label_pos) const { return members_[label_pos]; }
  /// POVM element E_mu = sum_i A^dag A for labels()[k].
  const ComplexMatrix& povm(std::size_t label_pos) const { return povm_[label_pos]; }

  std::size_t label_position(const std::string& label) const;
  bool all_hermitian(double tol) const;
  bool one_index_per_label() const;

  /// The {1} instrument: a single outcome that always occurs.
  static Instrument trivial(Eigen::Index dim);

 private:
  Instrument() = default;
  friend Instrument validate_instrument(std::vector<Effect>, const Tolerances&);

  std::vector<Effect> effects_;
  InstrumentKind kind_ = InstrumentKind::generalized;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<ComplexMatrix> povm_;
};

/// A completely positive map given by Kraus operators, rho -> sum K rho K^dag.
class Channel {
 public:
  explicit Channel(std::vector<ComplexMatrix> kraus) : kraus_(std::move(kraus)) {}

  ComplexMatrix apply(const ComplexMatrix& rho) const;
  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }

 private:
  std::vector<ComplexMatrix> kraus_;
};

DensityMatrix validate_density(const ComplexMatrix& m, const Tolerances& tol = {});
UnitaryOp validate_unitary(const ComplexMatrix& m, const Tolerances& tol = {});
Instrument validate_instrument(std::vector<Effect> effects, const Tolerances& tol = {});

/// Hermitian PSD square root via eigendecomposition; eigenvalues in
/// [-tol, 0) are clipped to zero, anything below -tol is NotPSD.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol = 1e-9);

/// Kronecker product. Row index of the pair (r_a, r_b) is r_a * dim(b) + r_b.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

struct StateStatistics {
  double mean = 0.0;
  double stddev = 0.0;
};

StateStatistics state_statistics(const DensityMatrix& rho, const ComplexMatrix& observable,
                                 double tol = 1e-9);

/// rho -> sum_{mu i} A rho A^dag: perform the measurement and discard the result.
Channel measure_and_forget_channel(const Instrument& inst);

/// A rho A^dag, with a fast path for diagonal A.
ComplexMatrix sandwich(const ComplexMatrix& a, const ComplexMatrix& rho);
bool is_diagonal(const ComplexMatrix& m);

}  // namespace decohist
