#include "decohist/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace decohist {

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// A^dag A, elementwise for diagonal A.
ComplexMatrix gram(const ComplexMatrix& a) {
  if (is_diagonal(a)) return a.diagonal().cwiseAbs2().cast<Complex>().asDiagonal();
  return a.adjoint() * a;
}

}  // namespace

void Tolerances::check() const {
  if (!(validation > 0.0) || !(decoherence > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
  }
}

void require_square_finite(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw Error(ErrorKind::NotSquare, std::string(what) + " must be a non-empty square matrix");
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
  }
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) { return max_abs(m - m.adjoint()); }

ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix validate_density(const ComplexMatrix& m, const Tolerances& tol) {
  require_square_finite(m, "density matrix");
  const double herm = hermiticity_defect(m);
  if (herm > tol.validation) {
    throw Error(ErrorKind::NotHermitian,
                "density matrix is not Hermitian: max|M - M^dag| = " + fmt_double(herm));
  }
  ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol.validation) {
    throw Error(ErrorKind::NotPSD,
                "density matrix is not positive semidefinite: min eigenvalue " + fmt_double(min_eig));
  }
  const Complex tr = m.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tol.validation) {
    throw Error(ErrorKind::TraceNotOne, "density matrix trace is " + fmt_double(tr.real()) +
                                            (tr.imag() != 0.0 ? " + " + fmt_double(tr.imag()) + "i" : ""));
  }
  return DensityMatrix(m);
}

UnitaryOp UnitaryOp::identity(Eigen::Index dim) {
  return UnitaryOp(ComplexMatrix::Identity(dim, dim), true);
}

UnitaryOp validate_unitary(const ComplexMatrix& m, const Tolerances& tol) {
  require_square_finite(m, "unitary");
  const Eigen::Index d = m.rows();
  const double defect = max_abs(m.adjoint() * m - ComplexMatrix::Identity(d, d));
  if (defect > tol.validation) {
    throw Error(ErrorKind::NotUnitary, "matrix is not unitary: max|U^dag U - 1| = " + fmt_double(defect));
  }
  const bool is_id = (m - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() == 0.0;
  return UnitaryOp(m, is_id);
}

std::string_view to_string(InstrumentKind kind) {
  return kind == InstrumentKind::projective ? "projective" : "generalized";
}

std::size_t Instrument::label_position(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw Error(ErrorKind::UnknownOutcome, "instrument has no outcome labelled '" + label + "'");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

bool Instrument::all_hermitian(double tol) const {
  return std::all_of(effects_.begin(), effects_.end(),
                     [&](const Effect& e) { return hermiticity_defect(e.matrix) <= tol; });
}

bool Instrument::one_index_per_label() const {
  return std::all_of(members_.begin(), members_.end(),
                     [](const auto& m) { return m.size() == 1; });
}

Instrument Instrument::trivial(Eigen::Index dim) {
  std::vector<Effect> effects;
  effects.push_back(Effect{"1", 0, ComplexMatrix::Identity(dim, dim)});
  return validate_instrument(std::move(effects));
}

Instrument validate_instrument(std::vector<Effect> effects, const Tolerances& tol) {
  if (effects.empty()) {
    throw Error(ErrorKind::IncompleteInstrument, "instrument has no effects");
  }
  const Eigen::Index d = effects.front().matrix.rows();
  std::set<std::pair<std::string, int>> seen;
  for (const auto& e : effects) {
    require_square_finite(e.matrix, "effect '" + e.label + "'");
    if (e.matrix.rows() != d) {
      throw Error(ErrorKind::DimensionMismatch, "effect '" + e.label + "' has dimension " +
                                                    std::to_string(e.matrix.rows()) + ", expected " +
                                                    std::to_string(d));
    }
    if (e.index < 0) {
      throw Error(ErrorKind::InvalidArgument, "effect '" + e.label + "' has a negative internal index");
    }
    if (!seen.emplace(e.label, e.index).second) {
      throw Error(ErrorKind::DuplicateEffect,
                  "duplicate effect (" + e.label + ", " + std::to_string(e.index) + ")");
    }
  }

  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (const auto& e : effects) total += gram(e.matrix);
  const double residual = max_abs(total - ComplexMatrix::Identity(d, d));
  if (residual > tol.validation) {
    throw Error(ErrorKind::IncompleteInstrument,
                "instrument is not complete: max|sum A^dag A - 1| = " + fmt_double(residual));
  }

  Instrument inst;
  for (std::size_t k = 0; k < effects.size(); ++k) {
    const auto& label = effects[k].label;
    auto it = std::find(inst.labels_.begin(), inst.labels_.end(), label);
    if (it == inst.labels_.end()) {
      inst.labels_.push_back(label);
      inst.members_.push_back({k});
    } else {
      inst.members_[static_cast<std::size_t>(it - inst.labels_.begin())].push_back(k);
    }
  }
  for (const auto& group : inst.members_) {
    ComplexMatrix e = ComplexMatrix::Zero(d, d);
    for (auto k : group) e += gram(effects[k].matrix);
    inst.povm_.push_back(std::move(e));
  }

  bool projective = inst.one_index_per_label();
  for (std::size_t a = 0; projective && a < effects.size(); ++a) {
    const auto& pa = effects[a].matrix;
    if (hermiticity_defect(pa) > tol.validation || max_abs(pa * pa - pa) > tol.validation) {
      projective = false;
      break;
    }
    for (std::size_t b = 0; b < effects.size(); ++b) {
      if (a != b && max_abs(pa * effects[b].matrix) > tol.validation) {
        projective = false;
        break;
      }
    }
  }
  inst.kind_ = projective ? InstrumentKind::projective : InstrumentKind::generalized;
  inst.effects_ = std::move(effects);
  return inst;
}

ComplexMatrix Channel::apply(const ComplexMatrix& rho) const {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus_) out += sandwich(k, rho);
  return out;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m, double tol) {
  require_square_finite(m, "psd_sqrt argument");
  if (hermiticity_defect(m) > tol) {
    throw Error(ErrorKind::NotHermitian, "psd_sqrt argument is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd w = es.eigenvalues();
  if (w.minCoeff() < -tol) {
    throw Error(ErrorKind::NotPSD, "psd_sqrt argument has eigenvalue " + fmt_double(w.minCoeff()));
  }
  w = w.cwiseMax(0.0).cwiseSqrt();
  const ComplexMatrix& v = es.eigenvectors();
  ComplexMatrix s = v * w.cast<Complex>().asDiagonal() * v.adjoint();
  return 0.5 * (s + s.adjoint());
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  ComplexMatrix out(ra * rb, ca * cb);
  for (Eigen::Index i = 0; i < ra; ++i)
    for (Eigen::Index j = 0; j < ca; ++j) out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

StateStatistics state_statistics(const DensityMatrix& rho, const ComplexMatrix& observable, double tol) {
  require_square_finite(observable, "observable");
  if (observable.rows() != rho.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "observable and state dimensions differ");
  }
  if (hermiticity_defect(observable) > tol) {
    throw Error(ErrorKind::NotHermitian, "observable is not Hermitian");
  }
  const Complex mean = (rho.matrix() * observable).trace();
  if (std::abs(mean.imag()) > tol) {
    throw Error(ErrorKind::NotHermitian, "expectation value has imaginary part " + fmt_double(mean.imag()));
  }
  const double second = (rho.matrix() * observable * observable).trace().real();
  double var = second - mean.real() * mean.real();
  if (var < 0.0 && var >= -tol) var = 0.0;
  return {mean.real(), std::sqrt(std::max(var, 0.0))};
}

Channel measure_and_forget_channel(const Instrument& inst) {
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(inst.effects().size());
  for (const auto& e : inst.effects()) kraus.push_back(e.matrix);
  return Channel(std::move(kraus));
}

bool is_diagonal(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
  return true;
}

ComplexMatrix sandwich(const ComplexMatrix& a, const ComplexMatrix& rho) {
  if (is_diagonal(a)) {
    const Eigen::VectorXcd d = a.diagonal();
    return d.asDiagonal() * rho * d.conjugate().asDiagonal();
  }
  return a * rho * a.adjoint();
}

}  // namespace decohist
