#include "decohist/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace decohist::models {

namespace {

const Complex I(0.0, 1.0);

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ComplexMatrix projector(const ComplexMatrix& sigma, double sign) {
  return 0.5 * (ComplexMatrix::Identity(2, 2) + sign * sigma);
}

ComplexMatrix sigma_along(const std::array<double, 3>& u) {
  return u[0] * pauli_x() + u[1] * pauli_y() + u[2] * pauli_z();
}

ComplexMatrix kron_power(const ComplexMatrix& m, std::size_t n) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) out = tensor_product(out, m);
  return out;
}

}  // namespace

ComplexMatrix pauli_x() { return mat2(0, 1, 1, 0); }
ComplexMatrix pauli_y() { return mat2(0, -I, I, 0); }
ComplexMatrix pauli_z() { return mat2(1, 0, 0, -1); }
ComplexMatrix hadamard() { return mat2(1, 1, 1, -1) / std::sqrt(2.0); }

Instrument spin_projective(char axis) {
  ComplexMatrix sigma;
  switch (axis) {
    case 'x': sigma = pauli_x(); break;
    case 'y': sigma = pauli_y(); break;
    case 'z': sigma = pauli_z(); break;
    default: throw Error(ErrorKind::InvalidArgument, std::string("unknown spin axis '") + axis + "'");
  }
  return validate_instrument({{"+", 0, projector(sigma, 1.0)}, {"-", 0, projector(sigma, -1.0)}});
}

Instrument fuzzy_instrument() {
  const double r = 1.0 / std::sqrt(2.0);
  return validate_instrument({{"0", 0, mat2(1, 0, 0, r)}, {"1", 0, mat2(0, 0, 0, r)}});
}

DensityMatrix spin_up_z() { return validate_density(projector(pauli_z(), 1.0)); }
DensityMatrix spin_up_x() { return validate_density(projector(pauli_x(), 1.0)); }

DensityMatrix maximally_mixed(Eigen::Index dim) {
  return validate_density(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix rho_epsilon(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must lie in [0, 1]");
  return validate_density((1.0 - eps) * 0.5 * ComplexMatrix::Identity(2, 2) + eps * projector(pauli_z(), 1.0));
}

SpinHalfLibrary spin_half_library() {
  return {pauli_x(), pauli_y(), pauli_z(), spin_projective('x'), spin_projective('y'), spin_projective('z'),
          fuzzy_instrument(), spin_up_z(), maximally_mixed(2), spin_up_x()};
}

bool SpinDirectionSet::symmetric(double tol) const {
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  for (const auto& d : directions)
    for (int c = 0; c < 3; ++c) sum[c] += d.u[c];
  return std::hypot(sum[0], sum[1], sum[2]) <= tol;
}

SpinDirectionSet SpinDirectionSet::axes() {
  return {{{"+x", {1, 0, 0}}, {"-x", {-1, 0, 0}}, {"+y", {0, 1, 0}},
           {"-y", {0, -1, 0}}, {"+z", {0, 0, 1}}, {"-z", {0, 0, -1}}}};
}

SpinDirectionSet SpinDirectionSet::antipodal(std::array<double, 3> u) {
  return {{{"+u", u}, {"-u", {-u[0], -u[1], -u[2]}}}};
}

Instrument spin_direction_instrument(const SpinDirectionSet& dirs, const Tolerances& tol) {
  const std::size_t n = dirs.directions.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "spin-direction set needs at least two directions");
  for (const auto& d : dirs.directions) {
    if (std::abs(std::hypot(d.u[0], d.u[1], d.u[2]) - 1.0) > tol.validation) {
      throw Error(ErrorKind::InvalidArgument, "direction '" + d.label + "' is not a unit vector");
    }
  }
  if (!dirs.symmetric(tol.validation)) {
    throw Error(ErrorKind::AsymmetricDirectionSet, "direction vectors do not sum to zero");
  }
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  std::vector<Effect> effects;
  for (const auto& d : dirs.directions) {
    effects.push_back({d.label, 0, scale * 0.5 * (ComplexMatrix::Identity(2, 2) + sigma_along(d.u))});
  }
  return validate_instrument(std::move(effects), tol);
}

HistorySpec spin_direction_history(const SpinDirectionSet& dirs, const DensityMatrix& rho) {
  std::vector<Step> steps;
  steps.push_back({UnitaryOp::identity(2), spin_direction_instrument(dirs)});
  steps.push_back({UnitaryOp::identity(2), spin_projective('z')});
  return HistorySpec::create(rho, std::move(steps));
}

void GridSystem::check() const {
  if (n_points < 2) throw Error(ErrorKind::InvalidArgument, "grid needs at least two points");
  if (!(x_max > x_min)) throw Error(ErrorKind::InvalidArgument, "grid needs x_max > x_min");
}

ComplexMatrix GridSystem::position() const {
  check();
  ComplexMatrix x = ComplexMatrix::Zero(static_cast<Eigen::Index>(n_points), static_cast<Eigen::Index>(n_points));
  for (std::size_t k = 0; k < n_points; ++k) x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = this->x(k);
  return x;
}

std::vector<double> centers_covering(const GridSystem& grid, double spacing, double margin) {
  grid.check();
  if (!(spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "center spacing must be positive");
  std::vector<double> centers;
  const double lo = grid.x_min - margin, hi = grid.x(grid.n_points - 1) + margin;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
  for (std::size_t k = 0; k < count; ++k) centers.push_back(lo + static_cast<double>(k) * spacing);
  return centers;
}

Instrument gaussian_instrument(const GridSystem& grid, double delta, const std::vector<double>& centers,
                               const Tolerances& tol) {
  grid.check();
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "Gaussian width must be positive");
  if (centers.empty()) throw Error(ErrorKind::InvalidArgument, "Gaussian instrument needs at least one center");
  const std::size_t n = grid.n_points;
  Eigen::MatrixXd f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(centers.size()));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t m = 0; m < centers.size(); ++m) {
      const double dx = grid.x(k) - centers[m];
      f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = std::exp(-dx * dx / (4.0 * delta * delta));
    }
  const Eigen::VectorXd coverage = f.rowwise().squaredNorm();

  const auto [lo_it, hi_it] = std::minmax_element(centers.begin(), centers.end());
  double cmin = INFINITY, cmax = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = grid.x(k);
    if (x - *lo_it < 3.0 * delta || *hi_it - x < 3.0 * delta) continue;
    cmin = std::min(cmin, coverage(static_cast<Eigen::Index>(k)));
    cmax = std::max(cmax, coverage(static_cast<Eigen::Index>(k)));
  }
  if (cmax == 0.0) {
    cmin = coverage.minCoeff();
    cmax = coverage.maxCoeff();
  }
  if (!(cmin > 0.0) || std::sqrt(cmax / cmin) > 1.1) {
    throw Error(ErrorKind::CoverageError,
                "Gaussian centers do not cover the grid evenly: normalization varies by a factor " +
                    std::to_string(cmin > 0.0 ? std::sqrt(cmax / cmin) : INFINITY));
  }

  const std::size_t width = std::max<std::size_t>(3, std::to_string(centers.size() - 1).size());
  std::vector<Effect> effects;
  for (std::size_t m = 0; m < centers.size(); ++m) {
    Eigen::VectorXcd d(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      d(kk) = f(kk, static_cast<Eigen::Index>(m)) / std::sqrt(coverage(kk));
    }
    std::string idx = std::to_string(m);
    effects.push_back({"g" + std::string(width - idx.size(), '0') + idx, 0, d.asDiagonal().toDenseMatrix()});
  }
  return validate_instrument(std::move(effects), tol);
}

UnitaryOp free_particle_unitary(const GridSystem& grid, double mass, double time) {
  grid.check();
  if (!(mass > 0.0)) throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  const auto n = static_cast<long>(grid.n_points);
  if (time == 0.0) return UnitaryOp::identity(n);
  const double h = grid.spacing();
  // Circulant kernel u[m] = (1/n) sum_k exp(i p_k m h) exp(-i t p_k^2 / M).
  std::vector<Complex> kernel(static_cast<std::size_t>(n));
  for (long m = 0; m < n; ++m) {
    Complex acc(0.0, 0.0);
    for (long k = -n / 2; k < n - n / 2; ++k) {
      const double p = 2.0 * std::numbers::pi * static_cast<double>(k) / grid.length();
      acc += std::polar(1.0, p * static_cast<double>(m) * h - time * p * p / mass);
    }
    kernel[static_cast<std::size_t>(m)] = acc / static_cast<double>(n);
  }
  ComplexMatrix u(n, n);
  for (long j = 0; j < n; ++j)
    for (long l = 0; l < n; ++l) u(j, l) = kernel[static_cast<std::size_t>(((j - l) % n + n) % n)];
  return validate_unitary(u);
}

DensityMatrix gaussian_wavepacket(const GridSystem& grid, double center, double sigma, const Tolerances& tol) {
  grid.check();
  if (!(sigma >= 2.0 * grid.spacing())) {
    throw Error(ErrorKind::UnresolvableWidth,
                "wavepacket width " + std::to_string(sigma) + " is below two grid spacings");
  }
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(grid.n_points));
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const double dx = grid.x(k) - center;
    psi(static_cast<Eigen::Index>(k)) = std::exp(-dx * dx / (4.0 * sigma * sigma));
  }
  psi.normalize();
  const double edge = std::max(std::norm(psi(0)), std::norm(psi(psi.size() - 1)));
  if (edge > tol.validation) {
    throw Error(ErrorKind::EdgeOverlap, "wavepacket has probability " + std::to_string(edge) + " at the grid edge");
  }
  return validate_density(psi * psi.adjoint(), tol);
}

double free_packet_width(double sigma0, double mass, double time) {
  const double r = time / (mass * sigma0 * sigma0);
  return sigma0 * std::sqrt(1.0 + r * r);
}

double free_packet_time_for_width(double sigma0, double mass, double width) {
  if (width < sigma0) throw Error(ErrorKind::InvalidArgument, "a free packet never narrows");
  return mass * sigma0 * sigma0 * std::sqrt((width / sigma0) * (width / sigma0) - 1.0);
}

Dephasing dephasing_instrument(const Instrument& basis) {
  if (basis.kind() != InstrumentKind::projective) {
    throw Error(ErrorKind::InvalidArgument, "dephasing needs a projective basis instrument");
  }
  return {basis, measure_and_forget_channel(basis)};
}

Instrument computational_basis(std::size_t n_qubits) {
  if (n_qubits < 1 || n_qubits > 10) throw Error(ErrorKind::InvalidArgument, "qubit count must be in [1, 10]");
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  std::vector<Effect> effects;
  for (Eigen::Index k = 0; k < dim; ++k) {
    std::string bits;
    for (std::size_t q = 0; q < n_qubits; ++q) bits += ((k >> (n_qubits - 1 - q)) & 1) ? '1' : '0';
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    p(k, k) = 1.0;
    effects.push_back({bits, 0, p});
  }
  return validate_instrument(std::move(effects));
}

HistorySpec interference_circuit(std::size_t n_qubits, bool classical) {
  const Instrument basis = computational_basis(n_qubits);
  const Eigen::Index dim = basis.dim();
  const UnitaryOp gate = validate_unitary(kron_power(classical ? pauli_x() : hadamard(), n_qubits));
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  std::vector<Step> steps{{gate, basis}, {gate, basis}};
  return HistorySpec::create(validate_density(rho), std::move(steps));
}

HistorySpec spin_xy_history() {
  std::vector<Step> steps{{UnitaryOp::identity(2), spin_projective('y')},
                          {UnitaryOp::identity(2), spin_projective('x')}};
  return HistorySpec::create(spin_up_z(), std::move(steps));
}

HistorySpec fuzzy_then_trivial_history() {
  std::vector<Step> steps{{UnitaryOp::identity(2), fuzzy_instrument()},
                          {UnitaryOp::identity(2), Instrument::trivial(2)}};
  return HistorySpec::create(maximally_mixed(2), std::move(steps));
}

}  // namespace decohist::models
