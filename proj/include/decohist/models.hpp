#pragma once

// Ready-made systems: spin-1/2 instruments and states, spin-direction POVMs,
// Gaussian quasi-projections on a position grid with free-particle dynamics,
// dephasing, and qubit interference circuits.

#include <array>
#include <string>
#include <vector>

#include "decohist/histories.hpp"

namespace decohist::models {

// --- spin 1/2 -------------------------------------------------------------
// Basis order is (up, down) = (|0>, |1>).

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();

/// Projective spin measurement along x, y or z with outcomes "+" / "-".
Instrument spin_projective(char axis);
/// A0 = |up><up| + (1/sqrt2)|down><down|, A1 = (1/sqrt2)|down><down|; labels "0", "1".
Instrument fuzzy_instrument();

DensityMatrix spin_up_z();
DensityMatrix spin_up_x();
DensityMatrix maximally_mixed(Eigen::Index dim = 2);
/// (1 - eps) * 1/2 + eps |up><up|, normalized to unit trace.
DensityMatrix rho_epsilon(double eps);

struct SpinHalfLibrary {
  ComplexMatrix sigma_x, sigma_y, sigma_z;
  Instrument x, y, z, fuzzy;
  DensityMatrix up_z, mixed, up_x;
};

SpinHalfLibrary spin_half_library();

// --- spin directions --------------------------------------------------------

struct SpinDirection {
  std::string label;
  std::array<double, 3> u;
};

struct SpinDirectionSet {
  std::vector<SpinDirection> directions;

  bool symmetric(double tol = 1e-9) const;
  /// +x, -x, +y, -y, +z, -z.
  static SpinDirectionSet axes();
  static SpinDirectionSet antipodal(std::array<double, 3> u);
};

/// A_k = sqrt(2/N) (1 + sigma_uk) / 2; complete for symmetric sets.
Instrument spin_direction_instrument(const SpinDirectionSet& dirs, const Tolerances& tol = {});

/// The generalized spin-direction measurement followed by a projective z
/// measurement, trivial dynamics.
HistorySpec spin_direction_history(const SpinDirectionSet& dirs, const DensityMatrix& rho);

// --- position grid ----------------------------------------------------------

struct GridSystem {
  std::size_t n_points = 128;
  double x_min = -1.0;
  double x_max = 1.0;

  void check() const;
  double spacing() const { return (x_max - x_min) / static_cast<double>(n_points); }
  double length() const { return x_max - x_min; }
  double x(std::size_t k) const { return x_min + static_cast<double>(k) * spacing(); }
  ComplexMatrix position() const;
};

/// Centers from x_min - margin to the last grid point + margin, evenly spaced.
std::vector<double> centers_covering(const GridSystem& grid, double spacing, double margin);

/// Diagonal effects proportional to exp(-(x - mu)^2 / (4 delta^2)),
/// renormalized pointwise so that sum_mu A_mu^dag A_mu = 1 exactly. Labels
/// are zero-padded center indices ("g000", "g001", ...).
Instrument gaussian_instrument(const GridSystem& grid, double delta, const std::vector<double>& centers,
                               const Tolerances& tol = {});

/// exp(-i t P^2 / M) with spectral momenta 2 pi k / L, k symmetric about 0.
UnitaryOp free_particle_unitary(const GridSystem& grid, double mass, double time);

/// Pure state with amplitudes proportional to exp(-(x - center)^2 / (4 sigma^2)).
DensityMatrix gaussian_wavepacket(const GridSystem& grid, double center, double sigma, const Tolerances& tol = {});

/// Width of a free Gaussian packet under H = P^2 / M.
double free_packet_width(double sigma0, double mass, double time);
/// Time at which free_packet_width reaches `width` (>= sigma0).
double free_packet_time_for_width(double sigma0, double mass, double width);

// --- dephasing and circuits -------------------------------------------------

struct Dephasing {
  Instrument instrument;
  Channel channel;
};

/// Dephasing in the basis of a projective instrument, i.e. its
/// measure-and-forget channel rho -> sum_i P_i rho P_i.
Dephasing dephasing_instrument(const Instrument& basis);

/// Projective measurement of n qubits in the computational basis; labels are
/// bit strings, qubit 0 leftmost.
Instrument computational_basis(std::size_t n_qubits);

/// |0..0> -> H^n -> measure -> H^n -> measure. With classical = true the
/// Hadamards are replaced by X on every qubit.
HistorySpec interference_circuit(std::size_t n_qubits = 1, bool classical = false);

/// rho = |up_z><up_z|, y measurement then x measurement, trivial dynamics.
HistorySpec spin_xy_history();
/// rho = 1/2, fuzzy instrument then the trivial instrument {1}.
HistorySpec fuzzy_then_trivial_history();

}  // namespace decohist::models
