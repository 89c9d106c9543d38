#include <gtest/gtest.h>

#include "decohist/criteria.hpp"
#include "decohist/models.hpp"

using namespace decohist;
using namespace decohist::models;

TEST(Library, InstrumentsValidate) {
  const auto lib = spin_half_library();
  (void)lib;
  for (char axis : {'x', 'y', 'z'}) EXPECT_EQ(spin_projective(axis).kind(), InstrumentKind::projective);
  EXPECT_EQ(fuzzy_instrument().kind(), InstrumentKind::generalized);
  EXPECT_NO_THROW(spin_direction_instrument(SpinDirectionSet::axes()));
  EXPECT_NO_THROW(spin_direction_instrument(SpinDirectionSet::antipodal({0.6, 0.0, 0.8})));
  EXPECT_EQ(computational_basis(3).labels().front(), "000");
  EXPECT_EQ(computational_basis(3).labels()[1], "001");
  EXPECT_THROW(spin_projective('w'), Error);
}

TEST(Library, RhoEpsilonIsNormalized) {
  const auto r = rho_epsilon(0.3);
  EXPECT_NEAR(r.matrix().trace().real(), 1.0, 1e-15);
  EXPECT_NEAR(r.matrix()(0, 0).real(), 0.65, 1e-15);
  EXPECT_THROW(rho_epsilon(1.5), Error);
}

TEST(SpinDirections, AsymmetricSetRejected) {
  SpinDirectionSet s{{{"a", {1, 0, 0}}, {"b", {0, 1, 0}}}};
  try {
    spin_direction_instrument(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AsymmetricDirectionSet);
  }
}

TEST(SpinDirections, ResidualIsLinearInEpsilon) {
  for (double eps : {0.01, 0.1, 0.5, 1.0}) {
    const auto r = check_measurement_based(spin_direction_history(SpinDirectionSet::axes(), rho_epsilon(eps)));
    EXPECT_NEAR(r.max_residual, eps / 3.0, 1e-12) << eps;
  }
}

TEST(SpinDirections, AntipodalPairOnItsAxisDecoheres) {
  // Measuring +-z unsharply then z sharply: everything commutes.
  const auto r = check_measurement_based(spin_direction_history(SpinDirectionSet::antipodal({0, 0, 1}), spin_up_x()));
  EXPECT_TRUE(r.verdict);
}

TEST(Grid, PositionOperatorAndCenters) {
  // Periodic grid: x_max itself is the image of x_min.
  const GridSystem g{10, -1.0, 1.0};
  EXPECT_NEAR(g.spacing(), 0.2, 1e-15);
  EXPECT_NEAR(g.x(9), 0.8, 1e-15);
  EXPECT_NEAR(g.position()(3, 3).real(), -0.4, 1e-15);
  const auto c = centers_covering(g, 0.5, 1.0);
  EXPECT_NEAR(c.front(), -2.0, 1e-15);
  EXPECT_NEAR(c.back(), 1.5, 1e-12);
  EXPECT_THROW((GridSystem{1, 0.0, 1.0}.check()), Error);
  EXPECT_THROW((GridSystem{5, 1.0, 0.0}.check()), Error);
}

TEST(Gaussian, CompleteAndDiagonal) {
  const GridSystem g{128, -4.0, 4.0};
  const Instrument inst = gaussian_instrument(g, 0.5, centers_covering(g, 0.5, 2.0));
  ComplexMatrix total = ComplexMatrix::Zero(128, 128);
  for (const auto& e : inst.effects()) {
    EXPECT_TRUE(is_diagonal(e.matrix));
    total += e.matrix * e.matrix;
  }
  EXPECT_LT(max_abs(total - identity(128)), 1e-12);
}

TEST(Gaussian, SparseCentersRejected) {
  const GridSystem g{128, -4.0, 4.0};
  try {
    gaussian_instrument(g, 0.5, centers_covering(g, 3.0, 2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CoverageError);
  }
}

TEST(Wavepacket, WidthAndErrors) {
  const GridSystem g{400, -10.0, 10.0};
  const auto rho = gaussian_wavepacket(g, 1.0, 0.7);
  const auto stats = state_statistics(rho, g.position());
  EXPECT_NEAR(stats.mean, 1.0, 1e-9);
  EXPECT_NEAR(stats.stddev, 0.7, 1e-6);
  try {
    gaussian_wavepacket(g, 0.0, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnresolvableWidth);
  }
  try {
    gaussian_wavepacket(g, 9.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EdgeOverlap);
  }
}

TEST(FreeParticle, PacketSpreadsAsPredicted) {
  const GridSystem g{256, -8.0, 8.0};
  const double sigma0 = 0.3, mass = 2.0, t = 0.4;
  const auto rho = gaussian_wavepacket(g, 0.0, sigma0);
  const UnitaryOp u = free_particle_unitary(g, mass, t);
  const DensityMatrix later = validate_density(u.matrix() * rho.matrix() * u.matrix().adjoint());
  EXPECT_NEAR(state_statistics(later, g.position()).stddev, free_packet_width(sigma0, mass, t), 1e-6);
  EXPECT_NEAR(free_packet_width(sigma0, mass, free_packet_time_for_width(sigma0, mass, 1.2)), 1.2, 1e-12);
  EXPECT_TRUE(free_particle_unitary(g, mass, 0.0).is_identity());
}

TEST(Dephasing, EqualsZMeasureAndForget) {
  const auto d = dephasing_instrument(spin_projective('z'));
  ComplexMatrix rho(2, 2);
  rho << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
  const ComplexMatrix out = d.channel.apply(rho);
  EXPECT_EQ(out(0, 1), Complex(0.0, 0.0));
  EXPECT_EQ(out(1, 0), Complex(0.0, 0.0));
  EXPECT_EQ(out(0, 0), rho(0, 0));
  EXPECT_THROW(dephasing_instrument(fuzzy_instrument()), Error);
}

TEST(Interference, MultiQubitResidual) {
  // Dephasing after H on n qubits spreads |0..0> uniformly; without it H*H
  // returns to |0..0>. The residual on p(0..0) is 1 - 2^-n.
  for (std::size_t n : {1u, 2u, 3u}) {
    const auto r = check_measurement_based(interference_circuit(n));
    EXPECT_NEAR(r.max_residual, 1.0 - std::pow(0.5, static_cast<double>(n)), 1e-12);
    EXPECT_NEAR(check_measurement_based(interference_circuit(n, true)).max_residual, 0.0, 1e-12);
  }
}
