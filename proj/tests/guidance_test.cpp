#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dmbohm/guidance.hpp"

using namespace dmbohm;

namespace {

Index node_at(const Grid& g, double x) {
  return static_cast<Index>(std::llround((x - g.axis(0).lo) / g.axis(0).spacing()));
}

DensityMatrixState two_branch(const Grid& g, double wa, double ca, double ka, double wb, double cb, double kb,
                              double sigma) {
  return DensityMatrixState({{wa, gaussian_packet(g, make_point(ca), sigma, make_point(ka))},
                             {wb, gaussian_packet(g, make_point(cb), sigma, make_point(kb))}});
}

}  // namespace

TEST_CASE("total_density") {
  const Grid g = Grid::line(-40.0, 40.0, 1024);
  const ComplexField f = gaussian_packet(g, make_point(1.0), 1.5, make_point(0.3));
  CHECK((total_density(DensityMatrixState::pure(f)).values() == density(f).values()).all());

  const DensityMatrixState s = two_branch(g, 0.5, 12.0, 0.0, 0.5, -12.0, 0.0, 1.0);
  const RealField p = total_density(s);
  double right = 0.0;
  for (Index i = 0; i < g.size(); ++i) right += g.node(i)[0] > 0.0 ? p[i] : 0.0;
  CHECK(std::abs(right * g.cell_volume() - 0.5) < 1e-10);

  // Same modulus, different phase profiles: orthogonal through the phases alone.
  const ComplexField a = gaussian_packet(g, make_point(0.0), 4.0, make_point(1.0));
  const ComplexField b = gaussian_packet(g, make_point(0.0), 4.0, make_point(-1.0));
  const RealField pab = total_density(DensityMatrixState({{0.5, a}, {0.5, b}}));
  CHECK((pab.values() - density(a).values()).abs().maxCoeff() < 1e-15);
}

TEST_CASE("total_current has no cross terms") {
  const Grid g = Grid::line(-64.0, 64.0, 1024);
  const ComplexField a = gaussian_packet(g, make_point(0.0), 4.0, make_point(2.0));
  const ComplexField b = gaussian_packet(g, make_point(0.0), 4.0, make_point(-2.0));
  const DensityMatrixState mixed({{0.5, a}, {0.5, b}});
  const VectorField jm = total_current(mixed);
  const double peak = (2.0 * density(a).values()).maxCoeff();
  CHECK(jm.component(0).abs().maxCoeff() < 1e-12 * peak);

  // Offset centres so the pure superposition is not a real standing wave.
  const ComplexField l = gaussian_packet(g, make_point(-3.0), 4.0, make_point(2.0));
  const ComplexField r = gaussian_packet(g, make_point(3.0), 4.0, make_point(-2.0));
  const DensityMatrixState offset({{0.5, l}, {0.5, r}});
  const ComplexField sum(g, (l.values() + r.values()) / std::numbers::sqrt2);
  const DensityMatrixState pure = DensityMatrixState::pure(normalized(sum));
  const VectorField jp = total_current(pure);
  const VectorField jo = total_current(offset);
  const double floor = 1e-12 * peak;
  CHECK((jp.component(0) - jo.component(0)).abs().maxCoeff() > 10.0 * floor);
  // The pure superposition P carries fringes the mixture lacks.
  const RealField pp = total_density(pure);
  const RealField pm = total_density(offset);
  CHECK((pp.values() - pm.values()).abs().maxCoeff() > 0.1 * pm.values().maxCoeff());

  CHECK((total_current(DensityMatrixState::pure(a)).values() == branch_current(a).values()).all());
}

TEST_CASE("velocity_field") {
  SUBCASE("superorthogonal branches follow their own packet") {
    const Grid g = Grid::line(-64.0, 64.0, 1024);
    const DensityMatrixState s = two_branch(g, 0.5, -10.0, 2.0, 0.5, 10.0, -2.0, 1.0);
    const MaskedVectorField v = velocity_field(s);
    for (double x : {-11.0, -10.0, -9.0}) {
      const Index i = node_at(g, x);
      REQUIRE(v.defined[i]);
      CHECK(std::abs(v.values.component(0)[i] - 2.0) < 1e-6);
    }
    CHECK(std::abs(v.values.component(0)[node_at(g, 10.0)] + 2.0) < 1e-6);
  }
  SUBCASE("equal weights and amplitudes with opposite momenta cancel") {
    const Grid g = Grid::line(-64.0, 64.0, 1024);
    const DensityMatrixState s = two_branch(g, 0.5, 0.0, 2.0, 0.5, 0.0, -2.0, 4.0);
    CHECK(std::abs(velocity_field(s).values.component(0)[node_at(g, 0.0)]) < 1e-12);
  }
  SUBCASE("weights 0.9/0.1 at equal amplitude") {
    const Grid g = Grid::line(-64.0, 64.0, 512);
    const DensityMatrixState s = two_branch(g, 0.9, 0.0, 1.0, 0.1, 0.0, -1.0, 4.0);
    const Index i = node_at(g, 0.0);
    const double oracle = (0.9 * 1.0 + 0.1 * -1.0) / (0.9 + 0.1);
    CHECK(std::abs(velocity_field(s).values.component(0)[i] - oracle) < 1e-9);
    CHECK(std::abs(mean_velocity_field(s).values.component(0)[i] - 0.8) < 1e-9);
  }
  SUBCASE("unequal amplitudes separate v from the mean of the branch velocities") {
    // R_a^2 / R_b^2 = exp(2 c x / sigma^2) for packets at +c and -c; 0.1 at x = -2 for c = 4 ln 10.
    const double c = 4.0 * std::log(10.0);
    CHECK(c == doctest::Approx(9.2103).epsilon(1e-5));
    const Grid g = Grid::line(-64.0, 64.0, 512);
    const DensityMatrixState s = two_branch(g, 0.5, c, 1.0, 0.5, -c, -1.0, 4.0);
    const Index i = node_at(g, -2.0);
    const double ra = std::norm(s.branch(0).field[i]);
    const double rb = std::norm(s.branch(1).field[i]);
    CHECK(ra / rb == doctest::Approx(0.1).epsilon(1e-9));
    const double oracle = (0.1 - 1.0) / 1.1;
    CHECK(std::abs(velocity_field(s).values.component(0)[i] - oracle) < 1e-9);
    CHECK(oracle == doctest::Approx(-0.818).epsilon(1e-3));
    CHECK(std::abs(mean_velocity_field(s).values.component(0)[i]) < 1e-9);
  }
  SUBCASE("single branch: Bohm velocity, mean velocity equal") {
    const Grid g = Grid::line(-40.0, 40.0, 512);
    const ComplexField f = gaussian_packet(g, make_point(0.0), 1.0, make_point(1.5));
    const DensityMatrixState s = DensityMatrixState::pure(f);
    const MaskedVectorField v = velocity_field(s);
    const MaskedVectorField m = mean_velocity_field(s);
    GuidanceField direct{density(f), branch_current(f), 0.0, 1e-12 * density(f).values().maxCoeff(), 1.0, {}};
    const MaskedVectorField bohm = velocity_field(direct);
    CHECK((v.values.values() == bohm.values.values()).all());
    CHECK((v.defined == bohm.defined).all());
    for (Index i = 0; i < g.size(); ++i) {
      if (v.defined[i] && m.defined[i]) CHECK(std::abs(v.values.component(0)[i] - m.values.component(0)[i]) < 1e-12);
    }
  }
  SUBCASE("masked where P vanishes and mass scales v") {
    const Grid g = Grid::line(-64.0, 64.0, 1024);
    const DensityMatrixState s = DensityMatrixState::pure(gaussian_packet(g, make_point(0.0), 1.0, make_point(2.0)));
    const MaskedVectorField v = velocity_field(s);
    CHECK_FALSE(v.defined[node_at(g, 40.0)]);
    CHECK(v.values.component(0)[node_at(g, 40.0)] == 0.0);
    GuidanceOptions heavy;
    heavy.mass = 4.0;
    CHECK(std::abs(velocity_field(s, heavy).values.component(0)[node_at(g, 0.0)] - 0.5) < 1e-9);
  }
}

TEST_CASE("v is a convex combination of the branch velocities") {
  const Grid g = Grid::line(-64.0, 64.0, 1024);
  const DensityMatrixState s({{0.3, gaussian_packet(g, make_point(-3.0), 2.0, make_point(3.0))},
                              {0.5, gaussian_packet(g, make_point(2.0), 3.0, make_point(-3.0))},
                              {0.2, gaussian_packet(g, make_point(-30.0), 1.0, make_point(0.0))}});
  REQUIRE(s.max_branch_overlap() < 1e-8);
  const MaskedVectorField v = velocity_field(s);
  std::vector<Eigen::ArrayXd> vb;
  std::vector<Eigen::ArrayXd> rb;
  for (const Branch& b : s.branches()) {
    rb.push_back(density(b.field).values());
    vb.push_back(branch_current(b.field).component(0) / rb.back());
  }
  int checked = 0;
  for (Index i = 0; i < g.size(); ++i) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t a = 0; a < vb.size(); ++a) {
      if (rb[a][i] < 1e-200) continue;
      lo = std::min(lo, vb[a][i]);
      hi = std::max(hi, vb[a][i]);
    }
    if (!v.defined[i] || !(lo <= hi)) continue;
    const double x = v.values.component(0)[i];
    CHECK((x >= lo - 1e-9 && x <= hi + 1e-9));
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("per-branch global phases leave P, J and v unchanged") {
  const Grid g = Grid::line(-64.0, 64.0, 1024);
  const DensityMatrixState s = two_branch(g, 0.5, 8.0, -2.0, 0.5, -8.0, 2.0, 1.0);
  for (double theta : {0.3, 1.0, std::numbers::pi}) {
    const DensityMatrixState shifted(
        {{0.5, s.branch(0).field}, {0.5, ComplexField(g, s.branch(1).field.values() * std::polar(1.0, theta))}});
    const Eigen::ArrayXd p0 = total_density(s).values();
    const Eigen::ArrayXd p1 = total_density(shifted).values();
    CHECK(((p0 - p1).abs() <= 1e-14 * p0.maxCoeff()).all());
    const Eigen::ArrayXd j0 = total_current(s).component(0);
    const Eigen::ArrayXd j1 = total_current(shifted).component(0);
    CHECK((j0 - j1).abs().maxCoeff() <= 1e-14 * j0.abs().maxCoeff());
    const MaskedVectorField v0 = velocity_field(s);
    const MaskedVectorField v1 = velocity_field(shifted);
    double worst = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
      if (v0.defined[i] && p0[i] > 1e-6 * p0.maxCoeff()) {
        worst = std::max(worst, std::abs(v0.values.component(0)[i] - v1.values.component(0)[i]));
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("subsystem_currents") {
  const Axis ax{-32.0, 64.0, 128};
  const Axis ay{-32.0, 64.0, 128};
  const Grid g = Grid::plane(ax, ay);
  const Grid gx = Grid::line(-32.0, 32.0, 128);

  SUBCASE("product state: v1 does not depend on x2") {
    const ComplexField phi = gaussian_packet(gx, make_point(1.0), 2.0, make_point(0.7));
    const ComplexField chi = gaussian_packet(gx, make_point(-3.0), 3.0, make_point(-0.4));
    const DensityMatrixState s = DensityMatrixState::pure(tensor_product(phi, chi));
    const SubsystemCurrents j = subsystem_currents(s);
    const RealField p = total_density(s);
    const Eigen::ArrayXd v1x = branch_current(phi).component(0) / density(phi).values();
    double worst = 0.0;
    for (Index f = 0; f < g.size(); ++f) {
      if (p[f] < 1e-6 * p.values().maxCoeff()) continue;
      worst = std::max(worst, std::abs(j.first.component(0)[f] / p[f] - v1x[g.index(f, 0)]));
    }
    CHECK(worst < 1e-8);
  }
  SUBCASE("correlated superorthogonal state: v1 follows the conditioning branch") {
    const ComplexField phi_a = gaussian_packet(gx, make_point(0.0), 2.0, make_point(1.0));
    const ComplexField phi_b = gaussian_packet(gx, make_point(0.0), 2.0, make_point(-1.0));
    const ComplexField chi_a = gaussian_packet(gx, make_point(12.0), 1.5, make_point(0.0));
    const ComplexField chi_b = gaussian_packet(gx, make_point(-12.0), 1.5, make_point(0.0));
    const DensityMatrixState s({{0.5, tensor_product(phi_a, chi_a)}, {0.5, tensor_product(phi_b, chi_b)}});
    const MaskedVectorField v = velocity_field(s);
    const RealField p = total_density(s);
    int checked = 0;
    for (Index f = 0; f < g.size(); ++f) {
      const Point x = g.node(f);
      if (std::abs(x[1] - 12.0) > 2.0 || std::abs(x[0]) > 4.0) continue;
      CHECK(std::abs(v.values.component(0)[f] - 1.0) < 1e-6);
      ++checked;
    }
    CHECK(checked > 50);
  }
  SUBCASE("the parts sum to the total current") {
    const DensityMatrixState s = DensityMatrixState::pure(
        gaussian_packet(g, make_point(1.0, -2.0), make_point(2.0, 3.0), make_point(0.5, 0.25)));
    const SubsystemCurrents j = subsystem_currents(s);
    const VectorField total = total_current(s);
    CHECK(((j.first.values() + j.second.values()) == total.values()).all());
    CHECK(j.first.component(1).abs().maxCoeff() == 0.0);
  }
  SUBCASE("1D grid is rejected") {
    CHECK_THROWS_AS(subsystem_currents(DensityMatrixState::pure(gaussian_packet(gx, make_point(0.0), 2.0, make_point(0.0)))),
                    Error);
  }
}

TEST_CASE("quantum_potential") {
  SUBCASE("static Gaussian against the closed form") {
    const double sigma = 1.5;
    const Grid g = Grid::line(-40.0, 40.0, 1024);
    const MaskedRealField q = quantum_potential(gaussian_packet(g, make_point(0.0), sigma, make_point(0.0)));
    // R = exp(-x^2/4s^2): R''/R = x^2/4s^4 - 1/2s^2, Q = -R''/2R
    for (Index i = 0; i < g.size(); ++i) {
      const double x = g.node(i)[0];
      if (std::abs(x) > 4.0 * sigma) continue;
      REQUIRE(q.defined[i]);
      CHECK(std::abs(q.values[i] - (1.0 / (4 * sigma * sigma) - x * x / (8 * std::pow(sigma, 4)))) < 1e-8);
    }
  }
  SUBCASE("plane wave") {
    const Grid g = Grid::line(0.0, 2.0 * std::numbers::pi, 64);
    ComplexField f(g);
    for (Index i = 0; i < g.size(); ++i) f[i] = std::polar(1.0, 3.0 * g.node(i)[0]);
    CHECK(quantum_potential(f).values.values().abs().maxCoeff() < 1e-12);
  }
  SUBCASE("harmonic ground state has Q + V constant") {
    const Grid g = Grid::line(-16.0, 16.0, 256);
    const MaskedRealField q = quantum_potential(gaussian_packet(g, make_point(0.0), std::sqrt(0.5), make_point(0.0)));
    const PotentialField v = PotentialField::harmonic(g, 1.0);
    for (Index i = 0; i < g.size(); ++i) {
      if (std::abs(g.node(i)[0]) < 4.0) CHECK(std::abs(q.values[i] + v.values()[i] - 0.5) < 1e-8);
    }
  }
  SUBCASE("coherent state satisfies the quantum Hamilton-Jacobi equation") {
    const Grid g = Grid::line(-16.0, 16.0, 256);
    const PotentialField v = PotentialField::harmonic(g, 1.0);
    const double h = 1e-3;
    const SplitStepPropagator prop(v, h);
    ComplexField f = gaussian_packet(g, make_point(3.0), std::sqrt(0.5), make_point(0.0));
    for (int i = 0; i < 700; ++i) prop.step(f);
    ComplexField before = f;
    prop.step(f);
    const ComplexField now = f;
    prop.step(f);
    const ComplexField after = f;

    const MaskedRealField q = quantum_potential(now);
    const Eigen::ArrayXd grad_s = branch_current(now).component(0) / density(now).values();
    // -dS/dt from the phase increment, no unwrapping required
    const Eigen::ArrayXcd ratio = after.values() * before.values().conjugate();
    const double centre = [&] {
      double m = 0.0;
      for (Index i = 0; i < g.size(); ++i) m += g.node(i)[0] * std::norm(now[i]);
      return m * g.cell_volume();
    }();
    double lo = INFINITY;
    double hi = -INFINITY;
    for (Index i = 0; i < g.size(); ++i) {
      if (std::abs(g.node(i)[0] - centre) > 2.0) continue;
      const double minus_ds_dt = -std::arg(ratio[i]) / (2.0 * h);
      const double r = minus_ds_dt - 0.5 * grad_s[i] * grad_s[i] - v.values()[i] - q.values[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi - lo < 1e-4);
    CHECK(std::abs(hi) < 1e-4);
  }
}

TEST_CASE("continuity residual") {
  const Grid g = Grid::line(-64.0, 64.0, 1024);
  const DensityMatrixState s = two_branch(g, 0.5, 8.0, -2.0, 0.5, -8.0, 2.0, 1.0);
  const double dt = 1e-3;
  const auto snaps = evolve_density(s, PotentialField::zero(g), dt, 2, 1);
  const double r = continuity_residual(make_guidance(snaps[0]), make_guidance(snaps[1]), make_guidance(snaps[2]));
  CHECK(r < 1e-5);
  CHECK_THROWS_AS(continuity_residual(make_guidance(snaps[2]), make_guidance(snaps[1]), make_guidance(snaps[0])), Error);
}
