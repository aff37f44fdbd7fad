#include <doctest.h>

#include "oracles.hpp"
#include "pff/constitutive.hpp"
#include "pff/error.hpp"

using namespace pff;

namespace {

const ElasticProps kSteel(210000.0, 0.3);

MaterialModel model_for(SplitScheme s, Formulation f, SpectralTrace t = SpectralTrace::Macaulay) {
  MaterialModel m{kSteel, FractureProps(2.7, 0.024)};
  m.split = s;
  m.formulation = f;
  m.trace = t;
  return m;
}

double rel(const auto& a, const auto& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace

TEST_CASE("elastic constants match the isotropic relations") {
  CHECK(kSteel.lambda() == doctest::Approx(oracle::lame_lambda(210000, 0.3)).epsilon(1e-14));
  CHECK(kSteel.mu() == doctest::Approx(oracle::shear_modulus(210000, 0.3)).epsilon(1e-14));
  CHECK(kSteel.bulk() == doctest::Approx(oracle::bulk_modulus(210000, 0.3)).epsilon(1e-14));
  CHECK(rel(kSteel.stiffness(), oracle::isotropic_voigt(210000, 0.3)) < 1e-14);
}

TEST_CASE("invalid material parameters are rejected") {
  CHECK_THROWS_AS(ElasticProps(-1.0, 0.3), InvalidArgument);
  CHECK_THROWS_AS(ElasticProps(1.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(ElasticProps(1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(FractureProps(0.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(FractureProps(1.0, 0.0), InvalidArgument);
}

TEST_CASE("names round trip") {
  for (auto s : {SplitScheme::NoSplit, SplitScheme::VolDev, SplitScheme::Spectral})
    CHECK(parse_split(to_string(s)) == s);
  for (auto f : {Formulation::Hybrid, Formulation::Anisotropic}) CHECK(parse_formulation(to_string(f)) == f);
  for (auto t : {SpectralTrace::Macaulay, SpectralTrace::Literal}) CHECK(parse_trace(to_string(t)) == t);
  CHECK_THROWS_AS(parse_split("bogus"), InvalidArgument);
}

TEST_CASE("strain tensor conversions") {
  oracle::Gen gen(1);
  for (int i = 0; i < 50; ++i) {
    const Voigt6 v = gen.strain(1e-3);
    const StrainTensor e = StrainTensor::from_voigt(v);
    CHECK(rel(e.matrix(), oracle::tensor_from_engineering(v)) < 1e-15);
    CHECK(rel(StrainTensor::from_matrix(e.matrix()).voigt(), v) < 1e-15);
    CHECK(rel(StrainTensor::from_tensor_components(e.tensor_components()).voigt(), v) < 1e-15);
    const Eigen::Matrix3d m = e.matrix();
    CHECK(e.contract() == doctest::Approx((m.array() * m.array()).sum()).epsilon(1e-13));
  }
  const StrainTensor p = StrainTensor::plane(1, 2, 3);
  CHECK(p.voigt()(2) == 0.0);
  CHECK(p.voigt()(3) == 3.0);
  CHECK(p.matrix()(0, 1) == 1.5);
}

TEST_CASE("energy splits against closed-form oracles") {
  oracle::Gen gen(2);
  for (int i = 0; i < 200; ++i) {
    const Voigt6 v = gen.strain(1e-3);
    const StrainTensor e = StrainTensor::from_voigt(v);
    const Eigen::Matrix3d m = oracle::tensor_from_engineering(v);
    const double psi0 = oracle::psi_plus_nosplit(m, 210000, 0.3);
    CHECK(strain_energy(e, kSteel) == doctest::Approx(psi0).epsilon(1e-12));

    const EnergySplit ns = split_energy(e, kSteel, SplitScheme::NoSplit);
    CHECK(ns.psi_plus == doctest::Approx(psi0).epsilon(1e-12));
    CHECK(ns.psi_minus == 0.0);

    const EnergySplit vd = split_energy(e, kSteel, SplitScheme::VolDev);
    CHECK(vd.psi_plus == doctest::Approx(oracle::psi_plus_voldev(m, 210000, 0.3)).epsilon(1e-12));
    CHECK(vd.psi_plus + vd.psi_minus == doctest::Approx(psi0).epsilon(1e-12));

    const EnergySplit sp = split_energy(e, kSteel, SplitScheme::Spectral);
    CHECK(sp.psi_plus == doctest::Approx(oracle::psi_plus_spectral(m, 210000, 0.3)).epsilon(1e-10));
    CHECK(sp.psi_plus + sp.psi_minus == doctest::Approx(psi0).epsilon(1e-10));
    CHECK(sp.psi_plus >= 0.0);
    CHECK(sp.psi_minus >= 0.0);
  }
}

TEST_CASE("compressive states have no tensile energy under the splits") {
  oracle::Gen gen(3);
  for (int i = 0; i < 100; ++i) {
    // Negative definite strain: every principal value below zero.
    Eigen::Matrix3d a = Eigen::Matrix3d::Random() * 1e-3;
    const Eigen::Matrix3d m = -(a * a.transpose() + 1e-6 * Eigen::Matrix3d::Identity());
    const StrainTensor e = StrainTensor::from_matrix(m);
    CHECK(split_energy(e, kSteel, SplitScheme::Spectral).psi_plus == 0.0);
    CHECK(split_energy(e, kSteel, SplitScheme::Spectral, SpectralTrace::Literal).psi_plus == 0.0);
    CHECK(split_energy(e, kSteel, SplitScheme::NoSplit).psi_plus > 0.0);
  }
  // Pure hydrostatic compression has no deviatoric part.
  const StrainTensor hyd = StrainTensor::from_matrix(-1e-3 * Eigen::Matrix3d::Identity());
  CHECK(split_energy(hyd, kSteel, SplitScheme::VolDev).psi_plus == 0.0);
}

TEST_CASE("spectral decomposition reconstructs the tensor") {
  oracle::Gen gen(4);
  for (int i = 0; i < 100; ++i) {
    const StrainTensor e = StrainTensor::from_voigt(gen.strain(1.0));
    const SpectralDecomposition sd = spectral_decompose(e);
    const auto ev = oracle::sym3_eigenvalues(e.matrix());
    for (int k = 0; k < 3; ++k) CHECK(sd.values(k) == doctest::Approx(ev[k]).epsilon(1e-10));
    const Eigen::Matrix3d back = sd.directions * sd.values.asDiagonal() * sd.directions.transpose();
    CHECK(rel(back, e.matrix()) < 1e-12);
    const auto [ep, em] = principal_parts(e);
    CHECK(rel(ep.voigt() + em.voigt(), e.voigt()) < 1e-12);
    // Degree-one homogeneity of eps -> eps+: P+ eps = eps+.
    const Voigt6 pe = projection_plus(e) * e.voigt();
    CHECK(rel(StrainTensor::from_tensor_components(pe).voigt(), ep.voigt()) < 1e-9);
    CHECK(rel(projection_plus(e) + projection_minus(e), symmetric_identity()) < 1e-14);
  }
}

TEST_CASE("projection at repeated principal values") {
  // Equal positive values: P+ is the identity; equal negative: zero.
  const StrainTensor tpos = StrainTensor::from_matrix(Eigen::Matrix3d::Identity());
  CHECK(rel(projection_plus(tpos), symmetric_identity()) < 1e-14);
  const StrainTensor tneg = StrainTensor::from_matrix(-Eigen::Matrix3d::Identity());
  CHECK(projection_plus(tneg).norm() < 1e-14);
  CHECK(principal_values_coincide(1.0, 1.0 + 1e-12));
  CHECK_FALSE(principal_values_coincide(1.0, 1.0 + 1e-6));
}

TEST_CASE("stress is the energy gradient and the tangent its Hessian") {
  oracle::Gen gen(5);
  const double h = 1e-8;
  for (auto split : {SplitScheme::NoSplit, SplitScheme::VolDev, SplitScheme::Spectral})
    for (auto form : {Formulation::Hybrid, Formulation::Anisotropic})
      for (auto trace : {SpectralTrace::Macaulay, SpectralTrace::Literal}) {
        const MaterialModel m = model_for(split, form, trace);
        for (int i = 0; i < 20; ++i) {
          const Voigt6 v = gen.strain(1e-3);
          const double phi = gen.uniform(0, 0.95);
          const auto out = stress_and_tangent(StrainTensor::from_voigt(v), phi, m);
          Voigt6 fd_s;
          Voigt66 fd_t;
          for (int k = 0; k < 6; ++k) {
            Voigt6 vp = v, vm = v;
            vp(k) += h * 1e-3;
            vm(k) -= h * 1e-3;
            const auto op = stress_and_tangent(StrainTensor::from_voigt(vp), phi, m);
            const auto om = stress_and_tangent(StrainTensor::from_voigt(vm), phi, m);
            fd_s(k) = (op.energy - om.energy) / (2 * h * 1e-3);
            fd_t.col(k) = (op.stress - om.stress) / (2 * h * 1e-3);
          }
          CHECK(rel(out.stress, fd_s) < 1e-5);
          CHECK(rel(out.tangent, fd_t) < 1e-6);
          CHECK(rel(out.tangent, Voigt66(out.tangent.transpose())) < 1e-14);
        }
      }
}

TEST_CASE("hybrid stress is isotropically degraded") {
  const MaterialModel m = model_for(SplitScheme::Spectral, Formulation::Hybrid);
  const StrainTensor e = StrainTensor::plane(1e-3, -2e-3, 5e-4);
  const auto out = stress_and_tangent(e, 0.4, m);
  CHECK(rel(out.stress, Voigt6(0.36 * kSteel.stiffness() * e.voigt())) < 1e-14);
}

TEST_CASE("anisotropic stress keeps compressive stiffness") {
  const MaterialModel m = model_for(SplitScheme::Spectral, Formulation::Anisotropic);
  const StrainTensor e = StrainTensor::from_matrix(-1e-3 * Eigen::Matrix3d::Identity());
  const auto broken = stress_and_tangent(e, 1.0, m);
  const auto intact = stress_and_tangent(e, 0.0, m);
  CHECK(rel(broken.stress, intact.stress) < 1e-14);
}

TEST_CASE("degradation, history and phase source") {
  CHECK(degradation(0.0).g == 1.0);
  CHECK(degradation(1.0).g == 0.0);
  CHECK(degradation(0.5).dg == -1.0);
  CHECK(update_history(1.0, 2.0) == 2.0);
  CHECK(update_history(3.0, 2.0) == 3.0);
  const FractureProps f(2.7, 0.024);
  // Homogeneous equilibrium phi = 2H / (Gc/l + 2H) zeroes the source.
  const double H = 50.0;
  const double phi = 2 * H / (2.7 / 0.024 + 2 * H);
  CHECK(std::abs(phase_source(phi, H, f)) < 1e-9 * phase_source_derivative(H, f));
  CHECK(phase_source_derivative(0.0, f) == doctest::Approx(1 / (0.024 * 0.024)));
  const double grad[2] = {3.0, 4.0};
  CHECK(crack_density(0.5, grad, 0.1) == doctest::Approx(0.25 / 0.2 + 0.05 * 25));
}

TEST_CASE("homogeneous strength matches a direct maximization") {
  for (double ell : {0.01, 0.024, 0.1}) {
    MaterialModel m{ElasticProps(210000, 0.0), FractureProps(2.7, ell)};
    CHECK(homogeneous_strength(m) == doctest::Approx(oracle::homogeneous_peak_stress(210000, 2.7, ell)).epsilon(1e-8));
  }
}
