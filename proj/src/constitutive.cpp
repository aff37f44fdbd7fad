#include "pff/constitutive.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "pff/error.hpp"

namespace pff {

namespace voigt {

Eigen::Matrix3d to_matrix(const Voigt6& c) {
  Eigen::Matrix3d m;
  m << c(0), c(3), c(4),
       c(3), c(1), c(5),
       c(4), c(5), c(2);
  return m;
}

Voigt6 from_matrix(const Eigen::Matrix3d& m) {
  Voigt6 c;
  c << m(0, 0), m(1, 1), m(2, 2),
       0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(0, 2) + m(2, 0)), 0.5 * (m(1, 2) + m(2, 1));
  return c;
}

}  // namespace voigt

ElasticProps::ElasticProps(double youngs_modulus, double poisson_ratio)
    : E_(youngs_modulus), nu_(poisson_ratio) {
  if (!(E_ > 0.0)) throw InvalidArgument("Young's modulus must be positive, got " + std::to_string(E_));
  if (!(nu_ > -1.0 && nu_ < 0.5))
    throw InvalidArgument("Poisson's ratio must lie in (-1, 0.5), got " + std::to_string(nu_));
  lambda_ = E_ * nu_ / ((1.0 + nu_) * (1.0 - 2.0 * nu_));
  mu_ = E_ / (2.0 * (1.0 + nu_));
  bulk_ = lambda_ + 2.0 * mu_ / 3.0;
}

Voigt66 ElasticProps::stiffness() const {
  return lambda_ * identity_dyad() + 2.0 * mu_ * symmetric_identity();
}

FractureProps::FractureProps(double toughness, double length_scale)
    : Gc_(toughness), ell_(length_scale) {
  if (!(Gc_ > 0.0)) throw InvalidArgument("Gc must be positive, got " + std::to_string(Gc_));
  if (!(ell_ > 0.0)) throw InvalidArgument("length scale must be positive, got " + std::to_string(ell_));
}

std::string_view to_string(SplitScheme s) {
  switch (s) {
    case SplitScheme::NoSplit: return "none";
    case SplitScheme::VolDev: return "voldev";
    case SplitScheme::Spectral: return "spectral";
  }
  return "?";
}

std::string_view to_string(Formulation f) {
  return f == Formulation::Hybrid ? "hybrid" : "anisotropic";
}

std::string_view to_string(SpectralTrace t) {
  return t == SpectralTrace::Macaulay ? "macaulay" : "literal";
}

SplitScheme parse_split(std::string_view text) {
  if (text == "none" || text == "nosplit") return SplitScheme::NoSplit;
  if (text == "voldev" || text == "vol-dev" || text == "volumetric-deviatoric") return SplitScheme::VolDev;
  if (text == "spectral") return SplitScheme::Spectral;
  throw InvalidArgument("unknown split '" + std::string(text) + "' (expected none, voldev, spectral)");
}

Formulation parse_formulation(std::string_view text) {
  if (text == "hybrid") return Formulation::Hybrid;
  if (text == "anisotropic") return Formulation::Anisotropic;
  throw InvalidArgument("unknown formulation '" + std::string(text) + "' (expected hybrid, anisotropic)");
}

SpectralTrace parse_trace(std::string_view text) {
  if (text == "macaulay") return SpectralTrace::Macaulay;
  if (text == "literal") return SpectralTrace::Literal;
  throw InvalidArgument("unknown spectral trace convention '" + std::string(text) +
                        "' (expected macaulay, literal)");
}

StrainTensor StrainTensor::from_matrix(const Eigen::Matrix3d& eps) {
  Voigt6 c = voigt::from_matrix(eps);
  c.tail<3>() *= 2.0;
  return StrainTensor(c);
}

StrainTensor StrainTensor::from_tensor_components(const Voigt6& comps) {
  Voigt6 v = comps;
  v.tail<3>() *= 2.0;
  return StrainTensor(v);
}

StrainTensor StrainTensor::plane(double exx, double eyy, double gamma_xy) {
  Voigt6 v = Voigt6::Zero();
  v(0) = exx;
  v(1) = eyy;
  v(3) = gamma_xy;
  return StrainTensor(v);
}

Voigt6 StrainTensor::tensor_components() const {
  Voigt6 c = v_;
  c.tail<3>() *= 0.5;
  return c;
}

Eigen::Matrix3d StrainTensor::matrix() const { return voigt::to_matrix(tensor_components()); }

double StrainTensor::contract() const {
  return v_.head<3>().squaredNorm() + 0.5 * v_.tail<3>().squaredNorm();
}

Voigt66 symmetric_identity() {
  Voigt66 I = Voigt66::Zero();
  I.diagonal() << 1.0, 1.0, 1.0, 0.5, 0.5, 0.5;
  return I;
}

Voigt66 identity_dyad() {
  Voigt66 J = Voigt66::Zero();
  J.topLeftCorner<3, 3>().setOnes();
  return J;
}

double strain_energy(const StrainTensor& eps, const ElasticProps& elastic) {
  const double tr = eps.trace();
  return 0.5 * elastic.lambda() * tr * tr + elastic.mu() * eps.contract();
}

SpectralDecomposition spectral_decompose(const StrainTensor& eps) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(eps.matrix());
  // Eigen returns ascending order.
  SpectralDecomposition out;
  for (int a = 0; a < 3; ++a) {
    out.values(a) = solver.eigenvalues()(2 - a);
    out.directions.col(a) = solver.eigenvectors().col(2 - a);
  }
  return out;
}

bool principal_values_coincide(double a, double b) {
  return std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a) + std::abs(b));
}

namespace {

// Derivative of the isotropic tensor function F(eps) = sum_a f(eps_a) n_a (x) n_a,
// returned in Voigt form. theta_ab is the divided difference of f, replaced by
// f' at the pair mean when the principal values coincide.
template <class F, class DF>
Voigt66 spectral_derivative(const SpectralDecomposition& sd, F f, DF df) {
  const auto& n = sd.directions;
  const auto& e = sd.values;
  double theta[3][3];
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a == b) {
        theta[a][b] = df(e(a));
      } else if (principal_values_coincide(e(a), e(b))) {
        theta[a][b] = df(0.5 * (e(a) + e(b)));
      } else {
        theta[a][b] = (f(e(a)) - f(e(b))) / (e(a) - e(b));
      }
    }
  }
  Voigt66 D;
  for (int I = 0; I < 6; ++I) {
    const int i = voigt::kRow[I], j = voigt::kCol[I];
    for (int J = 0; J < 6; ++J) {
      const int k = voigt::kRow[J], l = voigt::kCol[J];
      double sum = 0.0;
      for (int a = 0; a < 3; ++a) {
        sum += theta[a][a] * n(i, a) * n(j, a) * n(k, a) * n(l, a);
        for (int b = 0; b < 3; ++b) {
          if (b == a) continue;
          sum += 0.5 * theta[a][b] * n(i, a) * n(j, b) * (n(k, a) * n(l, b) + n(k, b) * n(l, a));
        }
      }
      D(I, J) = sum;
    }
  }
  return D;
}

Voigt6 spectral_function(const SpectralDecomposition& sd, double (*f)(double)) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int a = 0; a < 3; ++a) {
    const Eigen::Vector3d na = sd.directions.col(a);
    m += f(sd.values(a)) * na * na.transpose();
  }
  return voigt::from_matrix(m);
}

double zero(double) { return 0.0; }

Voigt66 projection_plus(const SpectralDecomposition& sd) {
  return spectral_derivative(sd, macaulay_plus, heaviside);
}

struct SpectralTerms {
  double tr_plus = 0.0;   // sum of positive principal strains
  double tr_minus = 0.0;  // sum of negative principal strains
  double sq_plus = 0.0;   // eps+ : eps+
  double sq_minus = 0.0;  // eps- : eps-
};

SpectralTerms spectral_terms(const SpectralDecomposition& sd) {
  SpectralTerms t;
  for (int a = 0; a < 3; ++a) {
    const double p = macaulay_plus(sd.values(a));
    const double m = macaulay_minus(sd.values(a));
    t.tr_plus += p;
    t.tr_minus += m;
    t.sq_plus += p * p;
    t.sq_minus += m * m;
  }
  return t;
}

EnergySplit spectral_split(const SpectralDecomposition& sd, double tr, const ElasticProps& el,
                           SpectralTrace trace) {
  const SpectralTerms t = spectral_terms(sd);
  const double vol_plus = trace == SpectralTrace::Macaulay ? macaulay_plus(tr) : t.tr_plus;
  const double vol_minus = trace == SpectralTrace::Macaulay ? macaulay_minus(tr) : t.tr_minus;
  return {0.5 * el.lambda() * vol_plus * vol_plus + el.mu() * t.sq_plus,
          0.5 * el.lambda() * vol_minus * vol_minus + el.mu() * t.sq_minus};
}

}  // namespace

EnergySplit split_energy(const StrainTensor& eps, const ElasticProps& elastic, SplitScheme scheme,
                         SpectralTrace trace) {
  switch (scheme) {
    case SplitScheme::NoSplit:
      return {strain_energy(eps, elastic), 0.0};
    case SplitScheme::VolDev: {
      const double tr = eps.trace();
      StrainTensor dev = StrainTensor::from_voigt(eps.voigt() - tr / 3.0 * (Voigt6() << 1, 1, 1, 0, 0, 0).finished());
      const double tp = macaulay_plus(tr), tm = macaulay_minus(tr);
      return {0.5 * elastic.bulk() * tp * tp + elastic.mu() * dev.contract(),
              0.5 * elastic.bulk() * tm * tm};
    }
    case SplitScheme::Spectral:
      return spectral_split(spectral_decompose(eps), eps.trace(), elastic, trace);
  }
  return {};
}

Voigt66 projection_plus(const StrainTensor& eps) { return projection_plus(spectral_decompose(eps)); }

Voigt66 projection_minus(const StrainTensor& eps) {
  return symmetric_identity() - projection_plus(eps);
}

std::pair<StrainTensor, StrainTensor> principal_parts(const StrainTensor& eps) {
  const SpectralDecomposition sd = spectral_decompose(eps);
  return {StrainTensor::from_tensor_components(spectral_function(sd, macaulay_plus)),
          StrainTensor::from_tensor_components(spectral_function(sd, macaulay_minus))};
}

PointConstitutiveOutput stress_and_tangent(const StrainTensor& eps, double phi,
                                           const MaterialModel& model) {
  const ElasticProps& el = model.elastic;
  const double g = degradation(phi).g;
  const double lambda = el.lambda(), mu = el.mu(), K = el.bulk();
  const double tr = eps.trace();
  const Voigt6 unit = (Voigt6() << 1, 1, 1, 0, 0, 0).finished();
  const Voigt66 Isym = symmetric_identity();
  const Voigt66 J = identity_dyad();

  PointConstitutiveOutput out;

  if (model.effective_formulation() == Formulation::Hybrid) {
    const Voigt66 C0 = el.stiffness();
    out.tangent = g * C0;
    out.stress = out.tangent * eps.voigt();
    const EnergySplit s = split_energy(eps, el, model.split, model.trace);
    out.psi_plus = s.psi_plus;
    out.psi_minus = s.psi_minus;
    out.energy = g * strain_energy(eps, el);
    return out;
  }

  // Anisotropic: sigma = g dpsi+/deps + dpsi-/deps. The negative-part
  // Heaviside is taken as 1 - H so both parts never count the same state.
  const double h_plus = heaviside(tr);
  const double h_minus = 1.0 - h_plus;

  if (model.split == SplitScheme::VolDev) {
    const Voigt6 dev = eps.tensor_components() - tr / 3.0 * unit;
    const Voigt66 Pdev = Isym - J / 3.0;
    const double tp = macaulay_plus(tr), tm = macaulay_minus(tr);
    const Voigt6 s_plus = K * tp * unit + 2.0 * mu * dev;
    const Voigt6 s_minus = K * tm * unit;
    out.stress = g * s_plus + s_minus;
    out.tangent = K * (g * h_plus + h_minus) * J + 2.0 * mu * g * Pdev;
    const EnergySplit s = split_energy(eps, el, SplitScheme::VolDev);
    out.psi_plus = s.psi_plus;
    out.psi_minus = s.psi_minus;
    out.energy = g * s.psi_plus + s.psi_minus;
    return out;
  }

  // Spectral split.
  const SpectralDecomposition sd = spectral_decompose(eps);
  const Voigt6 eps_plus = spectral_function(sd, macaulay_plus);
  const Voigt6 eps_minus = spectral_function(sd, macaulay_minus);
  const Voigt66 Pp = projection_plus(sd);
  const Voigt66 Pm = Isym - Pp;
  const EnergySplit s = spectral_split(sd, tr, el, model.trace);

  if (model.trace == SpectralTrace::Macaulay) {
    const Voigt6 s_plus = lambda * macaulay_plus(tr) * unit + 2.0 * mu * eps_plus;
    const Voigt6 s_minus = lambda * macaulay_minus(tr) * unit + 2.0 * mu * eps_minus;
    out.stress = g * s_plus + s_minus;
    out.tangent = lambda * (g * h_plus + h_minus) * J + 2.0 * mu * (g * Pp + Pm);
  } else {
    // psi+- = 1/2 lambda (tr eps+-)^2 + mu eps+-:eps+-. d(tr eps+)/deps is the
    // projector Q+ onto the positive principal subspace, whose own derivative
    // is the spectral derivative of the step function.
    const SpectralTerms t = spectral_terms(sd);
    const Voigt6 Qp = spectral_function(sd, heaviside);
    const Voigt6 Qm = unit - Qp;
    const Voigt66 dQp = spectral_derivative(sd, heaviside, zero);
    const Voigt6 s_plus = lambda * t.tr_plus * Qp + 2.0 * mu * eps_plus;
    const Voigt6 s_minus = lambda * t.tr_minus * Qm + 2.0 * mu * eps_minus;
    const Voigt66 C_plus = lambda * Qp * Qp.transpose() + lambda * t.tr_plus * dQp + 2.0 * mu * Pp;
    const Voigt66 C_minus = lambda * Qm * Qm.transpose() - lambda * t.tr_minus * dQp + 2.0 * mu * Pm;
    out.stress = g * s_plus + s_minus;
    out.tangent = g * C_plus + C_minus;
  }
  out.psi_plus = s.psi_plus;
  out.psi_minus = s.psi_minus;
  out.energy = g * s.psi_plus + s.psi_minus;
  return out;
}

double phase_source(double phi, double history, const FractureProps& frac) {
  const double l = frac.ell();
  return phi / (l * l) - 2.0 * (1.0 - phi) * history / (frac.Gc() * l);
}

double phase_source_derivative(double history, const FractureProps& frac) {
  const double l = frac.ell();
  return 1.0 / (l * l) + 2.0 * history / (frac.Gc() * l);
}

double crack_density(double phi, std::span<const double> grad_phi, double ell) {
  double g2 = 0.0;
  for (double v : grad_phi) g2 += v * v;
  return phi * phi / (2.0 * ell) + 0.5 * ell * g2;
}

double homogeneous_strength(const MaterialModel& model) {
  if (model.split != SplitScheme::NoSplit)
    throw InvalidArgument("homogeneous strength is defined for the unsplit energy only");
  const double E = model.elastic.E();
  return 9.0 / 16.0 * std::sqrt(E * model.fracture.Gc() / (3.0 * model.fracture.ell()));
}

}  // namespace pff
