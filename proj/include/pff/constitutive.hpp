#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <string_view>

namespace pff {

// Voigt ordering used throughout: xx, yy, zz, xy, xz, yz.
//
// Strain vectors hold engineering shears (gamma_ij = 2 eps_ij).
// Stress vectors hold tensor components (sigma_ij).
// A fourth-order tensor C_ijkl is stored as the 6x6 matrix D with
// D(I,J) = C_{ij kl}, where I <-> (ij) and J <-> (kl). With this pairing
// sigma = D * strain needs no shear factors and sigma . strain is the work
// density.
using Voigt6 = Eigen::Matrix<double, 6, 1>;
using Voigt66 = Eigen::Matrix<double, 6, 6>;

namespace voigt {
inline constexpr int kRow[6] = {0, 1, 2, 0, 0, 1};
inline constexpr int kCol[6] = {0, 1, 2, 1, 2, 2};

/// Voigt index of the tensor index pair (i, j).
constexpr int index(int i, int j) {
  if (i == j) return i;
  if (i > j) std::swap(i, j);
  return (i == 0) ? (j == 1 ? 3 : 4) : 5;
}

/// Tensor components of a stress-like Voigt vector as a 3x3 matrix.
Eigen::Matrix3d to_matrix(const Voigt6& tensor_components);
/// Inverse of to_matrix (symmetric part is taken).
Voigt6 from_matrix(const Eigen::Matrix3d& m);
}  // namespace voigt

/// Isotropic linear elastic constants. Lamé and bulk moduli are derived on
/// construction.
class ElasticProps {
 public:
  ElasticProps(double youngs_modulus, double poisson_ratio);

  double E() const { return E_; }
  double nu() const { return nu_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  double bulk() const { return bulk_; }

  /// Undamaged stiffness C0 in Voigt form.
  Voigt66 stiffness() const;

 private:
  double E_, nu_, lambda_, mu_, bulk_;
};

/// Griffith toughness Gc and regularization length ell.
class FractureProps {
 public:
  FractureProps(double toughness, double length_scale);
  double Gc() const { return Gc_; }
  double ell() const { return ell_; }

 private:
  double Gc_, ell_;
};

enum class SplitScheme { NoSplit, VolDev, Spectral };
enum class Formulation { Hybrid, Anisotropic };

/// Trace term of the spectral split.
///  - Macaulay: 1/2 lambda <tr eps>_{+/-}^2, so psi+ + psi- = psi0 and the
///    tangent carries lambda {g H(tr) + H(-tr)} J.
///  - Literal:  1/2 lambda (tr eps^{+/-})^2, the trace of the positive
///    (negative) principal part. psi+ + psi- exceeds psi0 by
///    -lambda tr(eps+) tr(eps-) whenever the principal strains change sign.
enum class SpectralTrace { Macaulay, Literal };

std::string_view to_string(SplitScheme s);
std::string_view to_string(Formulation f);
std::string_view to_string(SpectralTrace t);
SplitScheme parse_split(std::string_view text);
Formulation parse_formulation(std::string_view text);
SpectralTrace parse_trace(std::string_view text);

struct MaterialModel {
  ElasticProps elastic;
  FractureProps fracture;
  SplitScheme split = SplitScheme::NoSplit;
  Formulation formulation = Formulation::Hybrid;
  SpectralTrace trace = SpectralTrace::Macaulay;

  /// NoSplit has nothing to make anisotropic, so it always behaves as Hybrid.
  Formulation effective_formulation() const {
    return split == SplitScheme::NoSplit ? Formulation::Hybrid : formulation;
  }
};

/// Symmetric strain tensor stored as a Voigt vector with engineering shears.
/// Plane strain states carry zz = xz = yz = 0 explicitly.
class StrainTensor {
 public:
  StrainTensor() : v_(Voigt6::Zero()) {}

  static StrainTensor from_voigt(const Voigt6& engineering) { return StrainTensor(engineering); }
  /// From a symmetric 3x3 tensor; shear entries are doubled on storage.
  static StrainTensor from_matrix(const Eigen::Matrix3d& eps);
  /// From tensor-component Voigt entries (the form produced by P : eps).
  static StrainTensor from_tensor_components(const Voigt6& comps);
  static StrainTensor plane(double exx, double eyy, double gamma_xy);

  const Voigt6& voigt() const { return v_; }
  /// Voigt vector with tensor shear components (gamma / 2).
  Voigt6 tensor_components() const;
  Eigen::Matrix3d matrix() const;
  double trace() const { return v_(0) + v_(1) + v_(2); }
  /// eps : eps with the tensor double contraction.
  double contract() const;

 private:
  explicit StrainTensor(const Voigt6& v) : v_(v) {}
  Voigt6 v_;
};

/// psi0 = 1/2 lambda tr(eps)^2 + mu eps:eps.
double strain_energy(const StrainTensor& eps, const ElasticProps& elastic);

struct EnergySplit {
  double psi_plus = 0.0;
  double psi_minus = 0.0;
};

EnergySplit split_energy(const StrainTensor& eps, const ElasticProps& elastic,
                         SplitScheme scheme,
                         SpectralTrace trace = SpectralTrace::Macaulay);

/// Principal values sorted in descending order; directions are the columns.
struct SpectralDecomposition {
  Eigen::Vector3d values;
  Eigen::Matrix3d directions;
};

SpectralDecomposition spectral_decompose(const StrainTensor& eps);

/// Two principal strains are treated as equal when
/// |a - b| < 1e-9 * max(1, |a| + |b|).
bool principal_values_coincide(double a, double b);

struct Degradation {
  double g;
  double dg;
};

/// g = (1 - phi)^2. phi is not clamped.
inline Degradation degradation(double phi) { return {(1.0 - phi) * (1.0 - phi), -2.0 * (1.0 - phi)}; }

/// Heaviside with H(0) = 1.
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }
inline double macaulay_plus(double x) { return x > 0.0 ? x : 0.0; }
inline double macaulay_minus(double x) { return x < 0.0 ? x : 0.0; }

/// P+ = d eps+ / d eps. For coinciding principal strains the divided
/// difference (<a>+ - <b>+)/(a - b) is replaced by the Heaviside function.
Voigt66 projection_plus(const StrainTensor& eps);
/// P- = I - P+.
Voigt66 projection_minus(const StrainTensor& eps);

/// Positive and negative principal parts eps+ and eps-.
std::pair<StrainTensor, StrainTensor> principal_parts(const StrainTensor& eps);

/// Fourth-order symmetric identity in the Voigt convention above.
Voigt66 symmetric_identity();
/// J = 1 (x) 1.
Voigt66 identity_dyad();

struct PointConstitutiveOutput {
  Voigt6 stress = Voigt6::Zero();
  Voigt66 tangent = Voigt66::Zero();
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  /// Degraded elastic energy density consistent with the returned stress.
  double energy = 0.0;
};

PointConstitutiveOutput stress_and_tangent(const StrainTensor& eps, double phi,
                                           const MaterialModel& model);

/// H_new = max(candidate, H_old).
inline double update_history(double psi_plus_candidate, double history_old) {
  return psi_plus_candidate > history_old ? psi_plus_candidate : history_old;
}

/// Strong-form residual density of the phase field equation:
/// r = phi / ell^2 - 2 (1 - phi) H / (Gc ell).
double phase_source(double phi, double history, const FractureProps& frac);
/// dr/dphi = 1 / ell^2 + 2 H / (Gc ell), strictly positive for H >= 0.
double phase_source_derivative(double history, const FractureProps& frac);

/// gamma_ell = phi^2 / (2 ell) + ell / 2 |grad phi|^2.
double crack_density(double phi, std::span<const double> grad_phi, double ell);

/// Peak stress of the homogeneous uniaxial response,
/// (9/16) sqrt(E Gc / (3 ell)). Only meaningful without a split.
double homogeneous_strength(const MaterialModel& model);

}  // namespace pff
