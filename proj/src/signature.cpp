#include "swimlab/signature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "swimlab/errors.hpp"

namespace swimlab {

ShapeBox ShapeBox::symmetric(Eigen::Index n, double half_width) {
  if (!(half_width > 0.0)) throw DomainError("box half width must be positive");
  return {Eigen::VectorXd::Constant(n, -half_width), Eigen::VectorXd::Constant(n, half_width)};
}

bool ShapeBox::contains(const Eigen::VectorXd& s, double tol) const {
  if (s.size() != size() || !s.allFinite()) return false;
  return ((s - lower).array() >= -tol).all() && ((upper - s).array() >= -tol).all();
}

Eigen::MatrixXd mode_gram_matrix(const std::vector<DeformationMode>& modes,
                                 const std::shared_ptr<const SphereQuadrature>& quadrature) {
  std::vector<SurfaceField> fields;
  for (const auto& m : modes) fields.push_back(mode_boundary_field(m, quadrature));
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) g(i, j) = g(j, i) = surface_inner(fields[i], fields[j]);
  return g;
}

double self_propelled_residual(const std::vector<DeformationMode>& modes,
                               const std::shared_ptr<const SphereQuadrature>& quadrature) {
  const SphereQuadrature& quad = *quadrature;
  std::vector<Eigen::Matrix3Xd> v;
  for (const auto& m : modes) v.push_back(mode_boundary_field(m, quadrature).values());
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    Eigen::Vector3d lin = v[i] * quad.weights, ang = Eigen::Vector3d::Zero();
    for (Eigen::Index q = 0; q < quad.size(); ++q) ang += quad.weights(q) * quad.points.col(q).cross(v[i].col(q));
    worst = std::max({worst, lin.norm(), ang.norm()});
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      Eigen::Vector3d c = Eigen::Vector3d::Zero();
      for (Eigen::Index q = 0; q < quad.size(); ++q) c += quad.weights(q) * v[i].col(q).cross(v[j].col(q));
      worst = std::max(worst, c.norm());
    }
  }
  return worst;
}

SwimmerSignature::SwimmerSignature(std::vector<DeformationMode> modes, ShapeBox box, ResistanceSet resistance,
                                   std::shared_ptr<const SphereQuadrature> quadrature)
    : modes_(std::move(modes)), box_(std::move(box)), resistance_(std::move(resistance)), quadrature_(std::move(quadrature)) {
  const auto n = static_cast<Eigen::Index>(modes_.size());
  if (n < 1) throw SignatureError("a signature needs at least one mode");
  if (!quadrature_) throw SignatureError("signature without quadrature");
  for (const auto& m : modes_) m.validate();
  if (box_.size() != n || box_.upper.size() != n) throw SignatureError("shape box dimension does not match mode count");
  if (!box_.lower.allFinite() || !box_.upper.allFinite() || (box_.lower.array() >= 0.0).any() ||
      (box_.upper.array() <= 0.0).any())
    throw SignatureError("zero must be interior to the shape box");

  if (resistance_.N.cols() != n || resistance_.dN.size() != static_cast<std::size_t>(n))
    throw SignatureError("resistance data does not match mode count");
  for (const auto& d : resistance_.dN)
    if (d.cols() != n) throw SignatureError("resistance data does not match mode count");
  const Matrix6d& M = resistance_.M;
  if ((M - M.transpose()).norm() > 1e-10 * std::max(1.0, M.norm())) throw SignatureError("M is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix6d> eig(M);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw SignatureError("M is not positive definite");
  m_inv_ = M.inverse();

  const Eigen::MatrixXd gram = mode_gram_matrix(modes_, quadrature_);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(gram);
  const double lmax = ge.eigenvalues().maxCoeff(), lmin = ge.eigenvalues().minCoeff();
  if (!(lmin > 1e-12 * lmax)) throw SignatureError("mode boundary fields are linearly dependent");
  gram_condition_ = lmax / lmin;

  constraint_residual_ = self_propelled_residual(modes_, quadrature_);
  if (constraint_residual_ > 1e-10) throw SignatureError("modes violate the self-propelled constraints");
}

SwimmerSignature SwimmerSignature::build(std::vector<DeformationMode> modes, ShapeBox box,
                                         std::shared_ptr<const SphereQuadrature> quadrature) {
  ResistanceSet rs = resistance_set(modes, quadrature);
  return SwimmerSignature(std::move(modes), std::move(box), std::move(rs), std::move(quadrature));
}

Vector6d SwimmerSignature::twist(const Eigen::VectorXd& s, const Eigen::VectorXd& rates) const {
  if (rates.size() != size()) throw DomainError("rate vector size does not match mode count");
  if (s.size() != size()) throw DomainError("shape vector size does not match mode count");
  Vector6d n = resistance_.N * rates;
  for (Eigen::Index k = 0; k < s.size(); ++k) n.noalias() += s(k) * (resistance_.dN[static_cast<std::size_t>(k)] * rates);
  return -m_inv_ * n;
}

SwimmerSignature SwimmerSignature::with_viscosity(double mu) const {
  if (!(mu > 0.0)) throw DomainError("viscosity must be positive");
  return SwimmerSignature(modes_, box_, resistance_.scaled(mu), quadrature_);
}

Eigen::VectorXd ControlField::stacked() const {
  Eigen::VectorXd v(6 + shape_rate.size());
  v << body_twist, shape_rate;
  return v;
}

namespace {

void check_args(const SwimmerSignature& sig, std::initializer_list<int> idx, const Eigen::VectorXd& s) {
  for (int i : idx)
    if (i < 0 || i >= sig.size()) throw DomainError("mode index out of range");
  if (!sig.box().contains(s)) throw DomainError("shape parameters outside the admissible box");
}

Eigen::VectorXd unit(Eigen::Index n, int i) { return Eigen::VectorXd::Unit(n, i); }

ControlField generator_unchecked(const SwimmerSignature& sig, int i, const Eigen::VectorXd& s) {
  ControlField f;
  f.shape_rate = unit(sig.size(), i);
  f.body_twist = sig.twist(s, f.shape_rate);
  return f;
}

// d(twist of Z_i)/ds, one column per s_k; exact because the model is affine in s.
Eigen::Matrix<double, 6, Eigen::Dynamic> generator_jacobian(const SwimmerSignature& sig, int i) {
  Eigen::Matrix<double, 6, Eigen::Dynamic> d(6, sig.size());
  for (Eigen::Index k = 0; k < sig.size(); ++k)
    d.col(k) = -sig.mobility_inverse() * sig.resistance().dN[static_cast<std::size_t>(k)].col(i);
  return d;
}

// Body-frame bracket of two fields with constant shape rates. dG_eF and dF_eG are
// the s-derivatives of the twists along the other field's shape rate.
ControlField combine(const ControlField& F, const ControlField& G, const Vector6d& dG_eF, const Vector6d& dF_eG) {
  const Eigen::Vector3d aF = F.body_twist.head<3>(), cF = F.body_twist.tail<3>();
  const Eigen::Vector3d aG = G.body_twist.head<3>(), cG = G.body_twist.tail<3>();
  ControlField out;
  out.body_twist.head<3>() = aF.cross(aG);
  out.body_twist.tail<3>() = aF.cross(cG) - aG.cross(cF);
  out.body_twist += dG_eF - dF_eG;
  out.shape_rate = Eigen::VectorXd::Zero(F.shape_rate.size());
  return out;
}

ControlField bracket_unchecked(const SwimmerSignature& sig, int i, int j, const Eigen::VectorXd& s) {
  const ControlField F = generator_unchecked(sig, i, s), G = generator_unchecked(sig, j, s);
  return combine(F, G, generator_jacobian(sig, j).col(i), generator_jacobian(sig, i).col(j));
}

}  // namespace

ControlField generator(const SwimmerSignature& sig, int i, const Eigen::VectorXd& s) {
  check_args(sig, {i}, s);
  return generator_unchecked(sig, i, s);
}

ControlField lie_bracket(const SwimmerSignature& sig, int i, int j, const Eigen::VectorXd& s) {
  check_args(sig, {i, j}, s);
  return bracket_unchecked(sig, i, j, s);
}

ControlField depth_two_bracket(const SwimmerSignature& sig, int k, int i, int j, const Eigen::VectorXd& s, double h) {
  check_args(sig, {k, i, j}, s);
  const ControlField F = generator_unchecked(sig, k, s);
  const ControlField B = bracket_unchecked(sig, i, j, s);
  const Eigen::VectorXd e = unit(sig.size(), k);
  const Vector6d dB = (bracket_unchecked(sig, i, j, s + h * e).body_twist -
                       bracket_unchecked(sig, i, j, s - h * e).body_twist) / (2.0 * h);
  // The inner bracket has zero shape rate, so Z_k is not differentiated.
  return combine(F, B, dB, Vector6d::Zero());
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol, std::vector<double>* singular_values) {
  if (m.size() == 0) {
    if (singular_values) singular_values->clear();
    return 0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();  // already decreasing
  if (singular_values) singular_values->assign(sv.data(), sv.data() + sv.size());
  const double smax = sv.size() ? sv(0) : 0.0;
  if (!(smax > 0.0)) return 0;
  return static_cast<int>((sv.array() > rel_tol * smax).count());
}

RankCertificate rank_certificate(const SwimmerSignature& sig, const Eigen::VectorXd& s) {
  if (!sig.box().contains(s)) throw DomainError("shape parameters outside the admissible box");
  const int n = static_cast<int>(sig.size());
  RankCertificate cert;
  cert.target = 6 + n;

  std::vector<Eigen::VectorXd> columns;
  for (int i = 0; i < n; ++i) columns.push_back(generator(sig, i, s).stacked());
  Eigen::Matrix<double, 6, Eigen::Dynamic> twists(6, n * (n - 1) / 2);
  int c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      BracketRecord b{{i, j}, lie_bracket(sig, i, j, s)};
      columns.push_back(b.field.stacked());
      twists.col(c++) = b.field.body_twist;
      cert.brackets.push_back(std::move(b));
    }
  cert.bracket_span = numerical_rank(twists);

  auto assemble = [&] {
    Eigen::MatrixXd m(cert.target, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t q = 0; q < columns.size(); ++q) m.col(static_cast<Eigen::Index>(q)) = columns[q];
    return m;
  };
  cert.rank = numerical_rank(assemble(), kRankThreshold, &cert.singular_values);

  if (cert.rank < cert.target && n >= 2) {
    cert.depth = 2;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          BracketRecord b{{k, i, j}, depth_two_bracket(sig, k, i, j, s)};
          columns.push_back(b.field.stacked());
          cert.brackets.push_back(std::move(b));
        }
    cert.rank = numerical_rank(assemble(), kRankThreshold, &cert.singular_values);
  }
  cert.controllable = cert.rank == cert.target;
  return cert;
}

SwimmerSignature perturb_signature(const SwimmerSignature& sig, double delta, std::mt19937_64& rng) {
  if (!(delta > 0.0)) throw DomainError("perturbation size must be positive");
  std::vector<HarmonicIndex> basis;
  for (int d = 2; d <= 4; ++d) {
    basis.push_back({d, 0, HarmonicPart::Real});
    for (int m = 1; m <= d; ++m) {
      basis.push_back({d, m, HarmonicPart::Real});
      basis.push_back({d, m, HarmonicPart::Imag});
    }
  }
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(0.5, 1.0);
  const auto& quad = sig.quadrature();
  std::vector<DeformationMode> modes = sig.modes();
  for (auto& mode : modes) {
    DeformationMode bump;
    bump.harmonic = basis.front();
    bump.amplitude = 0.0;
    for (const auto& b : basis) bump.extra.push_back({b, normal(rng)});
    const double norm = std::sqrt(surface_inner(mode_boundary_field(bump, quad), mode_boundary_field(bump, quad)));
    const double factor = delta * scale(rng) / norm;
    for (auto t : bump.extra) {
      t.amplitude *= factor;
      mode.extra.push_back(t);
    }
  }
  return SwimmerSignature::build(std::move(modes), sig.box(), quad);
}

SwimmerSignature perturb_to_controllable(const SwimmerSignature& sig, double delta, std::uint64_t seed, int max_tries) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sig.size());
  RankCertificate cert = rank_certificate(sig, zero);
  if (cert.controllable) return sig;
  int best = cert.rank;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < max_tries; ++t) {
    SwimmerSignature candidate = perturb_signature(sig, delta, rng);
    cert = rank_certificate(candidate, zero);
    best = std::max(best, cert.rank);
    if (cert.controllable) return candidate;
  }
  throw NoCertificateError("no controllable perturbation found within the retry budget", best);
}

}  // namespace swimlab
