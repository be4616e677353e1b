#include "swimlab/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swimlab/errors.hpp"

namespace swimlab {

DeformationMode DeformationMode::decaying(HarmonicIndex idx, double amplitude) {
  DeformationMode m;
  m.harmonic = idx;
  m.radial_exponent = -(idx.degree + 1);
  m.amplitude = amplitude;
  m.validate();
  return m;
}

void DeformationMode::validate() const {
  harmonic.validate();
  if (!std::isfinite(amplitude)) throw DomainError("mode amplitude must be finite");
  for (const auto& t : extra) {
    t.harmonic.validate();
    if (!std::isfinite(t.amplitude)) throw DomainError("mode amplitude must be finite");
  }
  if (max_degree() > kMaxSolidHarmonicDegree) throw DomainError("mode degree above supported maximum");
}

int DeformationMode::max_degree() const {
  int d = harmonic.degree;
  for (const auto& t : extra) d = std::max(d, t.harmonic.degree);
  return d;
}

Eigen::Vector3d DeformationMode::field(const Eigen::Vector3d& x) const {
  const double rho = x.norm();
  if (!(rho > 0.0)) throw DomainError("mode field undefined at the origin");
  const Eigen::Vector3d u = x / rho;
  double radial = amplitude * std::pow(rho, radial_exponent) * eval_real_harmonic(harmonic, u);
  for (const auto& t : extra)
    radial += t.amplitude * std::pow(rho, -(t.harmonic.degree + 1)) * eval_real_harmonic(t.harmonic, u);
  return radial * u;
}

std::vector<DeformationMode> reference_modes() {
  return {
      DeformationMode::decaying({3, 1, HarmonicPart::Real}),
      DeformationMode::decaying({3, 1, HarmonicPart::Imag}),
      DeformationMode::decaying({3, 2, HarmonicPart::Real}),
      DeformationMode::decaying({4, 2, HarmonicPart::Real}),
  };
}

Matrix6Xd ResistanceSet::coupling_at(const Eigen::VectorXd& s) const {
  if (s.size() != mode_count()) throw DomainError("shape vector size does not match mode count");
  Matrix6Xd out = N;
  for (Eigen::Index k = 0; k < s.size(); ++k) out += s(k) * dN[static_cast<std::size_t>(k)];
  return out;
}

ResistanceSet ResistanceSet::scaled(double mu) const {
  ResistanceSet out = *this;
  out.M *= mu;
  out.N *= mu;
  for (auto& d : out.dN) d *= mu;
  return out;
}

SurfaceField rigid_boundary_field(int i, std::shared_ptr<const SphereQuadrature> quadrature) {
  if (i < 1 || i > 6) throw DomainError("rigid field index must be in 1..6");
  if (i <= 3) {
    const Eigen::Vector3d e = Eigen::Vector3d::Unit(i - 1);
    return SurfaceField::sample(std::move(quadrature), [e](const Eigen::Vector3d& x) -> Eigen::Vector3d { return e.cross(x); });
  }
  const Eigen::Vector3d e = Eigen::Vector3d::Unit(i - 4);
  return SurfaceField::sample(std::move(quadrature), [e](const Eigen::Vector3d&) { return e; });
}

SurfaceField mode_boundary_field(const DeformationMode& mode, std::shared_ptr<const SphereQuadrature> quadrature) {
  mode.validate();
  return SurfaceField::sample(std::move(quadrature), [&mode](const Eigen::Vector3d& x) { return mode.field(x); });
}

namespace {

int lamb_degree_for(const std::vector<DeformationMode>& modes) {
  int n0 = kDefaultLambDegree;
  for (const auto& m : modes) n0 = std::max(n0, m.max_degree());
  return n0;
}

std::vector<LambSolution> mode_solutions(const std::vector<DeformationMode>& modes,
                                         const std::shared_ptr<const SphereQuadrature>& quadrature) {
  const int n0 = lamb_degree_for(modes);
  std::vector<LambSolution> out;
  out.reserve(modes.size());
  for (const auto& m : modes) out.push_back(solve_boundary(mode_boundary_field(m, quadrature), n0));
  return out;
}

Matrix6Xd derivative_from_solutions(int k, const std::vector<DeformationMode>& modes,
                                    const std::vector<LambSolution>& sols,
                                    const std::shared_ptr<const SphereQuadrature>& quadrature) {
  const SphereQuadrature& quad = *quadrature;
  const int nk = modes[static_cast<std::size_t>(k)].max_degree();
  Matrix6Xd out(6, static_cast<Eigen::Index>(modes.size()));
  for (std::size_t j = 0; j < modes.size(); ++j) {
    if (quad.max_exact_degree < nk + modes[j].max_degree() + 5)
      throw PrecisionError("quadrature cannot resolve the shape-derivative boundary products");
    Eigen::Matrix3Xd data(3, quad.size());
    for (Eigen::Index q = 0; q < quad.size(); ++q) {
      const Eigen::Vector3d x = quad.points.col(q);
      data.col(q) = -eval_velocity_gradient(sols[j], x) * modes[static_cast<std::size_t>(k)].field(x);
    }
    // A net-flux (source) component carries no force or torque; drop it so the
    // exterior problem is well posed.
    const double flux = (data.cwiseProduct(quad.points).colwise().sum().transpose().array() * quad.weights.array()).sum();
    data -= (flux / (4.0 * std::numbers::pi)) * quad.points;
    const LambSolution u = solve_boundary(SurfaceField(quadrature, std::move(data)), 1);
    out.col(static_cast<Eigen::Index>(j)) = force_torque(u).as_vector();
  }
  return out;
}

}  // namespace

Matrix6d grand_resistance_sphere(std::shared_ptr<const SphereQuadrature> quadrature) {
  Matrix6d M;
  for (int j = 1; j <= 6; ++j) M.col(j - 1) = force_torque(solve_boundary(rigid_boundary_field(j, quadrature), 1)).as_vector();
  return M;
}

Matrix6Xd coupling_matrix(const std::vector<DeformationMode>& modes,
                          std::shared_ptr<const SphereQuadrature> quadrature) {
  const int n0 = lamb_degree_for(modes);
  Matrix6Xd N(6, static_cast<Eigen::Index>(modes.size()));
  for (std::size_t j = 0; j < modes.size(); ++j)
    N.col(static_cast<Eigen::Index>(j)) =
        force_torque(solve_boundary(mode_boundary_field(modes[j], quadrature), n0)).as_vector();
  return N;
}

Matrix6Xd coupling_derivative(int k, const std::vector<DeformationMode>& modes,
                              std::shared_ptr<const SphereQuadrature> quadrature) {
  if (k < 0 || k >= static_cast<int>(modes.size())) throw DomainError("mode index out of range");
  return derivative_from_solutions(k, modes, mode_solutions(modes, quadrature), quadrature);
}

ResistanceSet resistance_set(const std::vector<DeformationMode>& modes,
                             std::shared_ptr<const SphereQuadrature> quadrature) {
  ResistanceSet rs;
  rs.M = grand_resistance_sphere(quadrature);
  const auto sols = mode_solutions(modes, quadrature);
  rs.N.resize(6, static_cast<Eigen::Index>(modes.size()));
  for (std::size_t j = 0; j < modes.size(); ++j) rs.N.col(static_cast<Eigen::Index>(j)) = force_torque(sols[j]).as_vector();
  for (int k = 0; k < static_cast<int>(modes.size()); ++k)
    rs.dN.push_back(derivative_from_solutions(k, modes, sols, quadrature));
  return rs;
}

}  // namespace swimlab
