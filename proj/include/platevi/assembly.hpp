#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "platevi/fields.hpp"
#include "platevi/linalg.hpp"
#include "platevi/space.hpp"
#include "platevi/sparse.hpp"

namespace platevi {

enum class Method { C0ip, Mixed };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
/// Lagrange degree used for the state: 2 for C0 interior penalty, 1 for the mixed method.
int state_degree(Method m);

/// Data of one optimal control problem: regularization beta, desired state,
/// obstacle, penalty parameter and discretization.
struct ProblemSpec {
  double beta = 1.0;
  FieldSpec y_d = fields::constant(0.0);
  FieldSpec psi = fields::constant(1e6);
  double sigma = 10.0;
  Method method = Method::C0ip;

  /// Checks beta > 0, sigma > 0 (C0-IP), that both fields exist in the
  /// catalog, and that psi is positive at Gauss points of every boundary edge.
  void validate(const Mesh& mesh) const;
};

/// a_h of the C0 interior penalty method on a degree-2 space:
///   beta [ sum_T (D^2 y : D^2 z)_T
///          - sum_e ({{d2y/dn2}}, [[dz/dn]])_e - sum_e ({{d2z/dn2}}, [[dy/dn]])_e
///          + sigma sum_e |e|^-1 ([[dy/dn]], [[dz/dn]])_e ] + (y, z)
/// over interior edges e, with [[.]] the trace from the edge's first
/// triangle minus the trace from its second (normal pointing first -> second).
SparseSymMatrix assemble_c0ip(const FeSpace& space, const ProblemSpec& problem);

/// (phi_j, phi_i)
SparseSymMatrix assemble_mass(const FeSpace& space);
/// (grad phi_j, grad phi_i)
SparseSymMatrix assemble_stiffness(const FeSpace& space);
/// Row sums of the mass matrix on the diagonal.
SparseSymMatrix lumped_mass(const SparseSymMatrix& mass);

/// y -> beta K M^{-1} K y + M y on a degree-1 space, applied matrix-free with
/// an inner conjugate-gradient mass solve.
class MixedOperator final : public LinearOperator {
 public:
  MixedOperator(SparseSymMatrix mass, SparseSymMatrix stiffness, double beta, double inner_tol = 1e-12);

  [[nodiscard]] Index size() const override { return mass_.size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  [[nodiscard]] std::string_view kind() const override { return "mixed composite"; }
  /// beta K M_L^{-1} K + M with the lumped mass M_L.
  [[nodiscard]] const SparseSymMatrix* approximation() const override { return &approximation_; }
  /// beta |K| M_L^{-1} |K| |x| + |M| |x|
  bool abs_apply(std::span<const double> x, std::span<double> y) const override;

  /// u = M^{-1} K y, the control paired with state y (u = -Delta_h y).
  [[nodiscard]] Vector control(std::span<const double> y) const;

  [[nodiscard]] const SparseSymMatrix& mass() const noexcept { return mass_; }
  [[nodiscard]] const SparseSymMatrix& stiffness() const noexcept { return stiffness_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }

 private:
  SparseSymMatrix mass_;
  SparseSymMatrix stiffness_;
  SparseSymMatrix approximation_;
  Vector lumped_;
  double beta_;
  double inner_tol_;
};

std::shared_ptr<MixedOperator> assemble_mixed(const FeSpace& space, const ProblemSpec& problem);

/// f_i = (y_d, phi_i) with degree-4 quadrature.
Vector assemble_load(const FeSpace& space, const Field& y_d);

/// sqrt(v^T A v). Throws CoercivityError when v^T A v < -1e-12 max(1, |v|^2).
double energy_norm(const LinearOperator& a, std::span<const double> v);
double energy_norm(const FeSpace& space, const ProblemSpec& problem, std::span<const double> v);

/// Discrete Laplacian Delta_h y: the w in V_h with (w, z) = -(grad y, grad z) for all z.
Vector discrete_laplacian(const FeSpace& space, std::span<const double> y, double tol = 1e-12);

/// Control recovered from a discrete state, u_h = -Delta_h y_h, in the state's
/// own space. For the mixed method this is the second unknown of the saddle
/// point system.
Vector recover_control(const FeSpace& space, std::span<const double> state, double tol = 1e-12);

}  // namespace platevi
