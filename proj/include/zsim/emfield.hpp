#pragma once

#include "zsim/minkowski.hpp"

#include <stdexcept>
#include <variant>

namespace zsim {

struct FreeField {};

struct UniformField {
  Vec3 electric = Vec3::Zero();
  Vec3 magnetic = Vec3::Zero();
};

/// Point charge field E = Z r_hat / r^2 about `center`.
struct CoulombField {
  double strength = 1.0;
  Vec3 center = Vec3::Zero();
};

using FieldModel = std::variant<FreeField, UniformField, CoulombField>;

/// Field evaluation at an exact Coulomb center.
class FieldSingularity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldSample {
  Vec3 electric = Vec3::Zero();
  Vec3 magnetic = Vec3::Zero();
  /// 4-potential (V/c, A). Gauges: uniform -> (-E0.x, B0 x x / 2); Coulomb -> (Z/r, 0).
  FourVector potential = FourVector::Zero();
};

FieldSample field_at(const FieldModel& model, const FourVector& x);

/// True for the free model; lets integrators skip force evaluation.
bool is_free(const FieldModel& model);

/// Contravariant F^{mu nu} with F^{i0} = E^i/c and F^{ij} = -eps_{ijk} B^k.
/// This arrangement reproduces f^0 = (q/c) E.xdot and f = q(tdot E + xdot x B)
/// for f^mu = q F^{mu nu} u_nu.
Tensor4 field_tensor(const Vec3& electric, const Vec3& magnetic);

/// Lorentz 4-force from the component formulas.
FourVector lorentz_force(double charge, const Vec3& electric, const Vec3& magnetic,
                         const FourVector& u);

/// q F^{mu nu} u_nu.
inline FourVector tensor_force(double charge, const Tensor4& field, const FourVector& u) {
  return charge * field * lower(u);
}

}  // namespace zsim
