#include "zsim/emfield.hpp"

#include "zsim/units.hpp"

#include <cmath>

namespace zsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

FieldSample field_at(const FieldModel& model, const FourVector& x) {
  const Vec3 pos = spatial(x);
  return std::visit(
      Overloaded{
          [](const FreeField&) { return FieldSample{}; },
          [&](const UniformField& f) {
            FieldSample s;
            s.electric = f.electric;
            s.magnetic = f.magnetic;
            s.potential[0] = -f.electric.dot(pos) / units::kLightSpeed;
            s.potential.tail<3>() = 0.5 * f.magnetic.cross(pos);
            return s;
          },
          [&](const CoulombField& f) {
            const Vec3 r = pos - f.center;
            const double r2 = r.squaredNorm();
            if (!(r2 > 0.0) || !std::isfinite(r2)) {
              throw FieldSingularity("Coulomb field evaluated at its center");
            }
            const double rn = std::sqrt(r2);
            FieldSample s;
            s.electric = f.strength * r / (r2 * rn);
            s.potential[0] = f.strength / rn / units::kLightSpeed;
            return s;
          },
      },
      model);
}

bool is_free(const FieldModel& model) { return std::holds_alternative<FreeField>(model); }

Tensor4 field_tensor(const Vec3& electric, const Vec3& magnetic) {
  const Vec3 e = electric / units::kLightSpeed;
  const Vec3& b = magnetic;
  Tensor4 f;
  // clang-format off
  f <<  0.0,  -e[0], -e[1], -e[2],
        e[0],  0.0,  -b[2],  b[1],
        e[1],  b[2],  0.0,  -b[0],
        e[2], -b[1],  b[0],  0.0;
  // clang-format on
  return f;
}

FourVector lorentz_force(double charge, const Vec3& electric, const Vec3& magnetic,
                         const FourVector& u) {
  const double tdot = u[0] / units::kLightSpeed;
  const Vec3 xdot = spatial(u);
  FourVector f;
  f[0] = charge / units::kLightSpeed * electric.dot(xdot);
  f.tail<3>() = charge * (tdot * electric + xdot.cross(magnetic));
  return f;
}

}  // namespace zsim
