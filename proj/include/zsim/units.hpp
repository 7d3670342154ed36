#pragma once

// Natural units: hbar = m = c = 1. Every quantity inside the library is
// expressed in these units; the SI table below is only used at the edges
// (CLI field helpers and reports).

namespace zsim::units {

inline constexpr double kHbar = 1.0;
inline constexpr double kMass = 1.0;
inline constexpr double kLightSpeed = 1.0;

/// Electron charge q = -e with the coupling absorbed into the field scale.
inline constexpr double kCharge = -1.0;

/// Zitterbewegung angular frequency 2mc^2/hbar.
inline constexpr double kOmega0 = 2.0 * kMass * kLightSpeed * kLightSpeed / kHbar;
/// State-function frequency mc^2/hbar = omega0 / 2.
inline constexpr double kOmega1 = 0.5 * kOmega0;
/// Spin-circle radius c/omega0 = hbar/(2mc).
inline constexpr double kSpinRadius = kLightSpeed / kOmega0;
/// h* = hbar/2, the spin magnitude.
inline constexpr double kHalfHbar = 0.5 * kHbar;
inline constexpr double kRestEnergy = kMass * kLightSpeed * kLightSpeed;

inline constexpr double kPi = 3.14159265358979323846;
/// ZBW period 2 pi / omega0.
inline constexpr double kZbwPeriod = 2.0 * kPi / kOmega0;

namespace si {
inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kElectronMass = 9.1093837015e-31;  // kg
inline constexpr double kLightSpeed = 299792458.0;     // m/s
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C

/// One natural time unit hbar/(mc^2) in seconds.
inline constexpr double kTime = kHbar / (kElectronMass * kLightSpeed * kLightSpeed);
/// One natural length unit hbar/(mc) in metres.
inline constexpr double kLength = kHbar / (kElectronMass * kLightSpeed);
/// Rest energy in joules.
inline constexpr double kEnergy = kElectronMass * kLightSpeed * kLightSpeed;
/// Magnetic field whose cyclotron frequency eB/m equals one natural frequency unit.
inline constexpr double kMagneticField =
    kElectronMass * kElectronMass * kLightSpeed * kLightSpeed / (kElementaryCharge * kHbar);
/// Electric field scale c times kMagneticField, in V/m.
inline constexpr double kElectricField = kLightSpeed * kMagneticField;
}  // namespace si

inline constexpr double tesla_to_natural(double tesla) { return tesla / si::kMagneticField; }
inline constexpr double volt_per_meter_to_natural(double v_per_m) { return v_per_m / si::kElectricField; }
inline constexpr double natural_to_seconds(double t) { return t * si::kTime; }
inline constexpr double natural_to_meters(double l) { return l * si::kLength; }

}  // namespace zsim::units
