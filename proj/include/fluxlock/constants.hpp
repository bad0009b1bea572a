#pragma once

namespace fluxlock {

// 2019 SI exact values.
inline constexpr double kPlanckJs = 6.62607015e-34;
inline constexpr double kElectronChargeC = 1.602176634e-19;

// Magnetic flux quantum h/2e.  All flux bookkeeping in this library is done
// in units of this constant; fields are microtesla and areas square microns,
// so the handy combination is Phi0 expressed in uT*um^2.
inline constexpr double kFluxQuantumWb = 2.067833848e-15;
inline constexpr double kFluxQuantumUtUm2 = kFluxQuantumWb * 1e18;

}  // namespace fluxlock
