#pragma once

// Acceptance thresholds shared by the CLI's --accept mode and the acceptance suite.

#include <cstdint>

namespace cubeperc::tol {

inline constexpr double kKsClt = 0.06;
inline constexpr double kKsCritical = 0.10;
inline constexpr double kTvDefect = 0.05;
inline constexpr double kTvCollide = 0.05;
inline constexpr double kStandardErrors = 4.0;
inline constexpr double kLogAgreement = 1e-9;

/// θ window for λ = 1: |θ - 1/4| <= 0.02.
inline constexpr double kThetaAbsUniform = 0.02;
/// θ window for λ != 1: |θ - λ²/4| <= 0.1 λ²/4.
inline constexpr double kThetaRelHardcore = 0.10;
inline constexpr double kThetaFraction = 0.95;

inline constexpr double kNoCollisionAbs = 0.02;
inline constexpr double kNoCollisionFraction = 0.90;
inline constexpr double kSupercriticalNoCollision = 0.99;

inline constexpr double kVarianceRel = 0.10;
inline constexpr double kCovOverVar = 0.05;

}  // namespace cubeperc::tol
