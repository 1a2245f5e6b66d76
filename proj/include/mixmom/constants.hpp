#pragma once

namespace mixmom {

// Largest supported component count. The moment inversion carries (2i-1)!!
// factors and an exp(0.5*(m/sigma)^2) amplification; past k ~ 12 a double
// holds no significant digits of the inverted power sums at realistic sigma.
inline constexpr int kMaxComponents = 12;

// Aberth-Ehrlich iteration: simultaneous (Jacobi) updates, stop when every
// correction falls below kAberthCorrectionTol * (1 + |root|).
inline constexpr int kAberthMaxIterations = 200;
inline constexpr double kAberthCorrectionTol = 1e-14;

// Coefficient-scaled residual a converged root set is expected to meet.
inline constexpr double kRootResidualTol = 1e-10;

// Roots with |Im| <= kDefaultImagTol * (1 + |Re|) are truncated to their
// real part; larger imaginary parts mark a genuinely complex pair.
inline constexpr double kDefaultImagTol = 1e-6;

// Slack constants pinning the "up to an unspecified constant" bounds the
// tests assert. The measured ratios are printed next to each assertion so
// the remaining slack is auditable in the test output.
//
//   |eps_m|       <= kPowerSumBoundSlack * eps * k * sigma^m * e^{0.5 (m/sigma)^2}
//   |e_hat - e_m| <= kCoeffBoundSlack    * eps * k * (2 sigma)^m * e^{0.5 (m/sigma)^2}
inline constexpr double kPowerSumBoundSlack = 3.0;
inline constexpr double kCoeffBoundSlack = 5.0;

// Calibration constant kappa in n = ceil(kappa * ln(1/delta) / eps^2); the
// concentration statement carries no explicit constant, tests pin kappa = 1
// and record the observed slack.
inline constexpr double kMomentCalibration = 1.0;

}  // namespace mixmom
