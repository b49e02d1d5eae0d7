#pragma once

namespace topicbench {

/// Digamma (psi) for x > 0: the recurrence psi(x) = psi(x + 1) - 1/x shifts
/// the argument to x >= 10, where the truncated asymptotic series is accurate to ~1e-16.
double digamma(double x) noexcept;

} // namespace topicbench
