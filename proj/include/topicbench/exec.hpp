#pragma once

namespace topicbench {

/// Selects between the OpenMP kernel and its serial reference. Both paths
/// produce bitwise-identical results; the serial one exists for testing
/// and benchmarking.
enum class Exec { parallel, serial };

} // namespace topicbench
