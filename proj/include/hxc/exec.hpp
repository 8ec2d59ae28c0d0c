#pragma once

#include <cstdint>

namespace hxc {

/// Execution policy for the data-parallel kernels.
///
/// Every kernel computes each output entry independently with a fixed
/// reduction order, so `serial` and `parallel` produce identical bits.
/// `serial` is kept as the reference path for tests and benchmarks.
enum class Exec { serial, parallel };

/// Number of OpenMP threads currently configured (1 without OpenMP).
int max_threads();

/// Sets the OpenMP thread count; k <= 0 leaves the runtime default.
void set_threads(int k);

} // namespace hxc
