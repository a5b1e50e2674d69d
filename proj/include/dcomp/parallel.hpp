// parallel.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace dcomp::par {

/// Execution mode for the pixel kernels. Serial is the reference
/// implementation; Parallel uses OpenMP when compiled in and falls back
/// to Serial otherwise. Both modes produce byte-identical output.
enum class Mode { Serial, Parallel };

Mode mode();
void set_mode(Mode m);

/// 0 means "runtime default". Applies to OpenMP worksharing regions.
int thread_count();
void set_thread_count(int n);

bool openmp_enabled();

} // namespace dcomp::par
