#pragma once

namespace nlstiff {

// Selects between the serial reference path and the OpenMP path of the
// data-parallel kernels. Both paths produce bit-identical results.
enum class Execution { serial, parallel };

// Number of OpenMP threads available to parallel kernels (1 without OpenMP).
int available_threads() noexcept;

}  // namespace nlstiff
