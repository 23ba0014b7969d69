#pragma once

namespace dyadic {

// Selects the serial reference path or the OpenMP path of a batch kernel. Both
// paths write each output slot from exactly one iteration, so they agree bitwise.
enum class Exec { Serial, Parallel };

int max_threads();

}  // namespace dyadic
