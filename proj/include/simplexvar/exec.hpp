#pragma once

namespace simplexvar {

// Selects the OpenMP kernel or its serial reference. Both produce
// bit-identical results; the serial path is what the tests compare against.
enum class Exec { serial, parallel };

}  // namespace simplexvar
