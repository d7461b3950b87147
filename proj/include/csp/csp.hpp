#pragma once

#include "error.hpp"    // IWYU pragma: export
#include "fft.hpp"      // IWYU pragma: export
#include "numerics.hpp" // IWYU pragma: export
#include "profile.hpp"  // IWYU pragma: export
#include "scatter.hpp"  // IWYU pragma: export
#include "soliton.hpp"     // IWYU pragma: export
#include "asymptotics.hpp" // IWYU pragma: export
#include "pde.hpp"         // IWYU pragma: export
#include "io.hpp"          // IWYU pragma: export
