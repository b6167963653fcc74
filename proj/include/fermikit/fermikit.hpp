#pragma once

#include "fermikit/cyclotomic.hpp"
#include "fermikit/determinant.hpp"
#include "fermikit/floquet.hpp"
#include "fermikit/gaussian_rational.hpp"
#include "fermikit/hermitian_eigen.hpp"
#include "fermikit/irreducibility.hpp"
#include "fermikit/isospec.hpp"
#include "fermikit/lattice.hpp"
#include "fermikit/laurent.hpp"
#include "fermikit/modular.hpp"
#include "fermikit/perturb.hpp"
#include "fermikit/potential_spec.hpp"
#include "fermikit/spectral.hpp"

#ifndef FERMIKIT_VERSION
#define FERMIKIT_VERSION "0.0.0"
#endif

namespace fermikit {

inline constexpr const char* version() { return FERMIKIT_VERSION; }

}  // namespace fermikit
