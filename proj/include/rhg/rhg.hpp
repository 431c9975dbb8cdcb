#ifndef RHG_RHG_HPP
#define RHG_RHG_HPP

#include "elliptic.hpp"
#include "green.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "mesh.hpp"
#include "pipeline.hpp"
#include "quadrature.hpp"
#include "theta.hpp"
#include "verify.hpp"
#include "zeta.hpp"

#endif
