#ifndef COVBODY_COVBODY_HPP
#define COVBODY_COVBODY_HPP

#include "covariogram.hpp"
#include "genvol.hpp"
#include "linprog.hpp"
#include "measure.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "polytope.hpp"
#include "projection.hpp"
#include "quadrature.hpp"
#include "radialmean.hpp"
#include "report.hpp"
#include "sphere.hpp"
#include "types.hpp"
#include "verify.hpp"

#endif  // COVBODY_COVBODY_HPP
