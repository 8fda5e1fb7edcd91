#pragma once

#include "bivarfun/error.hpp"
#include "bivarfun/matrix.hpp"
#include "bivarfun/rng.hpp"
#include "bivarfun/mp/mpreal.hpp"
#include "bivarfun/mp/mpmatrix.hpp"
#include "bivarfun/dense/schur.hpp"
#include "bivarfun/dense/reorder.hpp"
#include "bivarfun/dense/linalg.hpp"
#include "bivarfun/dense/sylvester.hpp"
#include "bivarfun/dense/norms.hpp"
#include "bivarfun/io/cmx.hpp"
#include "bivarfun/blocking.hpp"
#include "bivarfun/function.hpp"
#include "bivarfun/functions.hpp"
#include "bivarfun/atom/taylor.hpp"
#include "bivarfun/atom/perturb_diag.hpp"
#include "bivarfun/atom/real2x2.hpp"
#include "bivarfun/fun2m.hpp"
