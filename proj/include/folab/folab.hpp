#pragma once

#include "folab/expr.hpp"
#include "folab/grid.hpp"
#include "folab/nfunc.hpp"
#include "folab/nfunction.hpp"
#include "folab/numerics.hpp"
#include "folab/operator.hpp"
#include "folab/pair_kernel.hpp"
#include "folab/sobolev.hpp"
#include "folab/variational.hpp"
