#pragma once

#include "potkit/errors.hpp"
#include "potkit/numerics.hpp"
#include "potkit/geom.hpp"
#include "potkit/kv.hpp"
#include "potkit/domain_io.hpp"
#include "potkit/rng.hpp"
#include "potkit/means.hpp"
#include "potkit/potential.hpp"
#include "potkit/measure_io.hpp"
#include "potkit/equilibrium.hpp"
#include "potkit/dirichlet.hpp"
#include "potkit/green.hpp"
#include "potkit/hausdorff.hpp"
