#pragma once

#include "ddgpnp/basis.hpp"
#include "ddgpnp/benchmarks.hpp"
#include "ddgpnp/cfl.hpp"
#include "ddgpnp/commands.hpp"
#include "ddgpnp/config.hpp"
#include "ddgpnp/csv.hpp"
#include "ddgpnp/diagnostics.hpp"
#include "ddgpnp/driver.hpp"
#include "ddgpnp/errors.hpp"
#include "ddgpnp/field.hpp"
#include "ddgpnp/flux.hpp"
#include "ddgpnp/limiter.hpp"
#include "ddgpnp/mesh.hpp"
#include "ddgpnp/poisson.hpp"
#include "ddgpnp/problem.hpp"
#include "ddgpnp/quadrature.hpp"
#include "ddgpnp/space.hpp"
#include "ddgpnp/test_set.hpp"
#include "ddgpnp/transport.hpp"
#include "ddgpnp/weight.hpp"
