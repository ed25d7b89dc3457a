#pragma once

#include "invopt/cardinality.hpp"
#include "invopt/diagnose.hpp"
#include "invopt/dispatch.hpp"
#include "invopt/fixtures.hpp"
#include "invopt/geometry.hpp"
#include "invopt/interval.hpp"
#include "invopt/io.hpp"
#include "invopt/lp.hpp"
#include "invopt/model.hpp"
#include "invopt/nominal.hpp"
#include "invopt/regions.hpp"
#include "invopt/verify.hpp"
