#pragma once

#include "bgklab/bsg.hpp"
#include "bgklab/budget.hpp"
#include "bgklab/distributions.hpp"
#include "bgklab/fp_core.hpp"
#include "bgklab/numeric.hpp"
#include "bgklab/parallel.hpp"
#include "bgklab/report.hpp"
#include "bgklab/rng.hpp"
#include "bgklab/setstats.hpp"
#include "bgklab/structured.hpp"
#include "bgklab/walk.hpp"
#include "bgklab/harness.hpp"
