// Umbrella header.
#pragma once

#include "nemdv/assets.hpp"
#include "nemdv/billing.hpp"
#include "nemdv/branch_and_bound.hpp"
#include "nemdv/calendar.hpp"
#include "nemdv/formulation.hpp"
#include "nemdv/io.hpp"
#include "nemdv/log.hpp"
#include "nemdv/milp.hpp"
#include "nemdv/policy.hpp"
#include "nemdv/scenario.hpp"
#include "nemdv/simplex.hpp"
#include "nemdv/sweep.hpp"
#include "nemdv/synthetic.hpp"
#include "nemdv/tariff.hpp"
#include "nemdv/time_series.hpp"
