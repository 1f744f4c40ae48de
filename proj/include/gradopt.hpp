#pragma once

#include "gradopt/baselines.hpp"
#include "gradopt/benchmarks.hpp"
#include "gradopt/campaign.hpp"
#include "gradopt/config.hpp"
#include "gradopt/errors.hpp"
#include "gradopt/graduated.hpp"
#include "gradopt/optimizers.hpp"
#include "gradopt/random.hpp"
#include "gradopt/schedules.hpp"
#include "gradopt/smoothing.hpp"
#include "gradopt/synthetic.hpp"
