#pragma once

#include "hawkes_vb/adaptive.hpp"
#include "hawkes_vb/core.hpp"
#include "hawkes_vb/error.hpp"
#include "hawkes_vb/features.hpp"
#include "hawkes_vb/gibbs.hpp"
#include "hawkes_vb/metrics.hpp"
#include "hawkes_vb/model.hpp"
#include "hawkes_vb/parallel.hpp"
#include "hawkes_vb/pg.hpp"
#include "hawkes_vb/simulate.hpp"
#include "hawkes_vb/vi.hpp"
