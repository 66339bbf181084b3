#pragma once

#include "oclmine/bench.hpp"
#include "oclmine/concur.hpp"
#include "oclmine/datagen.hpp"
#include "oclmine/dataset.hpp"
#include "oclmine/dbscan.hpp"
#include "oclmine/errors.hpp"
#include "oclmine/gpubackend.hpp"
#include "oclmine/kmeans.hpp"
#include "oclmine/oclloader.hpp"
#include "oclmine/parbackend.hpp"
#include "oclmine/point_state.hpp"
#include "oclmine/random.hpp"
#include "oclmine/timing.hpp"
