#pragma once

// Convenience header pulling in the whole library.

#include "attrib/attribution/export.hpp"
#include "attrib/attribution/methods.hpp"
#include "attrib/core/csv.hpp"
#include "attrib/core/rng.hpp"
#include "attrib/core/types.hpp"
#include "attrib/dgp/dataset_io.hpp"
#include "attrib/dgp/generate.hpp"
#include "attrib/experiment/config.hpp"
#include "attrib/experiment/ingest.hpp"
#include "attrib/experiment/report.hpp"
#include "attrib/experiment/studies.hpp"
#include "attrib/metrics/aggregate.hpp"
#include "attrib/metrics/comparison.hpp"
#include "attrib/metrics/fit.hpp"
#include "attrib/metrics/ranking.hpp"
#include "attrib/nn/model_io.hpp"
#include "attrib/nn/network.hpp"
#include "attrib/nn/train.hpp"
#include "attrib/preprocess/pipeline.hpp"
