#pragma once

#include "cdpp/benchmark.hpp"
#include "cdpp/consensus.hpp"
#include "cdpp/csv.hpp"
#include "cdpp/data.hpp"
#include "cdpp/error.hpp"
#include "cdpp/kernel.hpp"
#include "cdpp/metrics.hpp"
#include "cdpp/parallel.hpp"
#include "cdpp/partition.hpp"
#include "cdpp/pipeline.hpp"
#include "cdpp/preprocess.hpp"
#include "cdpp/report.hpp"
#include "cdpp/rng.hpp"
#include "cdpp/sampling.hpp"
#include "cdpp/simgen.hpp"
#include "cdpp/union_find.hpp"
#include "cdpp/validation.hpp"
