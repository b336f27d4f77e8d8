#pragma once

#include "concord/coassociation.hpp"
#include "concord/coding.hpp"
#include "concord/cor.hpp"
#include "concord/errors.hpp"
#include "concord/generate.hpp"
#include "concord/graph.hpp"
#include "concord/iec.hpp"
#include "concord/io.hpp"
#include "concord/kcc.hpp"
#include "concord/kmeans.hpp"
#include "concord/matrix.hpp"
#include "concord/metrics.hpp"
#include "concord/outcome.hpp"
#include "concord/parallel.hpp"
#include "concord/partition.hpp"
#include "concord/rng.hpp"
#include "concord/sec.hpp"
