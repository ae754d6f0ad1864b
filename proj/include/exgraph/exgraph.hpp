#pragma once

#include "exgraph/text.hpp"
#include "exgraph/rng.hpp"
#include "exgraph/graph.hpp"
#include "exgraph/structure.hpp"
#include "exgraph/codec.hpp"
#include "exgraph/lexicon.hpp"
#include "exgraph/perturb.hpp"
#include "exgraph/matching.hpp"
#include "exgraph/ged.hpp"
#include "exgraph/metrics.hpp"
#include "exgraph/losses.hpp"
#include "exgraph/negfilter.hpp"
#include "exgraph/oracle_http.hpp"
#include "exgraph/config.hpp"
#include "exgraph/dataset.hpp"
#include "exgraph/pipeline.hpp"
