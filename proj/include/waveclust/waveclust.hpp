#pragma once

#include "waveclust/baselines.hpp"
#include "waveclust/bench.hpp"
#include "waveclust/convergence.hpp"
#include "waveclust/denoise.hpp"
#include "waveclust/eval.hpp"
#include "waveclust/graph.hpp"
#include "waveclust/kmeans.hpp"
#include "waveclust/pipeline.hpp"
#include "waveclust/prox.hpp"
#include "waveclust/solve.hpp"
#include "waveclust/wavelet.hpp"
