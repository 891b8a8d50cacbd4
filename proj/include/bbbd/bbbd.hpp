#pragma once

// Umbrella header for the BBBD library.

#include "bbbd/baselines.hpp"
#include "bbbd/bitmask.hpp"
#include "bbbd/box.hpp"
#include "bbbd/cocoa.hpp"
#include "bbbd/detector.hpp"
#include "bbbd/evaluation.hpp"
#include "bbbd/instance.hpp"
#include "bbbd/order_matrix.hpp"
#include "bbbd/parallel.hpp"
#include "bbbd/polygon.hpp"
#include "bbbd/prng.hpp"
#include "bbbd/reporting.hpp"
#include "bbbd/rle.hpp"
#include "bbbd/scene.hpp"
#include "bbbd/scene_io.hpp"
#include "bbbd/synth.hpp"
