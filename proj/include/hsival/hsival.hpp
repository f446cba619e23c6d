#pragma once

#include "hsival/classifiers.hpp"
#include "hsival/core.hpp"
#include "hsival/error.hpp"
#include "hsival/evaluation.hpp"
#include "hsival/features.hpp"
#include "hsival/leakage.hpp"
#include "hsival/manifest.hpp"
#include "hsival/metrics.hpp"
#include "hsival/npy.hpp"
#include "hsival/ppm.hpp"
#include "hsival/presets.hpp"
#include "hsival/random.hpp"
#include "hsival/report_io.hpp"
#include "hsival/split_patch.hpp"
#include "hsival/split_random.hpp"
#include "hsival/splits.hpp"
#include "hsival/synth.hpp"
#include "hsival/visibility.hpp"
#include "hsival/wilcoxon.hpp"
