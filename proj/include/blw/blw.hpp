#pragma once

// Umbrella header.

#include "blw/bench.hpp"
#include "blw/denoise.hpp"
#include "blw/dsp/cubic_spline.hpp"
#include "blw/dsp/emd.hpp"
#include "blw/dsp/fir.hpp"
#include "blw/dsp/ica.hpp"
#include "blw/dsp/iir.hpp"
#include "blw/dsp/padding.hpp"
#include "blw/dsp/wavelet.hpp"
#include "blw/dsp/window.hpp"
#include "blw/error.hpp"
#include "blw/generators.hpp"
#include "blw/ingest.hpp"
#include "blw/metrics.hpp"
#include "blw/qrs.hpp"
#include "blw/signal.hpp"
