#pragma once

#include "radonkit/admm.hpp"
#include "radonkit/errors.hpp"
#include "radonkit/geometry.hpp"
#include "radonkit/half.hpp"
#include "radonkit/linop.hpp"
#include "radonkit/npy.hpp"
#include "radonkit/phantom.hpp"
#include "radonkit/png_io.hpp"
#include "radonkit/projector.hpp"
#include "radonkit/rng.hpp"
#include "radonkit/shearlet.hpp"
#include "radonkit/sino_filter.hpp"
#include "radonkit/solvers.hpp"
#include "radonkit/tensor.hpp"
#include "radonkit/threading.hpp"
#include "radonkit/version.hpp"
