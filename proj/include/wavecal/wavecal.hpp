// Umbrella header.
#pragma once

#include <wavecal/error.hpp>
#include <wavecal/estimator.hpp>
#include <wavecal/implied.hpp>
#include <wavecal/io.hpp>
#include <wavecal/model.hpp>
#include <wavecal/optimize.hpp>
#include <wavecal/parallel.hpp>
#include <wavecal/rng.hpp>
#include <wavecal/selection.hpp>
#include <wavecal/serialize.hpp>
#include <wavecal/simulate.hpp>
#include <wavecal/svg.hpp>
#include <wavecal/wavelet.hpp>
#include <wavecal/wvar.hpp>
