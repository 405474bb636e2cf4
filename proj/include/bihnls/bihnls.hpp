#ifndef BIHNLS_BIHNLS_HPP
#define BIHNLS_BIHNLS_HPP

// Umbrella header pulling in the whole library.

#include "bihnls/asymptotics.hpp"
#include "bihnls/bessel.hpp"
#include "bihnls/energy.hpp"
#include "bihnls/fft.hpp"
#include "bihnls/field.hpp"
#include "bihnls/field_io.hpp"
#include "bihnls/grid.hpp"
#include "bihnls/optimizer.hpp"
#include "bihnls/quadrature.hpp"
#include "bihnls/spectral.hpp"
#include "bihnls/summation.hpp"
#include "bihnls/symbol.hpp"
#include "bihnls/trialfields.hpp"
#include "bihnls/version.hpp"

#endif
