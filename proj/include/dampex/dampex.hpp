#pragma once

#include "dampex/config.hpp"
#include "dampex/error.hpp"
#include "dampex/expansion.hpp"
#include "dampex/experiments.hpp"
#include "dampex/initial_data.hpp"
#include "dampex/multi_index.hpp"
#include "dampex/quadrature.hpp"
#include "dampex/quadrature_norms.hpp"
#include "dampex/spectral_solution.hpp"
