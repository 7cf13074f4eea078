#pragma once

// Umbrella header for the row-action solver library.

#include "kaczmarz/blur.hpp"
#include "kaczmarz/bounds.hpp"
#include "kaczmarz/dense_matrix.hpp"
#include "kaczmarz/experiment.hpp"
#include "kaczmarz/image.hpp"
#include "kaczmarz/matrix_market.hpp"
#include "kaczmarz/ppm_io.hpp"
#include "kaczmarz/problem.hpp"
#include "kaczmarz/qr.hpp"
#include "kaczmarz/random_problem.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/row_action.hpp"
#include "kaczmarz/selection.hpp"
#include "kaczmarz/solve.hpp"
#include "kaczmarz/solver_config.hpp"
#include "kaczmarz/sparse_matrix.hpp"
#include "kaczmarz/spectral.hpp"
#include "kaczmarz/svd.hpp"
#include "kaczmarz/sweep_operator.hpp"
#include "kaczmarz/trace_csv.hpp"
#include "kaczmarz/transforms.hpp"
