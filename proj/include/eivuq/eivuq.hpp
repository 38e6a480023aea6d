#pragma once

// Umbrella header for the eivuq library: prediction-uncertainty quantification
// for binary classifiers whose inputs may carry discrete observation errors.

#include "eivuq/data.hpp"
#include "eivuq/datagen.hpp"
#include "eivuq/ensemble.hpp"
#include "eivuq/error_model.hpp"
#include "eivuq/errors.hpp"
#include "eivuq/evaluation.hpp"
#include "eivuq/io.hpp"
#include "eivuq/math.hpp"
#include "eivuq/matrix.hpp"
#include "eivuq/mc_dropout.hpp"
#include "eivuq/network.hpp"
#include "eivuq/parallel.hpp"
#include "eivuq/uncertainty.hpp"
