#pragma once

#include "ultrametric/address.hpp"
#include "ultrametric/changevar.hpp"
#include "ultrametric/csv.hpp"
#include "ultrametric/metric.hpp"
#include "ultrametric/operator.hpp"
#include "ultrametric/rational.hpp"
#include "ultrametric/tree.hpp"
#include "ultrametric/tree_io.hpp"
#include "ultrametric/wavelet.hpp"
