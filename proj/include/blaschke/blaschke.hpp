#pragma once

#include "blaschke/compose.hpp"
#include "blaschke/factorize.hpp"
#include "blaschke/io.hpp"
#include "blaschke/monodromy.hpp"
#include "blaschke/permutation.hpp"
#include "blaschke/poly.hpp"
#include "blaschke/polyroots.hpp"
#include "blaschke/product.hpp"
#include "blaschke/report.hpp"
#include "blaschke/types.hpp"
