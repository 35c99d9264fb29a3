#pragma once

#include "field.hpp"
#include "dense.hpp"
#include "pmatrix.hpp"
#include "clusters.hpp"
#include "oracle.hpp"
#include "subdiag.hpp"
#include "trim.hpp"
#include "pipeline.hpp"
#include "io.hpp"
