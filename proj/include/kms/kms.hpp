#pragma once

#include "kms/asymptotics.hpp"
#include "kms/config.hpp"
#include "kms/error.hpp"
#include "kms/experiment.hpp"
#include "kms/expr.hpp"
#include "kms/linalg.hpp"
#include "kms/matgen.hpp"
#include "kms/matrix.hpp"
#include "kms/numeric.hpp"
#include "kms/presets.hpp"
#include "kms/region.hpp"
#include "kms/spectra.hpp"
#include "kms/symbol.hpp"
#include "kms/szego.hpp"
#include "kms/test_function.hpp"
#include "kms/toml.hpp"
