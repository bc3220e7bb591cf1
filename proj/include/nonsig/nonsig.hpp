#pragma once

#include "nonsig/curve_table.hpp"
#include "nonsig/errors.hpp"
#include "nonsig/figures.hpp"
#include "nonsig/general_model.hpp"
#include "nonsig/interval_null.hpp"
#include "nonsig/mc_oracle.hpp"
#include "nonsig/normal_model.hpp"
#include "nonsig/numerics.hpp"
#include "nonsig/verify.hpp"
