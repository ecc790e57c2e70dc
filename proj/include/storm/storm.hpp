#pragma once

#include "storm/common.hpp"
#include "storm/core.hpp"
#include "storm/model.hpp"
#include "storm/oracle.hpp"
#include "storm/problems.hpp"
#include "storm/profile.hpp"
#include "storm/subproblem.hpp"
#include "storm/theory.hpp"
#include "storm/variants.hpp"
