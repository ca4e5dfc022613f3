#pragma once

#include "freshcost/cost_model.hpp"
#include "freshcost/dataset_eda.hpp"
#include "freshcost/errors.hpp"
#include "freshcost/evaluation.hpp"
#include "freshcost/matrix.hpp"
#include "freshcost/money.hpp"
#include "freshcost/prediction_io.hpp"
#include "freshcost/simulator.hpp"
