#pragma once

// Umbrella header for the synthetic tabular data audit engine.

#include "synthaudit/binning.hpp"
#include "synthaudit/chisquare.hpp"
#include "synthaudit/copula.hpp"
#include "synthaudit/dataset.hpp"
#include "synthaudit/distribution.hpp"
#include "synthaudit/encoding.hpp"
#include "synthaudit/errors.hpp"
#include "synthaudit/general.hpp"
#include "synthaudit/ml/forest.hpp"
#include "synthaudit/ml/gbm.hpp"
#include "synthaudit/ml/metrics.hpp"
#include "synthaudit/ml/net.hpp"
#include "synthaudit/ml/tree.hpp"
#include "synthaudit/mmd.hpp"
#include "synthaudit/privacy.hpp"
#include "synthaudit/report.hpp"
#include "synthaudit/rng.hpp"
#include "synthaudit/special.hpp"
#include "synthaudit/stats.hpp"
#include "synthaudit/suite.hpp"
#include "synthaudit/testresult.hpp"
#include "synthaudit/utility.hpp"
