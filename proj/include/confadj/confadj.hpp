#pragma once

#include "confadj/design.hpp"
#include "confadj/dist.hpp"
#include "confadj/effects.hpp"
#include "confadj/error.hpp"
#include "confadj/experiment.hpp"
#include "confadj/factor.hpp"
#include "confadj/fdr.hpp"
#include "confadj/numeric.hpp"
#include "confadj/omega.hpp"
#include "confadj/parallel.hpp"
#include "confadj/pipeline.hpp"
#include "confadj/rng.hpp"
#include "confadj/serialize.hpp"
#include "confadj/simulate.hpp"
#include "confadj/table.hpp"
#include "confadj/validate.hpp"
#include "confadj/version.hpp"
