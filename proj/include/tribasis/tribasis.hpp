#pragma once

#include "tribasis/basis.hpp"
#include "tribasis/benchmark.hpp"
#include "tribasis/dataset_io.hpp"
#include "tribasis/errors.hpp"
#include "tribasis/features.hpp"
#include "tribasis/lse.hpp"
#include "tribasis/model_io.hpp"
#include "tribasis/random.hpp"
#include "tribasis/regress.hpp"
#include "tribasis/synth.hpp"
#include "tribasis/windowing.hpp"
