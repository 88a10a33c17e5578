#pragma once

#include "cueboot/bootstrap.hpp"
#include "cueboot/chunker.hpp"
#include "cueboot/corpus.hpp"
#include "cueboot/error.hpp"
#include "cueboot/hp_classifier.hpp"
#include "cueboot/indicators.hpp"
#include "cueboot/io.hpp"
#include "cueboot/patterns.hpp"
#include "cueboot/pos_tagger.hpp"
#include "cueboot/rng.hpp"
#include "cueboot/text.hpp"
