#pragma once

#include "structseg/codec.hpp"
#include "structseg/corpus.hpp"
#include "structseg/metrics.hpp"
#include "structseg/pipeline.hpp"
#include "structseg/segmenters.hpp"
#include "structseg/text.hpp"
#include "structseg/types.hpp"
