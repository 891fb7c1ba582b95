#pragma once

#include "msq/core.hpp"
#include "msq/dataset.hpp"
#include "msq/enumerate.hpp"
#include "msq/error.hpp"
#include "msq/io.hpp"
#include "msq/parity.hpp"
#include "msq/reference.hpp"
#include "msq/render.hpp"
#include "msq/report.hpp"
#include "msq/stats.hpp"
