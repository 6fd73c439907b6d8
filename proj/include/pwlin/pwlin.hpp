#pragma once

#include "errors.hpp"
#include "core_map.hpp"
#include "circle_map.hpp"
#include "sector.hpp"
#include "return_map.hpp"
#include "conic.hpp"
#include "circle_builder.hpp"
#include "families.hpp"
#include "scanner.hpp"
#include "io.hpp"
