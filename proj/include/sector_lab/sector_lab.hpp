#pragma once

#include "sector_lab/error.hpp"
#include "sector_lab/words.hpp"
#include "sector_lab/finite_group.hpp"
#include "sector_lab/groups.hpp"
#include "sector_lab/complex.hpp"
#include "sector_lab/builders.hpp"
#include "sector_lab/pi1.hpp"
#include "sector_lab/region.hpp"
#include "sector_lab/linalg.hpp"
#include "sector_lab/holonomy.hpp"
#include "sector_lab/scenario.hpp"
#include "sector_lab/sectors.hpp"
#include "sector_lab/characters.hpp"
#include "sector_lab/cover.hpp"
#include "sector_lab/io.hpp"
