#pragma once

#include "access_trace.hpp"
#include "alphabet.hpp"
#include "bwt.hpp"
#include "error.hpp"
#include "layout.hpp"
#include "rank_tables.hpp"
#include "search.hpp"
