#pragma once

#include "ultrabase/basis.hpp"
#include "ultrabase/core.hpp"
#include "ultrabase/decimal.hpp"
#include "ultrabase/error.hpp"
#include "ultrabase/ingest.hpp"
#include "ultrabase/oracle.hpp"
#include "ultrabase/partner.hpp"
#include "ultrabase/reconstruct.hpp"
