#pragma once

#include <json.hpp>

namespace mehc::detail {

/// Number rounded to 12 significant digits; +inf as "inf", NaN as null.
nlohmann::json rounded_number(double value);

} // namespace mehc::detail
