#pragma once

#include <string>

namespace freshcost {

/// Rounds half away from zero at `decimals` places (499.75 -> 499.8 at 1).
double round_half_away(double value, int decimals);

/// Currency display: rounded half away from zero, optional thousands
/// separators ("4,998" for 4997.5 at 0 decimals).
std::string format_money(double value, int decimals = 1, bool thousands = false);

}  // namespace freshcost
