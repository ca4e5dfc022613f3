#include "freshcost/money.hpp"

#include <cmath>

#include <fmt/format.h>

namespace freshcost {

double round_half_away(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    // std::round is half away from zero.
    return std::round(value * scale) / scale;
}

std::string format_money(double value, int decimals, bool thousands) {
    double rounded = round_half_away(value, decimals);
    if (rounded == 0.0) rounded = 0.0;  // drop the sign of -0.0
    std::string text = fmt::format("{:.{}f}", rounded, decimals);
    if (!thousands) return text;

    const bool negative = !text.empty() && text.front() == '-';
    const std::size_t start = negative ? 1 : 0;
    std::size_t int_end = text.find('.');
    if (int_end == std::string::npos) int_end = text.size();
    std::string grouped;
    const std::size_t digits = int_end - start;
    for (std::size_t i = 0; i < digits; ++i) {
        if (i && (digits - i) % 3 == 0) grouped += ',';
        grouped += text[start + i];
    }
    return (negative ? "-" : "") + grouped + text.substr(int_end);
}

}  // namespace freshcost
