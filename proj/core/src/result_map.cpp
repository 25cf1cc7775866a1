#include "ddm/result_map.hpp"

#include "ddm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ddm {

std::int64_t ResultMap::lag_index(std::int64_t lag) const {
    const auto it = std::lower_bound(lags.begin(), lags.end(), lag);
    if (it == lags.end() || *it != lag)
        return -1;
    return it - lags.begin();
}

bool same_layout(const ResultMap& a, const ResultMap& b) {
    return a.width == b.width && a.height == b.height && a.lags == b.lags &&
           a.frame_interval == b.frame_interval;
}

double max_abs_difference(const ResultMap& a, const ResultMap& b) {
    if (!same_layout(a, b))
        throw InputError("max_abs_difference: result layouts differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

std::vector<std::int64_t> normalize_lags(std::vector<std::int64_t> lags, std::int64_t frames) {
    std::sort(lags.begin(), lags.end());
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] < 0 || lags[i] >= frames)
            throw InputError("lag " + std::to_string(lags[i]) + " outside [0, " +
                             std::to_string(frames - 1) + "]");
        if (i > 0 && lags[i] == lags[i - 1])
            throw InputError("duplicate lag " + std::to_string(lags[i]));
    }
    return lags;
}

std::vector<std::int64_t> all_lags(std::int64_t frames) {
    std::vector<std::int64_t> lags(static_cast<std::size_t>(frames));
    for (std::int64_t m = 0; m < frames; ++m)
        lags[static_cast<std::size_t>(m)] = m;
    return lags;
}

std::vector<std::int64_t> log_lags(std::int64_t frames) {
    std::vector<std::int64_t> lags;
    for (std::int64_t m = 1; m < frames; m <<= 1)
        lags.push_back(m);
    if (frames > 1 && (lags.empty() || lags.back() != frames - 1))
        lags.push_back(frames - 1);
    return lags;
}

} // namespace ddm
