#include "eulerfan/core/states.hpp"

#include <algorithm>

namespace eulerfan {

FanPartition::FanPartition(std::vector<double> speeds) : speeds_(std::move(speeds)) {
    for (std::size_t k = 0; k + 1 < speeds_.size(); ++k)
        if (!(speeds_[k] < speeds_[k + 1])) throw DomainError("fan partition speeds must be strictly increasing");
    for (double s : speeds_)
        if (!std::isfinite(s)) throw DomainError("fan partition speeds must be finite");
}

std::size_t FanPartition::region(double x2, double t) const {
    if (!(t > 0.0)) throw DomainError("fan partition regions are defined for t > 0");
    const double xi = x2 / t;
    return static_cast<std::size_t>(std::upper_bound(speeds_.begin(), speeds_.end(), xi) - speeds_.begin());
}

}  // namespace eulerfan
