#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hvs/active_learner.hpp"
#include "hvs/error.hpp"

namespace hvs::learn {

InputGrid::InputGrid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw InputError("InputGrid: at least one dimension is required");
    size_ = 1;
    for (std::size_t d = 0; d < axes_.size(); ++d) {
        const auto& a = axes_[d];
        if (a.size() < 2) throw InputError(fmt::format("InputGrid: dimension {} needs >= 2 values", d));
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!std::isfinite(a[i])) throw InputError(fmt::format("InputGrid: dimension {} has a non-finite value", d));
            if (i > 0 && !(a[i] > a[i - 1]))
                throw InputError(fmt::format("InputGrid: dimension {} must be strictly increasing", d));
        }
        size_ *= a.size();
    }
    if (size_ < 4) throw InputError(fmt::format("InputGrid: total size {} is below 4", size_));
    strides_.assign(axes_.size(), 1);
    for (std::size_t d = axes_.size() - 1; d > 0; --d) strides_[d - 1] = strides_[d] * axes_[d].size();
}

std::vector<double> InputGrid::linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw InputError("linspace: need at least 2 points");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = hi;
    return v;
}

std::vector<std::size_t> InputGrid::unravel(std::size_t index) const {
    if (index >= size_) throw InputError(fmt::format("InputGrid: index {} out of range", index));
    std::vector<std::size_t> m(axes_.size());
    for (std::size_t d = 0; d < axes_.size(); ++d) {
        m[d] = index / strides_[d];
        index %= strides_[d];
    }
    return m;
}

std::size_t InputGrid::ravel(std::span<const std::size_t> multi_index) const {
    if (multi_index.size() != axes_.size()) throw InputError("InputGrid: multi-index dimension mismatch");
    std::size_t idx = 0;
    for (std::size_t d = 0; d < axes_.size(); ++d) {
        if (multi_index[d] >= axes_[d].size()) throw InputError("InputGrid: multi-index out of range");
        idx += multi_index[d] * strides_[d];
    }
    return idx;
}

std::vector<double> InputGrid::point(std::size_t index) const {
    const auto m = unravel(index);
    std::vector<double> p(axes_.size());
    for (std::size_t d = 0; d < axes_.size(); ++d) p[d] = axes_[d][m[d]];
    return p;
}

std::size_t InputGrid::nearest_index(std::span<const double> values) const {
    if (values.size() != axes_.size())
        throw InputError(fmt::format("InputGrid: point has {} dims, grid has {}", values.size(), axes_.size()));
    std::size_t idx = 0;
    for (std::size_t d = 0; d < axes_.size(); ++d) {
        const auto& a = axes_[d];
        auto it = std::lower_bound(a.begin(), a.end(), values[d]);
        std::size_t k;
        if (it == a.begin())
            k = 0;
        else if (it == a.end())
            k = a.size() - 1;
        else {
            k = static_cast<std::size_t>(it - a.begin());
            if (values[d] - a[k - 1] <= a[k] - values[d]) --k;
        }
        idx += k * strides_[d];
    }
    return idx;
}

std::optional<std::size_t> InputGrid::find(std::span<const double> values, double tol) const {
    const std::size_t idx = nearest_index(values);
    const auto p = point(idx);
    for (std::size_t d = 0; d < p.size(); ++d)
        if (std::abs(p[d] - values[d]) > tol) return std::nullopt;
    return idx;
}

gp::Matrix InputGrid::points() const {
    gp::Matrix m(static_cast<Eigen::Index>(size_), static_cast<Eigen::Index>(axes_.size()));
    std::vector<std::size_t> mi(axes_.size(), 0);
    for (std::size_t i = 0; i < size_; ++i) {
        for (std::size_t d = 0; d < axes_.size(); ++d)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = axes_[d][mi[d]];
        for (std::size_t d = axes_.size(); d-- > 0;) {
            if (++mi[d] < axes_[d].size()) break;
            mi[d] = 0;
        }
    }
    return m;
}

gp::Standardizer InputGrid::standardizer() const {
    std::vector<double> mean, scale;
    for (const auto& a : axes_) {
        double m = 0.0;
        for (double v : a) m += v;
        m /= static_cast<double>(a.size());
        double var = 0.0;
        for (double v : a) var += (v - m) * (v - m);
        var /= static_cast<double>(a.size());
        mean.push_back(m);
        scale.push_back(std::sqrt(var));
    }
    return gp::Standardizer(std::move(mean), std::move(scale));
}

}  // namespace hvs::learn
