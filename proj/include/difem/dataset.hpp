#pragma once

#include "difem/pose.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace difem {

// Labelled feature rows of a fixed dimension, stored row-major.
class Dataset {
public:
    explicit Dataset(std::size_t dimension = 0) : dimension_(dimension) {}

    // Throws DimensionError when row.size() != dimension().
    void add(std::span<const double> row, Label label);

    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }
    std::size_t dimension() const noexcept { return dimension_; }

    std::span<const double> row(std::size_t i) const noexcept
    {
        return {values_.data() + i * dimension_, dimension_};
    }
    double value(std::size_t i, std::size_t feature) const noexcept
    {
        return values_[i * dimension_ + feature];
    }
    Label label(std::size_t i) const noexcept { return labels_[i]; }
    const std::vector<Label>& labels() const noexcept { return labels_; }

    std::array<std::size_t, 2> class_counts() const noexcept;
    Dataset subset(std::span<const std::size_t> indices) const;

private:
    std::size_t dimension_;
    std::vector<double> values_;
    std::vector<Label> labels_;
};

} // namespace difem
