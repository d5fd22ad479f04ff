#include "difem/dataset.hpp"

#include "difem/errors.hpp"

namespace difem {

void Dataset::add(std::span<const double> row, Label label)
{
    if (row.size() != dimension_) {
        throw DimensionError(dimension_, row.size());
    }
    values_.insert(values_.end(), row.begin(), row.end());
    labels_.push_back(label);
}

std::array<std::size_t, 2> Dataset::class_counts() const noexcept
{
    std::array<std::size_t, 2> counts{};
    for (Label label : labels_) {
        ++counts[label_index(label)];
    }
    return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const
{
    Dataset out(dimension_);
    out.values_.reserve(indices.size() * dimension_);
    out.labels_.reserve(indices.size());
    for (std::size_t i : indices) {
        out.add(row(i), labels_[i]);
    }
    return out;
}

} // namespace difem
