#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dicnn::numkit {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);

// Dense row-major array of doubles tagged with its shape.
//
// Construction rejects NaN/Inf and any shape whose element count disagrees
// with the data. A default-constructed Tensor is the empty placeholder used
// for layers without parameters; it has rank 0 and no elements.
class Tensor {
public:
    Tensor() = default;
    Tensor(Shape shape, std::vector<double> data);

    static Tensor zeros(Shape shape);
    static Tensor filled(Shape shape, double value);
    // Build a 2-D tensor from nested rows; all rows must have equal length.
    static Tensor from_rows(const std::vector<std::vector<double>>& rows);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::span<const double> values() const noexcept { return data_; }
    // Writable view for builders and optimizers. Callers that write through it
    // are responsible for re-checking all_finite() where it matters.
    std::span<double> mutable_values() noexcept { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }
    double at(std::size_t i, std::size_t j) const;
    std::span<const double> row(std::size_t i) const;
    std::span<double> mutable_row(std::size_t i);

    bool all_finite() const noexcept;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

std::size_t element_count(const Shape& shape);

// Gather rows of a 2-D tensor in the given order.
Tensor take_rows(const Tensor& matrix, std::span<const std::size_t> rows);

}  // namespace dicnn::numkit
