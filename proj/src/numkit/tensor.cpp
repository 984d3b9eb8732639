#include "dicnn/numkit/tensor.hpp"

#include <cmath>
#include <sstream>

#include "dicnn/error.hpp"

namespace dicnn::numkit {

std::string shape_string(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out << 'x';
        out << shape[i];
    }
    out << ']';
    return out.str();
}

std::size_t element_count(const Shape& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_.empty()) throw ShapeError("tensor shape must have at least one dimension");
    for (auto d : shape_) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_string(shape_));
    }
    if (element_count(shape_) != data_.size()) {
        throw ShapeError("tensor shape " + shape_string(shape_) + " needs " +
                         std::to_string(element_count(shape_)) + " elements, got " +
                         std::to_string(data_.size()));
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw NumericError("non-finite tensor element at flat index " + std::to_string(i));
        }
    }
}

Tensor Tensor::zeros(Shape shape) { return filled(std::move(shape), 0.0); }

Tensor Tensor::filled(Shape shape, double value) {
    auto n = element_count(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) throw ShapeError("from_rows needs a non-empty matrix");
    const auto cols = rows.front().size();
    std::vector<double> data;
    data.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw ShapeError("from_rows: ragged rows");
        data.insert(data.end(), r.begin(), r.end());
    }
    return Tensor({rows.size(), cols}, std::move(data));
}

std::size_t Tensor::dim(std::size_t axis) const {
    if (axis >= shape_.size()) {
        throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + shape_string(shape_));
    }
    return shape_[axis];
}

double Tensor::at(std::size_t i, std::size_t j) const {
    if (shape_.size() != 2 || i >= shape_[0] || j >= shape_[1]) {
        throw ShapeError("index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range for shape " +
                         shape_string(shape_));
    }
    return data_[i * shape_[1] + j];
}

std::span<const double> Tensor::row(std::size_t i) const {
    const auto cols = data_.size() / shape_[0];
    return std::span<const double>(data_).subspan(i * cols, cols);
}

std::span<double> Tensor::mutable_row(std::size_t i) {
    const auto cols = data_.size() / shape_[0];
    return std::span<double>(data_).subspan(i * cols, cols);
}

bool Tensor::all_finite() const noexcept {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Tensor take_rows(const Tensor& matrix, std::span<const std::size_t> rows) {
    if (matrix.rank() != 2) throw ShapeError("take_rows expects a matrix, got " + shape_string(matrix.shape()));
    const auto cols = matrix.dim(1);
    std::vector<double> out;
    out.reserve(rows.size() * cols);
    for (auto r : rows) {
        if (r >= matrix.dim(0)) throw ShapeError("take_rows: row " + std::to_string(r) + " out of range");
        auto src = matrix.row(r);
        out.insert(out.end(), src.begin(), src.end());
    }
    return Tensor({rows.size(), cols}, std::move(out));
}

}  // namespace dicnn::numkit
