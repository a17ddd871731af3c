#include "hybridcover/sample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hybridcover/error.hpp"

namespace hc {

CovariateSample::CovariateSample(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw DimensionError("covariate dimension must be positive");
}

CovariateSample::CovariateSample(std::size_t dim, std::vector<double> row_major)
    : dim_(dim), data_(std::move(row_major)) {
    if (dim == 0) throw DimensionError("covariate dimension must be positive");
    if (data_.size() % dim != 0)
        throw DimensionError("covariate buffer of " + std::to_string(data_.size()) +
                             " values is not a multiple of dimension " + std::to_string(dim));
}

void CovariateSample::push_back(std::span<const double> w) {
    if (w.size() != dim_)
        throw DimensionError("covariate row of length " + std::to_string(w.size()) +
                             ", expected " + std::to_string(dim_));
    data_.insert(data_.end(), w.begin(), w.end());
}

CovariateSample CovariateSample::head(std::size_t n) const {
    n = std::min(n, rows());
    return CovariateSample(dim_, std::vector<double>(data_.begin(), data_.begin() + n * dim_));
}

LossSample::LossSample(std::vector<double> losses, CovariateSample covariates)
    : losses_(std::move(losses)), covariates_(std::move(covariates)) {
    if (losses_.size() != covariates_.rows())
        throw DimensionError("loss count " + std::to_string(losses_.size()) +
                             " does not match covariate rows " +
                             std::to_string(covariates_.rows()));
    for (std::size_t i = 0; i < losses_.size(); ++i) {
        if (!std::isfinite(losses_[i]) || losses_[i] < 0.0)
            throw DataError("loss at row " + std::to_string(i) + " is negative or not finite");
    }
}

void LossSample::push_back(double y, std::span<const double> w) {
    if (!std::isfinite(y) || y < 0.0) throw DataError("loss must be finite and nonnegative");
    covariates_.push_back(w);
    losses_.push_back(y);
}

LossSample LossSample::head(std::size_t n) const {
    n = std::min(n, rows());
    return LossSample(std::vector<double>(losses_.begin(), losses_.begin() + n),
                      covariates_.head(n));
}

}  // namespace hc
