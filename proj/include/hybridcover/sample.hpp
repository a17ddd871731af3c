#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hc {

// Row-major matrix of covariate vectors, all of the same length.
class CovariateSample {
public:
    explicit CovariateSample(std::size_t dim = 1);
    CovariateSample(std::size_t dim, std::vector<double> row_major);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t rows() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
    bool empty() const noexcept { return data_.empty(); }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }
    std::span<const double> data() const noexcept { return data_; }

    void push_back(std::span<const double> w);
    CovariateSample head(std::size_t n) const;

private:
    std::size_t dim_;
    std::vector<double> data_;
};

// Paired (loss, covariate) observations. Losses are finite and nonnegative.
class LossSample {
public:
    explicit LossSample(std::size_t dim = 1) : covariates_(dim) {}
    LossSample(std::vector<double> losses, CovariateSample covariates);

    std::size_t rows() const noexcept { return losses_.size(); }
    std::size_t dim() const noexcept { return covariates_.dim(); }
    bool empty() const noexcept { return losses_.empty(); }

    double y(std::size_t i) const { return losses_[i]; }
    std::span<const double> w(std::size_t i) const { return covariates_.row(i); }
    std::span<const double> losses() const noexcept { return losses_; }
    const CovariateSample& covariates() const noexcept { return covariates_; }

    void push_back(double y, std::span<const double> w);
    // The first n rows, in order.
    LossSample head(std::size_t n) const;

private:
    std::vector<double> losses_;
    CovariateSample covariates_;
};

}  // namespace hc
