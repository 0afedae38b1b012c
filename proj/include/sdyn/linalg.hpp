#pragma once

/**
 * @file linalg.hpp
 * @brief Small linear-algebra layer: square matrices in dense or sparse
 *        storage, plus reusable LU factorizations.
 *
 * Sparse systems are never inverted explicitly; every "A^{-1} x" in this
 * library is a solve against a stored factorization.
 */

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <memory>
#include <stdexcept>
#include <variant>

namespace sdyn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

enum class Storage { dense, sparse };

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Square real matrix held either densely or in compressed sparse form.
class SquareMat {
  public:
    SquareMat() = default;

    explicit SquareMat(Mat m) : rep_(std::move(m)) {
        if (dense().rows() != dense().cols())
            throw DimensionError("SquareMat: matrix must be square");
    }

    explicit SquareMat(SpMat m) : rep_(std::move(m)) {
        auto& s = std::get<SpMat>(rep_);
        if (s.rows() != s.cols())
            throw DimensionError("SquareMat: matrix must be square");
        s.makeCompressed();
    }

    static SquareMat zero(int n, Storage storage = Storage::dense) {
        if (storage == Storage::dense) return SquareMat(Mat::Zero(n, n));
        return SquareMat(SpMat(n, n));
    }

    static SquareMat identity(int n) { return SquareMat(Mat::Identity(n, n)); }

    int rows() const {
        return std::holds_alternative<Mat>(rep_)
                   ? static_cast<int>(std::get<Mat>(rep_).rows())
                   : static_cast<int>(std::get<SpMat>(rep_).rows());
    }

    Storage storage() const {
        return std::holds_alternative<Mat>(rep_) ? Storage::dense : Storage::sparse;
    }

    bool is_zero() const {
        if (storage() == Storage::dense) return std::get<Mat>(rep_).isZero(0.0);
        return std::get<SpMat>(rep_).nonZeros() == 0 ||
               Mat(std::get<SpMat>(rep_)).isZero(0.0);
    }

    /// Count of stored entries with nonzero value.
    long nonzeros() const {
        if (storage() == Storage::dense)
            return (std::get<Mat>(rep_).array() != 0.0).count();
        long nnz = 0;
        const auto& s = std::get<SpMat>(rep_);
        for (int k = 0; k < s.outerSize(); ++k)
            for (SpMat::InnerIterator it(s, k); it; ++it)
                if (it.value() != 0.0) ++nnz;
        return nnz;
    }

    Vec apply(const Vec& x) const {
        if (storage() == Storage::dense) return std::get<Mat>(rep_) * x;
        return std::get<SpMat>(rep_) * x;
    }

    Mat apply(const Mat& x) const {
        if (storage() == Storage::dense) return std::get<Mat>(rep_) * x;
        return std::get<SpMat>(rep_) * x;
    }

    /// Dense copy (materializes sparse storage).
    Mat to_dense() const {
        if (storage() == Storage::dense) return std::get<Mat>(rep_);
        return Mat(std::get<SpMat>(rep_));
    }

    const Mat& dense() const { return std::get<Mat>(rep_); }
    const SpMat& sparse() const { return std::get<SpMat>(rep_); }

  private:
    std::variant<Mat, SpMat> rep_ = Mat();
};

/// LU factorization of a SquareMat, reusable across solves. Solves are const
/// and safe to issue concurrently from multiple threads.
class LuFactor {
  public:
    LuFactor() = default;

    explicit LuFactor(const SquareMat& a, const char* what = "matrix") {
        if (a.storage() == Storage::dense) {
            auto lu = std::make_shared<Eigen::PartialPivLU<Mat>>(a.dense());
            if (!(lu->rcond() > 1e-14))
                throw SingularMatrixError(std::string(what) +
                                          ": singular or near-singular (dense LU)");
            rep_ = std::move(lu);
        } else {
            auto lu = std::make_shared<Eigen::SparseLU<SpMat>>();
            lu->compute(a.sparse());
            if (lu->info() != Eigen::Success)
                throw SingularMatrixError(std::string(what) +
                                          ": singular or near-singular (sparse LU)");
            rep_ = std::move(lu);
        }
    }

    Vec solve(const Vec& b) const {
        if (auto* d = std::get_if<DensePtr>(&rep_)) return (*d)->solve(b);
        return std::get<SparsePtr>(rep_)->solve(b);
    }

    Mat solve(const Mat& b) const {
        if (auto* d = std::get_if<DensePtr>(&rep_)) return (*d)->solve(b);
        return std::get<SparsePtr>(rep_)->solve(b);
    }

    bool valid() const {
        if (auto* d = std::get_if<DensePtr>(&rep_)) return *d != nullptr;
        return std::get<SparsePtr>(rep_) != nullptr;
    }

  private:
    using DensePtr = std::shared_ptr<Eigen::PartialPivLU<Mat>>;
    using SparsePtr = std::shared_ptr<Eigen::SparseLU<SpMat>>;
    std::variant<DensePtr, SparsePtr> rep_ = DensePtr();
};

/// Least-squares slope of log(e) against log(h); the observed order of a
/// convergence table.
double log_log_slope(const std::vector<double>& h, const std::vector<double>& e);

}  // namespace sdyn
