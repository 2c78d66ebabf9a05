#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace hvs::gp {

using Matrix = Eigen::MatrixXd;  // rows are points
using Vector = Eigen::VectorXd;

/// Per-dimension affine map to zero mean / unit variance.
class Standardizer {
public:
    Standardizer() = default;
    Standardizer(std::vector<double> mean, std::vector<double> scale);

    /// Column statistics of `data` (population variance). Constant columns get
    /// scale 1 and are reported through clamped_dims() and a log warning.
    static Standardizer fit(const Matrix& data);
    static Standardizer fit(std::span<const double> values);

    std::size_t dims() const { return mean_.size(); }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& scale() const { return scale_; }
    const std::vector<std::size_t>& clamped_dims() const { return clamped_; }

    Matrix transform(const Matrix& data) const;
    Matrix inverse_transform(const Matrix& data) const;
    double transform(double value, std::size_t dim = 0) const { return (value - mean_[dim]) / scale_[dim]; }
    double inverse_transform(double value, std::size_t dim = 0) const { return value * scale_[dim] + mean_[dim]; }

private:
    std::vector<double> mean_;
    std::vector<double> scale_;
    std::vector<std::size_t> clamped_;
};

/// exp(-0.5 * sum_i ((a_i - b_i) / l_i)^2), unit signal variance.
class RbfKernel {
public:
    RbfKernel() = default;
    explicit RbfKernel(std::vector<double> lengthscales);
    static RbfKernel isotropic(std::size_t dims, double lengthscale);

    std::size_t dims() const { return inv_sq_.size(); }
    const std::vector<double>& lengthscales() const { return lengthscales_; }

    template <typename A, typename B>
    double operator()(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            const double d = a(i) - b(i);
            s += d * d * inv_sq_[static_cast<std::size_t>(i)];
        }
        return std::exp(-0.5 * s);
    }

    /// Gram matrix between the rows of a and the rows of b.
    Matrix gram(const Matrix& a, const Matrix& b) const;

private:
    std::vector<double> lengthscales_;
    std::vector<double> inv_sq_;
};

struct LengthscalePolicy {
    enum class Kind { fixed, marginal_likelihood };
    Kind kind = Kind::fixed;
    double value = 1.0;  ///< isotropic lengthscale in standardized units
    std::vector<double> candidates{0.3, 0.5, 1.0, 2.0, 4.0};
};

struct FitOptions {
    LengthscalePolicy lengthscale;
    double jitter = 1e-8;
    double max_jitter = 1e-4;
    /// When set, inputs are mapped with this instead of the training-set
    /// statistics (the active learner passes grid-wide statistics so that
    /// posterior variances stay comparable between refits).
    std::optional<Standardizer> input_scaling;
};

struct Prediction {
    double mean = 0.0;  ///< output units when de-standardized, else standardized
    double std = 0.0;   ///< always standardized, in [0, 1]
};

/// Noise-free GP regressor over standardized inputs and outputs.
class GpModel {
public:
    /// Throws InputError on empty/mismatched data, InconsistentDataError on
    /// duplicate inputs with different outputs, SingularKernelError when the
    /// Cholesky factorization fails even at max_jitter.
    static GpModel fit(const Matrix& inputs, std::span<const double> outputs, const FitOptions& options = {});

    std::vector<Prediction> predict(const Matrix& queries, bool destandardize = true) const;
    Prediction predict_one(std::span<const double> query, bool destandardize = true) const;
    /// Mean only (output units); O(n) per query instead of O(n^2).
    std::vector<double> predict_mean(const Matrix& queries) const;

    std::size_t size() const { return static_cast<std::size_t>(x_.rows()); }
    std::size_t dims() const { return static_cast<std::size_t>(x_.cols()); }
    const Matrix& training_inputs() const { return x_; }  ///< standardized
    const Vector& training_targets() const { return y_; }  ///< standardized
    const Vector& weights() const { return w_; }
    const Matrix& cholesky_factor() const { return l_; }  ///< lower triangle of K + jitter I
    const RbfKernel& kernel() const { return kernel_; }
    double jitter() const { return jitter_; }
    const Standardizer& input_scaler() const { return in_; }
    const Standardizer& output_scaler() const { return out_; }
    double log_marginal_likelihood() const { return lml_; }

private:
    Prediction predict_standardized(const Eigen::Ref<const Vector>& xs) const;

    Matrix x_;
    Vector y_;
    Vector w_;
    Matrix l_;
    RbfKernel kernel_;
    double jitter_ = 0.0;
    Standardizer in_;
    Standardizer out_;
    double lml_ = 0.0;
};

/// Posterior variance over a fixed candidate set, updated one training point
/// at a time by extending the Cholesky factor with a new row. Each update
/// costs O(candidates * n) instead of a full refactorization; the variances
/// do not depend on the outputs, so output re-standardization never
/// invalidates them.
class PosteriorVarianceTracker {
public:
    PosteriorVarianceTracker(Matrix candidates, RbfKernel kernel, double jitter);

    /// Conditions on candidate `index`. Returns false (state unchanged) when
    /// the new Cholesky pivot is not positive at the current jitter.
    bool add(std::size_t index);

    std::size_t candidates() const { return static_cast<std::size_t>(x_.rows()); }
    std::size_t training_size() const { return order_.size(); }
    const std::vector<std::size_t>& training_indices() const { return order_; }
    double jitter() const { return jitter_; }
    double variance(std::size_t index) const { return std::max(var_[static_cast<Eigen::Index>(index)], 0.0); }
    double std_dev(std::size_t index) const { return std::sqrt(variance(index)); }
    const Vector& raw_variances() const { return var_; }

private:
    Matrix x_;
    RbfKernel kernel_;
    double jitter_;
    Matrix v_;  ///< column j = L^{-1}-projection coefficients for training point j
    Vector var_;
    std::vector<std::size_t> order_;
};

}  // namespace hvs::gp
