#include "hvs/gp.hpp"

#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Cholesky>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "hvs/error.hpp"

namespace hvs::gp {

namespace {

constexpr double kVarianceCeilingSlack = 1e-6;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double column_scale(double variance) { return std::sqrt(std::max(variance, 0.0)); }

}  // namespace

// ---------------------------------------------------------------------------
// Standardizer

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
    if (mean_.size() != scale_.size()) throw InputError("Standardizer: mean and scale differ in length");
    for (double s : scale_)
        if (!(s > 0.0) || !std::isfinite(s)) throw InputError("Standardizer: scale must be > 0");
}

Standardizer Standardizer::fit(const Matrix& data) {
    if (data.rows() == 0) throw InputError("Standardizer: no rows");
    Standardizer s;
    const auto n = static_cast<double>(data.rows());
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
        const double mean = data.col(c).sum() / n;
        const double var = (data.col(c).array() - mean).square().sum() / n;
        double scale = column_scale(var);
        // Relative test so that large-offset constant columns are caught too.
        if (!(scale > 1e-12 * std::max(1.0, std::abs(mean)))) {
            spdlog::warn("standardize: dimension {} is constant ({}), scale clamped to 1", c, mean);
            s.clamped_.push_back(static_cast<std::size_t>(c));
            scale = 1.0;
        }
        s.mean_.push_back(mean);
        s.scale_.push_back(scale);
    }
    return s;
}

Standardizer Standardizer::fit(std::span<const double> values) {
    Matrix m(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = values[i];
    return fit(m);
}

Matrix Standardizer::transform(const Matrix& data) const {
    if (static_cast<std::size_t>(data.cols()) != dims()) throw InputError("Standardizer: dimension mismatch");
    Matrix out(data.rows(), data.cols());
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
        const auto k = static_cast<std::size_t>(c);
        out.col(c) = (data.col(c).array() - mean_[k]) / scale_[k];
    }
    return out;
}

Matrix Standardizer::inverse_transform(const Matrix& data) const {
    if (static_cast<std::size_t>(data.cols()) != dims()) throw InputError("Standardizer: dimension mismatch");
    Matrix out(data.rows(), data.cols());
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
        const auto k = static_cast<std::size_t>(c);
        out.col(c) = data.col(c).array() * scale_[k] + mean_[k];
    }
    return out;
}

// ---------------------------------------------------------------------------
// RbfKernel

RbfKernel::RbfKernel(std::vector<double> lengthscales) : lengthscales_(std::move(lengthscales)) {
    for (double l : lengthscales_) {
        if (!(l > 0.0) || !std::isfinite(l)) throw InputError("RbfKernel: lengthscale must be > 0");
        inv_sq_.push_back(1.0 / (l * l));
    }
}

RbfKernel RbfKernel::isotropic(std::size_t dims, double lengthscale) {
    return RbfKernel(std::vector<double>(dims, lengthscale));
}

Matrix RbfKernel::gram(const Matrix& a, const Matrix& b) const {
    Matrix k(a.rows(), b.rows());
    for (Eigen::Index j = 0; j < b.rows(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) k(i, j) = (*this)(a.row(i), b.row(j));
    return k;
}

// ---------------------------------------------------------------------------
// GpModel

namespace {

struct Factorization {
    Matrix l;
    Vector w;
    double jitter = 0.0;
    double lml = 0.0;
};

Factorization factorize(const Matrix& x, const Vector& y, const RbfKernel& kernel, double jitter,
                        double max_jitter) {
    const Matrix k = kernel.gram(x, x);
    const Eigen::Index n = x.rows();
    for (double j = jitter; j <= max_jitter * (1.0 + 1e-12); j *= 10.0) {
        Matrix kj = k;
        kj.diagonal().array() += j;
        Eigen::LLT<Matrix> llt(kj);
        if (llt.info() != Eigen::Success) continue;
        Matrix l = llt.matrixL();
        if ((l.diagonal().array() <= 0.0).any()) continue;
        Factorization f;
        f.l = std::move(l);
        f.w = llt.solve(y);
        f.jitter = j;
        f.lml = -0.5 * y.dot(f.w) - f.l.diagonal().array().log().sum() - 0.5 * static_cast<double>(n) * kLog2Pi;
        if (j > jitter) spdlog::debug("gp: jitter escalated to {}", j);
        return f;
    }
    throw SingularKernelError(fmt::format("gp: kernel matrix ({}x{}) not positive definite up to jitter {}", n, n,
                                          max_jitter));
}

}  // namespace

GpModel GpModel::fit(const Matrix& inputs, std::span<const double> outputs, const FitOptions& options) {
    if (inputs.rows() == 0) throw InputError("gp fit: no training points");
    if (static_cast<std::size_t>(inputs.rows()) != outputs.size())
        throw InputError(fmt::format("gp fit: {} inputs but {} outputs", inputs.rows(), outputs.size()));
    if (inputs.cols() == 0) throw InputError("gp fit: zero-dimensional inputs");
    if (!(options.jitter > 0.0) || options.max_jitter < options.jitter)
        throw InputError("gp fit: jitter must be > 0 and <= max_jitter");
    for (double y : outputs)
        if (!std::isfinite(y)) throw InputError("gp fit: non-finite output");

    // Collapse exact duplicates, rejecting conflicting ones.
    std::map<std::vector<double>, double> unique;
    std::vector<std::vector<double>> order;
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        std::vector<double> key(static_cast<std::size_t>(inputs.cols()));
        for (Eigen::Index c = 0; c < inputs.cols(); ++c) key[static_cast<std::size_t>(c)] = inputs(i, c);
        const double y = outputs[static_cast<std::size_t>(i)];
        auto [it, inserted] = unique.emplace(key, y);
        if (inserted) {
            order.push_back(std::move(key));
        } else if (std::abs(it->second - y) > 1e-12 * std::max(1.0, std::abs(y))) {
            throw InconsistentDataError(fmt::format("gp fit: duplicate input (row {}) with conflicting outputs {} and {}",
                                                    i, it->second, y));
        }
    }
    const auto n = static_cast<Eigen::Index>(order.size());
    Matrix raw(n, inputs.cols());
    std::vector<double> raw_y(order.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& key = order[static_cast<std::size_t>(i)];
        for (Eigen::Index c = 0; c < inputs.cols(); ++c) raw(i, c) = key[static_cast<std::size_t>(c)];
        raw_y[static_cast<std::size_t>(i)] = unique[key];
    }

    GpModel m;
    if (options.input_scaling) {
        if (options.input_scaling->dims() != static_cast<std::size_t>(inputs.cols()))
            throw InputError("gp fit: input scaling dimension mismatch");
        m.in_ = *options.input_scaling;
    } else {
        m.in_ = Standardizer::fit(raw);
    }
    m.out_ = Standardizer::fit(std::span<const double>(raw_y));
    m.x_ = m.in_.transform(raw);
    m.y_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) m.y_(i) = m.out_.transform(raw_y[static_cast<std::size_t>(i)]);

    const auto dims = static_cast<std::size_t>(inputs.cols());
    std::vector<double> choices;
    if (options.lengthscale.kind == LengthscalePolicy::Kind::fixed)
        choices.push_back(options.lengthscale.value);
    else
        choices = options.lengthscale.candidates;
    if (choices.empty()) throw InputError("gp fit: no lengthscale candidates");

    bool have = false;
    for (double ell : choices) {
        RbfKernel kernel = RbfKernel::isotropic(dims, ell);
        Factorization f;
        try {
            f = factorize(m.x_, m.y_, kernel, options.jitter, options.max_jitter);
        } catch (const SingularKernelError&) {
            if (choices.size() == 1) throw;
            continue;
        }
        if (!have || f.lml > m.lml_) {
            m.kernel_ = std::move(kernel);
            m.l_ = std::move(f.l);
            m.w_ = std::move(f.w);
            m.jitter_ = f.jitter;
            m.lml_ = f.lml;
            have = true;
        }
    }
    if (!have) throw SingularKernelError("gp fit: no lengthscale candidate gave a positive definite kernel");
    return m;
}

Prediction GpModel::predict_standardized(const Eigen::Ref<const Vector>& xs) const {
    const Eigen::Index n = x_.rows();
    Vector k(n);
    for (Eigen::Index i = 0; i < n; ++i) k(i) = kernel_(x_.row(i), xs);
    Prediction p;
    p.mean = k.dot(w_);
    const Vector v = l_.triangularView<Eigen::Lower>().solve(k);
    const double var = 1.0 - v.squaredNorm();
    if (var > 1.0 + kVarianceCeilingSlack)
        throw std::logic_error(fmt::format("gp: predictive variance {} exceeds the prior", var));
    p.std = std::sqrt(std::max(var, 0.0));
    return p;
}

std::vector<Prediction> GpModel::predict(const Matrix& queries, bool destandardize) const {
    if (static_cast<std::size_t>(queries.cols()) != dims())
        throw InputError(fmt::format("gp predict: query has {} dims, model has {}", queries.cols(), dims()));
    const Matrix xs = in_.transform(queries);
    std::vector<Prediction> out(static_cast<std::size_t>(xs.rows()));
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        Prediction p = predict_standardized(xs.row(i).transpose());
        if (destandardize) p.mean = out_.inverse_transform(p.mean);
        out[static_cast<std::size_t>(i)] = p;
    }
    return out;
}

std::vector<double> GpModel::predict_mean(const Matrix& queries) const {
    if (static_cast<std::size_t>(queries.cols()) != dims())
        throw InputError(fmt::format("gp predict: query has {} dims, model has {}", queries.cols(), dims()));
    const Matrix xs = in_.transform(queries);
    std::vector<double> out(static_cast<std::size_t>(xs.rows()));
    for (Eigen::Index q = 0; q < xs.rows(); ++q) {
        double m = 0.0;
        for (Eigen::Index i = 0; i < x_.rows(); ++i) m += kernel_(x_.row(i), xs.row(q)) * w_(i);
        out[static_cast<std::size_t>(q)] = out_.inverse_transform(m);
    }
    return out;
}

Prediction GpModel::predict_one(std::span<const double> query, bool destandardize) const {
    Matrix q(1, static_cast<Eigen::Index>(query.size()));
    for (std::size_t i = 0; i < query.size(); ++i) q(0, static_cast<Eigen::Index>(i)) = query[i];
    return predict(q, destandardize).front();
}

// ---------------------------------------------------------------------------
// PosteriorVarianceTracker

PosteriorVarianceTracker::PosteriorVarianceTracker(Matrix candidates, RbfKernel kernel, double jitter)
    : x_(std::move(candidates)), kernel_(std::move(kernel)), jitter_(jitter) {
    if (kernel_.dims() != static_cast<std::size_t>(x_.cols()))
        throw InputError("PosteriorVarianceTracker: kernel/candidate dimension mismatch");
    var_ = Vector::Ones(x_.rows());
    v_.resize(x_.rows(), 16);
}

bool PosteriorVarianceTracker::add(std::size_t index) {
    const auto p = static_cast<Eigen::Index>(index);
    if (p < 0 || p >= x_.rows()) throw InputError("PosteriorVarianceTracker: candidate index out of range");
    const auto n = static_cast<Eigen::Index>(order_.size());

    const Vector vp = v_.row(p).head(n).transpose();
    const double pivot_sq = 1.0 + jitter_ - vp.squaredNorm();
    if (!(pivot_sq > 0.0)) return false;
    const double pivot = std::sqrt(pivot_sq);

    if (n == v_.cols()) v_.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(16, 2 * v_.cols()));

    Vector col(x_.rows());
    for (Eigen::Index i = 0; i < x_.rows(); ++i) col(i) = kernel_(x_.row(i), x_.row(p));
    if (n > 0) col.noalias() -= v_.leftCols(n) * vp;
    col /= pivot;
    v_.col(n) = col;
    var_.array() -= col.array().square();
    order_.push_back(index);
    return true;
}

}  // namespace hvs::gp
