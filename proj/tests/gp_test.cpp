#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hvs/error.hpp"
#include "hvs/gp.hpp"
#include "oracles.hpp"

using namespace hvs;
using namespace hvs::gp;

namespace {

Matrix to_eigen(const oracle::Mat& m) {
    Matrix out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.front().size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
    return out;
}

FitOptions fixed(double l, double jitter = 1e-8) {
    FitOptions o;
    o.lengthscale.value = l;
    o.jitter = jitter;
    return o;
}

const oracle::Mat kFiveX{{0.0}, {0.6}, {1.1}, {2.3}, {3.0}};

std::vector<double> five_y() {
    std::vector<double> y;
    for (const auto& p : kFiveX) y.push_back(std::sin(p[0]) + 0.3 * p[0]);
    return y;
}

// Frozen from the dense-inverse oracle: queries -0.5 + 0.2 i.
struct Frozen {
    int i;
    double mean, std;
};
constexpr Frozen kFrozen[] = {
    {0, -0.12602381280399721, 0.40029808347594042},
    {8, 1.2212073650732682, 9.999999081434183e-05},
    {12, 1.4786777163824059, 0.18753237116560603},
    {19, 0.88350836183892545, 0.26920227313013129},
};

}  // namespace

TEST(Standardizer, Arithmetic) {
    Standardizer s({10.0}, {2.0});
    EXPECT_DOUBLE_EQ(s.transform(12.0), 1.0);
    EXPECT_DOUBLE_EQ(s.inverse_transform(1.0), 12.0);
}

TEST(Standardizer, ConstantColumnIsClamped) {
    const std::vector<double> v{3.0, 3.0, 3.0};
    const auto s = Standardizer::fit(v);
    EXPECT_EQ(s.scale()[0], 1.0);
    ASSERT_EQ(s.clamped_dims().size(), 1u);
    EXPECT_EQ(s.transform(3.0), 0.0);
}

TEST(Standardizer, RoundTrip) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(3.0, 40.0);
    Matrix m(20, 3);
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(rng);
    const auto s = Standardizer::fit(m);
    const Matrix back = s.inverse_transform(s.transform(m));
    for (Eigen::Index i = 0; i < m.size(); ++i) EXPECT_NEAR(back(i), m(i), 1e-12 * std::max(1.0, std::abs(m(i))));
}

TEST(Standardizer, RejectsBadScale) { EXPECT_THROW(Standardizer({0.0}, {0.0}), InputError); }

TEST(Kernel, SymmetricAndBounded) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const auto k = RbfKernel::isotropic(3, 0.8);
    for (int t = 0; t < 100; ++t) {
        Vector a(3), b(3);
        for (int i = 0; i < 3; ++i) {
            a(i) = u(rng);
            b(i) = u(rng);
        }
        EXPECT_EQ(k(a, b), k(b, a));
        EXPECT_GT(k(a, b), 0.0);
        EXPECT_LE(k(a, b), 1.0);
        EXPECT_EQ(k(a, a), 1.0);
    }
    EXPECT_THROW(RbfKernel::isotropic(2, 0.0), InputError);
}

TEST(Kernel, RandomGramFactorizes) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix x(50, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
    std::vector<double> y(50);
    for (auto& v : y) v = u(rng);
    EXPECT_NO_THROW(GpModel::fit(x, y, fixed(1.0)));
}

TEST(Gp, SinglePoint) {
    Matrix x(1, 1);
    x << 2.0;
    const std::vector<double> y{7.0};
    const auto m = GpModel::fit(x, y, fixed(1.0));
    const std::vector<double> at{2.0}, far{1e4};
    const auto p = m.predict_one(at);
    EXPECT_NEAR(p.mean, 7.0, 1e-6);
    EXPECT_LE(p.std, 1e-3);
    const auto q = m.predict_one(far, false);
    EXPECT_NEAR(q.mean, 0.0, 1e-12);
    EXPECT_NEAR(q.std, 1.0, 1e-12);
}

TEST(Gp, CollinearInterpolation) {
    Matrix x(3, 1);
    x << 0.0, 1.0, 2.0;
    const std::vector<double> y{0.0, 1.0, 2.0};
    const auto m = GpModel::fit(x, y, fixed(1.0));
    for (Eigen::Index i = 0; i < 3; ++i) {
        const std::vector<double> q{x(i, 0)};
        const auto p = m.predict_one(q, false);
        EXPECT_LE(std::abs(p.mean - m.training_targets()(i)), 10.0 * m.jitter());
    }
}

TEST(Gp, FivePointsMatchDenseOracle) {
    const auto y = five_y();
    const oracle::DenseGp o(kFiveX, y, 0.7, 1e-8);
    const auto m = GpModel::fit(to_eigen(kFiveX), y, fixed(0.7));
    ASSERT_EQ(m.jitter(), 1e-8);
    for (int i = 0; i < 20; ++i) {
        const double q = -0.5 + 0.2 * i;
        const auto [om, os] = o.predict({q});
        const std::vector<double> qv{q};
        const auto p = m.predict_one(qv);
        EXPECT_NEAR(p.mean, om, 1e-8) << q;
        EXPECT_NEAR(p.std, os, 1e-8) << q;
    }
    for (const auto& f : kFrozen) {
        const std::vector<double> qv{-0.5 + 0.2 * f.i};
        const auto p = m.predict_one(qv);
        EXPECT_NEAR(p.mean, f.mean, 1e-8);
        EXPECT_NEAR(p.std, f.std, 1e-8);
    }
}

TEST(Gp, RefitAndRescaleInvariance) {
    auto y = five_y();
    const auto x = to_eigen(kFiveX);
    const auto a = GpModel::fit(x, y, fixed(0.7));
    const auto b = GpModel::fit(x, y, fixed(0.7));
    // affine change of the outputs: standardized problem is identical
    std::vector<double> y2;
    for (double v : y) y2.push_back(250.0 * v - 40.0);
    const auto c = GpModel::fit(x, y2, fixed(0.7));
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> q{-0.5 + 0.2 * i};
        EXPECT_EQ(a.predict_one(q).mean, b.predict_one(q).mean);
        EXPECT_NEAR(250.0 * a.predict_one(q).mean - 40.0, c.predict_one(q).mean, 1e-6);
        EXPECT_NEAR(a.predict_one(q).std, c.predict_one(q).std, 1e-9);
    }

    // appending a point moves the output statistics; a refit on the same six
    // points gives the same de-standardized predictions
    Matrix x6(6, 1);
    x6 << 0.0, 0.6, 1.1, 2.3, 3.0, 1.7;
    y.push_back(std::sin(1.7) + 0.3 * 1.7);
    const auto d = GpModel::fit(x6, y, fixed(0.7));
    const auto e = GpModel::fit(x6, y, fixed(0.7));
    EXPECT_NE(d.output_scaler().mean()[0], a.output_scaler().mean()[0]);
    EXPECT_NE(d.output_scaler().scale()[0], a.output_scaler().scale()[0]);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> q{-0.5 + 0.2 * i};
        EXPECT_NEAR(d.predict_one(q).mean, e.predict_one(q).mean, 1e-6);
    }
}

TEST(Gp, BatchEqualsSingle) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    Matrix x(12, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
    std::vector<double> y(12);
    for (auto& v : y) v = u(rng);
    const auto m = GpModel::fit(x, y, fixed(1.0));
    Matrix q(2500, 2);
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = u(rng);
    const auto batch = m.predict(q);
    const auto means = m.predict_mean(q);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const std::vector<double> row{q(i, 0), q(i, 1)};
        const auto p = m.predict_one(row);
        ASSERT_EQ(batch[static_cast<std::size_t>(i)].mean, p.mean);
        ASSERT_EQ(batch[static_cast<std::size_t>(i)].std, p.std);
        ASSERT_NEAR(means[static_cast<std::size_t>(i)], p.mean, 1e-12 * std::max(1.0, std::abs(p.mean)));
    }
}

TEST(Gp, AddingPointNeverRaisesVariance) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix x(8, 2);
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
        std::vector<double> y(8);
        for (auto& v : y) v = u(rng);
        // fixed input scaling so both models live in the same space
        FitOptions o = fixed(0.9);
        o.input_scaling = Standardizer({0.0, 0.0}, {1.0, 1.0});
        const auto small = GpModel::fit(x.topRows(7), std::vector<double>(y.begin(), y.begin() + 7), o);
        const auto big = GpModel::fit(x, y, o);
        for (int t = 0; t < 50; ++t) {
            const std::vector<double> q{u(rng), u(rng)};
            const double v1 = std::pow(small.predict_one(q).std, 2);
            const double v2 = std::pow(big.predict_one(q).std, 2);
            EXPECT_LE(v2, v1 + 1e-9);
        }
    }
}

TEST(Gp, Errors) {
    Matrix x(2, 1);
    x << 1.0, 1.0;
    EXPECT_THROW(GpModel::fit(x, std::vector<double>{1.0, 2.0}), InconsistentDataError);
    EXPECT_NO_THROW(GpModel::fit(x, std::vector<double>{1.0, 1.0}));
    EXPECT_THROW(GpModel::fit(x, std::vector<double>{1.0}), InputError);
    EXPECT_THROW(GpModel::fit(Matrix(0, 1), std::vector<double>{}), InputError);
    Matrix ok(2, 1);
    ok << 0.0, 1.0;
    const auto m = GpModel::fit(ok, std::vector<double>{1.0, 2.0});
    const std::vector<double> bad{1.0, 2.0};
    EXPECT_THROW(m.predict_one(bad), InputError);
}

TEST(Gp, MarginalLikelihoodPicksACandidate) {
    FitOptions o;
    o.lengthscale.kind = LengthscalePolicy::Kind::marginal_likelihood;
    const auto m = GpModel::fit(to_eigen(kFiveX), five_y(), o);
    const double l = m.kernel().lengthscales()[0];
    EXPECT_NE(std::find(o.lengthscale.candidates.begin(), o.lengthscale.candidates.end(), l),
              o.lengthscale.candidates.end());
}

TEST(VarianceTracker, MatchesFullRefit) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    Matrix cand(40, 2);
    for (Eigen::Index i = 0; i < cand.size(); ++i) cand(i) = u(rng);
    const auto kern = RbfKernel::isotropic(2, 0.7);
    PosteriorVarianceTracker t(cand, kern, 1e-8);
    oracle::Mat xs;
    for (std::size_t idx : {3u, 17u, 29u, 8u, 35u}) {
        ASSERT_TRUE(t.add(idx));
        xs.push_back({cand(idx, 0), cand(idx, 1)});
        const oracle::DenseGp o(xs, std::vector<double>(xs.size(), 0.0), 0.7, 1e-8,
                                oracle::Scaler{{0.0, 0.0}, {1.0, 1.0}});
        for (Eigen::Index i = 0; i < cand.rows(); ++i) {
            const auto [m, s] = o.predict({cand(i, 0), cand(i, 1)});
            ASSERT_NEAR(t.variance(static_cast<std::size_t>(i)), s * s, 1e-9);
        }
    }
}
