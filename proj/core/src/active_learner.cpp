#include "hvs/active_learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "hvs/error.hpp"

namespace hvs::learn {

void LearnerConfig::validate() const {
    // Thresholds >= 1 are accepted: the prior std is 1, so they stop the loop
    // right after the initial design.
    if (!(std_threshold > 0.0) || !std::isfinite(std_threshold))
        throw InputError(fmt::format("learner: std_threshold must be > 0, got {}", std_threshold));
    if (!(jitter > 0.0) || max_jitter < jitter) throw InputError("learner: jitter must be in (0, max_jitter]");
    if (lengthscale.kind == gp::LengthscalePolicy::Kind::fixed && !(lengthscale.value > 0.0))
        throw InputError("learner: lengthscale must be > 0");
    if (init.kind == InitStrategy::Kind::random && init.count == 0)
        throw InputError("learner: random init needs count >= 1");
}

std::vector<std::size_t> corner_design(const InputGrid& grid) {
    const std::size_t d = grid.dims();
    std::vector<std::size_t> out;
    out.reserve(std::size_t{1} << d);
    std::vector<std::size_t> mi(d);
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        // Highest bit drives dimension 0 so the output is lexicographic.
        for (std::size_t k = 0; k < d; ++k) {
            const bool high = (mask >> (d - 1 - k)) & 1U;
            mi[k] = high ? grid.axis(k).size() - 1 : 0;
        }
        out.push_back(grid.ravel(mi));
    }
    return out;
}

std::vector<std::size_t> random_design(const InputGrid& grid, std::size_t k, std::uint64_t seed) {
    if (k > grid.size())
        throw InputError(fmt::format("random_design: {} points requested from a grid of {}", k, grid.size()));
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> out;
    out.reserve(k);
    // Selection sampling (Knuth's algorithm S): uniform, ordered, O(grid).
    std::size_t needed = k;
    for (std::size_t i = 0; i < grid.size() && needed > 0; ++i) {
        const std::size_t remaining = grid.size() - i;
        std::uniform_int_distribution<std::size_t> pick(0, remaining - 1);
        if (pick(rng) < needed) {
            out.push_back(i);
            --needed;
        }
    }
    return out;
}

std::optional<std::size_t> acquire_next(std::span<const double> grid_std, const std::vector<bool>& sampled) {
    if (sampled.size() != grid_std.size()) throw InputError("acquire_next: std / sampled length mismatch");
    std::optional<std::size_t> best;
    double best_std = -1.0;
    for (std::size_t i = 0; i < grid_std.size(); ++i) {
        if (sampled[i]) continue;
        if (grid_std[i] > best_std) {
            best_std = grid_std[i];
            best = i;
        }
    }
    return best;
}

std::optional<std::size_t> acquire_next(const gp::GpModel& model, const InputGrid& grid,
                                        const std::vector<bool>& sampled) {
    const auto preds = model.predict(grid.points(), false);
    std::vector<double> stds(preds.size());
    std::transform(preds.begin(), preds.end(), stds.begin(), [](const gp::Prediction& p) { return p.std; });
    return acquire_next(stds, sampled);
}

namespace {

[[noreturn]] void rethrow_with_context(const std::string& context) {
    try {
        throw;
    } catch (const InputError& e) {
        throw InputError(context + e.what());
    } catch (const IoError& e) {
        throw IoError(context + e.what());
    } catch (const std::exception& e) {
        throw NumericalError(context + e.what());
    }
}

gp::PosteriorVarianceTracker build_tracker(const gp::Matrix& xs, const gp::RbfKernel& kernel, double jitter,
                                           double max_jitter, const std::vector<std::size_t>& indices) {
    for (double j = jitter; j <= max_jitter * (1.0 + 1e-12); j *= 10.0) {
        gp::PosteriorVarianceTracker t(xs, kernel, j);
        bool ok = true;
        for (std::size_t idx : indices) {
            if (!t.add(idx)) {
                ok = false;
                break;
            }
        }
        if (ok) return t;
    }
    throw SingularKernelError(fmt::format("learner: covariance of {} points not positive definite up to jitter {}",
                                          indices.size(), max_jitter));
}

double choose_lengthscale(const LearnerConfig& config, const InputGrid& grid, const gp::Standardizer& scaler,
                          const std::vector<std::size_t>& indices, const std::vector<double>& outputs) {
    if (config.lengthscale.kind == gp::LengthscalePolicy::Kind::fixed) return config.lengthscale.value;
    gp::Matrix x(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(grid.dims()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto p = grid.point(indices[i]);
        for (std::size_t d = 0; d < p.size(); ++d) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = p[d];
    }
    gp::FitOptions opts;
    opts.lengthscale = config.lengthscale;
    opts.jitter = config.jitter;
    opts.max_jitter = config.max_jitter;
    opts.input_scaling = scaler;
    return gp::GpModel::fit(x, outputs, opts).kernel().lengthscales().front();
}

double max_std(const gp::PosteriorVarianceTracker& t) {
    const double v = t.raw_variances().maxCoeff();
    return std::sqrt(std::max(v, 0.0));
}

}  // namespace

SurrogateTable build_surrogate(const InputGrid& grid, const LearnerConfig& config, const PointSimulator& simulator,
                               const ProgressCallback& progress) {
    config.validate();
    if (grid.size() == 0) throw InputError("build_surrogate: empty grid");
    if (!simulator) throw InputError("build_surrogate: no simulator");

    const gp::Standardizer scaler = grid.standardizer();
    const gp::Matrix xs = scaler.transform(grid.points());
    const std::size_t max_iterations = config.max_iterations.value_or(grid.size());

    std::vector<std::size_t> initial = config.init.kind == InitStrategy::Kind::corners
                                           ? corner_design(grid)
                                           : random_design(grid, config.init.count, config.init.seed);

    SurrogateTable table;
    table.grid = grid;
    table.std_threshold = config.std_threshold;
    table.initial_design_size = initial.size();
    std::vector<bool> sampled(grid.size(), false);

    auto simulate = [&](std::size_t idx) {
        double y;
        try {
            y = simulator(grid.point(idx));
        } catch (...) {
            rethrow_with_context(fmt::format("build_surrogate: simulator failed at grid index {} after {} simulations "
                                             "({} iterations): ",
                                             idx, table.simulation_count, table.iteration_count));
        }
        if (!std::isfinite(y))
            throw NumericalError(fmt::format("build_surrogate: simulator returned {} at grid index {}", y, idx));
        table.training_indices.push_back(idx);
        table.training_outputs.push_back(y);
        sampled[idx] = true;
        ++table.simulation_count;
    };

    for (std::size_t idx : initial) simulate(idx);

    double ell = choose_lengthscale(config, grid, scaler, table.training_indices, table.training_outputs);
    gp::PosteriorVarianceTracker tracker =
        build_tracker(xs, gp::RbfKernel::isotropic(grid.dims(), ell), config.jitter, config.max_jitter,
                      table.training_indices);

    std::vector<double> stds(grid.size());
    double current_max = max_std(tracker);
    while (true) {
        if (current_max < config.std_threshold || config.std_threshold >= 1.0) break;
        if (table.iteration_count >= max_iterations) break;
        for (std::size_t i = 0; i < grid.size(); ++i) stds[i] = tracker.std_dev(i);
        const auto next = acquire_next(stds, sampled);
        if (!next) break;
        simulate(*next);
        ++table.iteration_count;
        if (progress) progress(table.iteration_count, current_max, *next);

        const double new_ell = choose_lengthscale(config, grid, scaler, table.training_indices, table.training_outputs);
        if (new_ell != ell || !tracker.add(*next)) {
            ell = new_ell;
            tracker = build_tracker(xs, gp::RbfKernel::isotropic(grid.dims(), ell), tracker.jitter(),
                                    config.max_jitter, table.training_indices);
        }
        current_max = max_std(tracker);
    }

    table.final_max_std = current_max;
    table.converged = current_max < config.std_threshold || config.std_threshold >= 1.0;
    if (!table.converged)
        spdlog::warn("build_surrogate: stopped unconverged after {} iterations, max std {:.4g} >= {}",
                     table.iteration_count, current_max, config.std_threshold);

    gp::Matrix x(static_cast<Eigen::Index>(table.training_indices.size()), xs.cols());
    for (std::size_t i = 0; i < table.training_indices.size(); ++i) {
        const auto p = grid.point(table.training_indices[i]);
        for (std::size_t d = 0; d < p.size(); ++d) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = p[d];
    }
    gp::FitOptions opts;
    opts.lengthscale.kind = gp::LengthscalePolicy::Kind::fixed;
    opts.lengthscale.value = ell;
    opts.jitter = tracker.jitter();
    opts.max_jitter = config.max_jitter;
    opts.input_scaling = scaler;
    const gp::GpModel model = gp::GpModel::fit(x, table.training_outputs, opts);
    table.predicted = model.predict_mean(grid.points());
    // Sampled points carry the simulator's value exactly.
    for (std::size_t i = 0; i < table.training_indices.size(); ++i)
        table.predicted[table.training_indices[i]] = table.training_outputs[i];
    table.lengthscales = model.kernel().lengthscales();
    table.jitter = model.jitter();
    return table;
}

InitComparison compare_init_strategies(const InputGrid& grid, const LearnerConfig& config,
                                       const PointSimulator& simulator, std::span<const std::uint64_t> seeds,
                                       SurrogateTable* corner_table) {
    if (seeds.empty()) throw InputError("compare_init_strategies: at least one seed is required");
    InitComparison r;
    LearnerConfig corner = config;
    corner.init = {InitStrategy::Kind::corners, 0, 0};
    const SurrogateTable ct = build_surrogate(grid, corner, simulator);
    r.corner_iterations = ct.iteration_count;
    r.corner_simulations = ct.simulation_count;
    if (corner_table) *corner_table = ct;

    const std::size_t k = std::size_t{1} << grid.dims();
    for (std::uint64_t seed : seeds) {
        LearnerConfig rnd = config;
        rnd.init = {InitStrategy::Kind::random, k, seed};
        const SurrogateTable rt = build_surrogate(grid, rnd, simulator);
        r.seeds.push_back(seed);
        r.random_iterations.push_back(rt.iteration_count);
        r.random_simulations.push_back(rt.simulation_count);
    }
    std::vector<std::size_t> sorted = r.random_iterations;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    r.random_median_iterations = m % 2 == 1 ? static_cast<double>(sorted[m / 2])
                                            : 0.5 * static_cast<double>(sorted[m / 2 - 1] + sorted[m / 2]);
    return r;
}

}  // namespace hvs::learn
