#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hvs/gp.hpp"

namespace hvs::learn {

/// Finite Cartesian grid. Flat indices are row-major: the last dimension
/// varies fastest, so index order equals lexicographic order of the
/// per-dimension value indices.
class InputGrid {
public:
    InputGrid() = default;
    explicit InputGrid(std::vector<std::vector<double>> axes);

    /// n evenly spaced values from lo to hi inclusive.
    static std::vector<double> linspace(double lo, double hi, std::size_t n);

    std::size_t dims() const { return axes_.size(); }
    std::size_t size() const { return size_; }
    const std::vector<std::vector<double>>& axes() const { return axes_; }
    const std::vector<double>& axis(std::size_t d) const { return axes_[d]; }

    std::vector<std::size_t> unravel(std::size_t index) const;
    std::size_t ravel(std::span<const std::size_t> multi_index) const;
    std::vector<double> point(std::size_t index) const;

    /// Flat index of the grid point nearest to `values` (per-dimension snap).
    std::size_t nearest_index(std::span<const double> values) const;
    /// Flat index when every coordinate matches an axis value within tol.
    std::optional<std::size_t> find(std::span<const double> values, double tol = 1e-9) const;

    /// All grid points as rows.
    gp::Matrix points() const;
    /// Per-dimension mean / std of the grid values (the input standardization
    /// used by the learner).
    gp::Standardizer standardizer() const;

    bool operator==(const InputGrid& other) const { return axes_ == other.axes_; }

private:
    std::vector<std::vector<double>> axes_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
};

struct InitStrategy {
    enum class Kind { corners, random };
    Kind kind = Kind::corners;
    std::size_t count = 0;  ///< random only
    std::uint64_t seed = 0;
};

struct LearnerConfig {
    double std_threshold = 0.01;
    InitStrategy init;
    std::optional<std::size_t> max_iterations;  ///< defaults to grid size
    gp::LengthscalePolicy lengthscale;
    double jitter = 1e-8;
    double max_jitter = 1e-4;

    void validate() const;
};

/// Black-box ground truth evaluated at one grid point (input units).
using PointSimulator = std::function<double(std::span<const double>)>;

struct SurrogateTable {
    InputGrid grid;
    std::vector<double> predicted;  ///< one value per grid point, output units
    double final_max_std = 1.0;
    double std_threshold = 0.01;
    std::vector<std::size_t> training_indices;  ///< in simulation order
    std::vector<double> training_outputs;
    std::size_t initial_design_size = 0;
    std::size_t iteration_count = 0;
    std::size_t simulation_count = 0;
    bool converged = false;
    std::vector<double> lengthscales;
    double jitter = 0.0;

    double at(std::size_t index) const { return predicted.at(index); }
    /// Prediction for the grid point nearest to `point`.
    double lookup(std::span<const double> point) const { return predicted[grid.nearest_index(point)]; }
};

/// 2^d corner points (min/max of each axis) as flat indices, lexicographic.
std::vector<std::size_t> corner_design(const InputGrid& grid);

/// k distinct flat indices drawn without replacement; reproducible for a
/// given seed. Throws InputError when k exceeds the grid size.
std::vector<std::size_t> random_design(const InputGrid& grid, std::size_t k, std::uint64_t seed);

/// Unsampled index with the largest std; ties go to the lowest index.
/// nullopt when every point has been sampled.
std::optional<std::size_t> acquire_next(std::span<const double> grid_std, const std::vector<bool>& sampled);

/// Same rule evaluated with a fitted model over the whole grid.
std::optional<std::size_t> acquire_next(const gp::GpModel& model, const InputGrid& grid,
                                        const std::vector<bool>& sampled);

/// Called after each acquisition with (iteration, max std before the new
/// simulation, acquired index).
using ProgressCallback = std::function<void(std::size_t, double, std::size_t)>;

/// Max-std active learning loop over a grid:
///   fit -> predict grid -> stop when max std < threshold, else acquire,
///   simulate, append, re-standardize outputs.
/// Returns a table flagged unconverged when max_iterations or the grid runs
/// out first. Simulator exceptions propagate with the partial state appended
/// to the message.
SurrogateTable build_surrogate(const InputGrid& grid, const LearnerConfig& config,
                               const PointSimulator& simulator, const ProgressCallback& progress = {});

struct InitComparison {
    std::size_t corner_iterations = 0;
    std::size_t corner_simulations = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> random_iterations;
    std::vector<std::size_t> random_simulations;
    double random_median_iterations = 0.0;
};

/// Runs build_surrogate with corner init and with random init of the same
/// size (2^d points) once per seed. The corner-init table is copied to
/// `corner_table` when given.
InitComparison compare_init_strategies(const InputGrid& grid, const LearnerConfig& config,
                                       const PointSimulator& simulator, std::span<const std::uint64_t> seeds,
                                       SurrogateTable* corner_table = nullptr);

/// Flat-file form: a `key = value` header, a `---` separator, then one
/// `grid_index,inputs...,predicted_output` row per point. Doubles are written
/// in shortest round-trip form, so save/load is lossless.
void save_table(std::ostream& out, const SurrogateTable& table);
void save_table(const std::string& path, const SurrogateTable& table);
SurrogateTable load_table(std::istream& in, const std::string& source = "<stream>");
SurrogateTable load_table(const std::string& path);

}  // namespace hvs::learn
