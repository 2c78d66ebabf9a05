#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hvs/active_learner.hpp"

namespace hvs::committee {

/// External temperature rounded to the nearest 0.5 degC, stored as an integer
/// count of half degrees so that keys compare exactly.
struct TempBucket {
    std::int64_t half_degrees = 0;

    double celsius() const { return static_cast<double>(half_degrees) / 2.0; }
    auto operator<=>(const TempBucket&) const = default;
};

/// Nearest multiple of 0.5; exact quarter-degree midpoints round toward +inf.
/// Throws InputError for non-finite input.
TempBucket bucket_of(double raw_temp);

/// Builds the per-point simulator for one bucket (binds the bucket
/// temperature into the ground-truth model).
using SimulatorFactory = std::function<learn::PointSimulator(TempBucket)>;

struct CreationEvent {
    std::int64_t stamp = 0;  ///< caller-supplied time tag (hour index in scenarios)
    TempBucket bucket;
    std::size_t simulations = 0;
    std::size_t models_after = 0;
    std::size_t simulations_after = 0;
    bool converged = true;
};

struct Stats {
    std::size_t models_created = 0;
    std::size_t total_simulations = 0;
    std::vector<CreationEvent> log;
};

/// Lazily trained map TempBucket -> SurrogateTable over a shared grid.
class Committee {
public:
    Committee(learn::InputGrid grid, learn::LearnerConfig config);

    /// Returns the member for bucket_of(raw_temp), training it on first use.
    /// `trained` (optional) is set to whether this call trained a new model.
    /// A training failure leaves the bucket absent and rethrows.
    const learn::SurrogateTable& get_or_train(double raw_temp, const SimulatorFactory& factory,
                                              std::int64_t stamp = 0, bool* trained = nullptr);

    bool contains(TempBucket b) const { return members_.count(b) != 0; }
    const learn::SurrogateTable* find(TempBucket b) const;
    std::size_t size() const { return members_.size(); }
    const std::map<TempBucket, learn::SurrogateTable>& members() const { return members_; }

    Stats stats() const;
    /// Clears members and counters; the current creation log is appended to
    /// archived_logs().
    void invalidate();
    const std::vector<std::vector<CreationEvent>>& archived_logs() const { return archive_; }

    const learn::InputGrid& grid() const { return grid_; }
    const learn::LearnerConfig& config() const { return config_; }

    /// Writes one table file per member (`bucket_<half-degrees>.table`) and a
    /// `manifest.txt` listing members and counters.
    void save(const std::string& dir) const;
    /// Restores a committee saved with save(); grid and config come from the
    /// caller and must match the stored tables' grid.
    static Committee load(const std::string& dir, learn::InputGrid grid, learn::LearnerConfig config);

private:
    void check_counters() const;

    learn::InputGrid grid_;
    learn::LearnerConfig config_;
    std::map<TempBucket, learn::SurrogateTable> members_;
    std::size_t total_simulations_ = 0;
    std::vector<CreationEvent> log_;
    std::vector<std::vector<CreationEvent>> archive_;
};

}  // namespace hvs::committee
