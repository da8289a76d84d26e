#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nullrec/grid.hpp"
#include "nullrec/rng.hpp"

namespace nullrec {

/// Trajectory container: one d-dimensional state per grid node, stored
/// contiguously node-major.
class SamplePath {
public:
    SamplePath() = default;

    SamplePath(TimeGrid grid, int dim)
        : grid_(grid), dim_(dim), data_(grid.n_nodes() * static_cast<std::size_t>(dim), 0.0) {
        if (dim < 1) throw std::invalid_argument("SamplePath: dim must be >= 1");
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    int dim() const noexcept { return dim_; }
    std::size_t n_nodes() const noexcept { return grid_.n_nodes(); }

    double value(std::size_t node, int coord = 0) const {
        return data_[node * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(coord)];
    }
    double& value(std::size_t node, int coord = 0) {
        return data_[node * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(coord)];
    }

    Eigen::Map<const Eigen::VectorXd> state(std::size_t node) const {
        return {data_.data() + node * static_cast<std::size_t>(dim_), dim_};
    }

    void set_state(std::size_t node, const Eigen::Ref<const Eigen::VectorXd>& x) {
        Eigen::Map<Eigen::VectorXd>(data_.data() + node * static_cast<std::size_t>(dim_), dim_) = x;
    }

    bool all_finite() const noexcept;

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    bool operator==(const SamplePath& o) const noexcept {
        return grid_ == o.grid_ && dim_ == o.dim_ && data_ == o.data_;
    }

private:
    TimeGrid grid_;
    int dim_ = 1;
    std::vector<double> data_;
};

/// Standard Brownian path on the grid: value(0) = 0, independent N(0, h I)
/// increments. Deterministic function of (grid, dim, seed).
SamplePath sample_brownian(const TimeGrid& grid, int dim, SeedSpec seed);

/// Lazy seeded collection of Brownian paths; path k uses stream_id = k.
struct TrajectoryEnsemble {
    TimeGrid grid;
    int dim = 1;
    std::size_t n_paths = 1;
    std::uint64_t master_seed = 0;

    SamplePath path(std::size_t k) const;

    /// Generates all paths; identical result for any thread count.
    std::vector<SamplePath> materialize(int threads = 0) const;
};

TrajectoryEnsemble sample_ensemble(const TimeGrid& grid, int dim, std::size_t n_paths,
                                   std::uint64_t master_seed);

/// CSV export: optional "# key=value" provenance lines, then `t,x1,...,xd`,
/// one row per node, 17 significant digits.
void write_csv(const SamplePath& path, std::ostream& os,
               const std::map<std::string, std::string>& meta = {});

/// snprintf("%.17g") round-trip-exact float formatting used by all CSV writers.
std::string format_g17(double x);

}  // namespace nullrec
