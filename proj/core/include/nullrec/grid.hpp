#pragma once

#include <cstddef>
#include <stdexcept>

namespace nullrec {

/// Uniform time grid on [t0, t_end] with n_steps intervals.
/// Nodes are reconstructed exactly as t0 + k*h, h = (t_end - t0)/n_steps.
class TimeGrid {
public:
    TimeGrid() = default;

    TimeGrid(double t0, double t_end, std::size_t n_steps)
        : t0_(t0), t_end_(t_end), n_steps_(n_steps) {
        if (!(t_end > t0))
            throw std::invalid_argument("TimeGrid: t_end must exceed t0");
        if (n_steps < 1)
            throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
    }

    double t0() const noexcept { return t0_; }
    double t_end() const noexcept { return t_end_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t n_nodes() const noexcept { return n_steps_ + 1; }
    double span() const noexcept { return t_end_ - t0_; }
    double step() const noexcept { return (t_end_ - t0_) / static_cast<double>(n_steps_); }

    double node(std::size_t k) const noexcept {
        return t0_ + static_cast<double>(k) * step();
    }

    /// Index of the grid node closest to t, clamped to [0, n_steps].
    std::size_t nearest_node(double t) const noexcept {
        if (t <= t0_) return 0;
        if (t >= t_end_) return n_steps_;
        const double k = (t - t0_) / step();
        const auto idx = static_cast<std::size_t>(k + 0.5);
        return idx > n_steps_ ? n_steps_ : idx;
    }

    /// Same span split into factor * n_steps intervals.
    TimeGrid refined(std::size_t factor) const {
        if (factor < 1) throw std::invalid_argument("TimeGrid::refined: factor must be >= 1");
        return TimeGrid(t0_, t_end_, n_steps_ * factor);
    }

    bool operator==(const TimeGrid& o) const noexcept {
        return t0_ == o.t0_ && t_end_ == o.t_end_ && n_steps_ == o.n_steps_;
    }
    bool operator!=(const TimeGrid& o) const noexcept { return !(*this == o); }

private:
    double t0_ = 0.0;
    double t_end_ = 1.0;
    std::size_t n_steps_ = 1;
};

inline TimeGrid make_grid(double t0, double t_end, std::size_t n_steps) {
    return TimeGrid(t0, t_end, n_steps);
}

}  // namespace nullrec
