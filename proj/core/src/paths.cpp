#include "nullrec/paths.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "nullrec/parallel.hpp"

namespace nullrec {

bool SamplePath::all_finite() const noexcept {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

SamplePath sample_brownian(const TimeGrid& grid, int dim, SeedSpec seed) {
    if (dim < 1) throw std::invalid_argument("sample_brownian: dim must be >= 1");
    SamplePath path(grid, dim);
    GaussianStream gauss(seed);
    const double sqh = std::sqrt(grid.step());
    for (std::size_t k = 0; k + 1 < grid.n_nodes(); ++k) {
        for (int j = 0; j < dim; ++j)
            path.value(k + 1, j) = path.value(k, j) + sqh * gauss.next();
    }
    return path;
}

SamplePath TrajectoryEnsemble::path(std::size_t k) const {
    return sample_brownian(grid, dim, SeedSpec{master_seed, k});
}

std::vector<SamplePath> TrajectoryEnsemble::materialize(int threads) const {
    std::vector<SamplePath> out(n_paths);
    parallel_chunks(
        n_paths, kEnsembleChunk,
        [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) out[k] = path(k);
        },
        threads);
    return out;
}

TrajectoryEnsemble sample_ensemble(const TimeGrid& grid, int dim, std::size_t n_paths,
                                   std::uint64_t master_seed) {
    if (n_paths < 1) throw std::invalid_argument("sample_ensemble: n_paths must be >= 1");
    if (dim < 1) throw std::invalid_argument("sample_ensemble: dim must be >= 1");
    return TrajectoryEnsemble{grid, dim, n_paths, master_seed};
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_csv(const SamplePath& path, std::ostream& os,
               const std::map<std::string, std::string>& meta) {
    for (const auto& [key, val] : meta) os << "# " << key << "=" << val << "\n";
    os << "t";
    for (int j = 0; j < path.dim(); ++j) os << ",x" << (j + 1);
    os << "\n";
    for (std::size_t k = 0; k < path.n_nodes(); ++k) {
        os << format_g17(path.grid().node(k));
        for (int j = 0; j < path.dim(); ++j) os << "," << format_g17(path.value(k, j));
        os << "\n";
    }
}

}  // namespace nullrec
