#include "nullrec/parallel.hpp"

#include <atomic>
#include <algorithm>
#include <thread>
#include <vector>

namespace nullrec {

namespace {
std::atomic<int> g_max_threads{0};

int hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}
}  // namespace

void set_max_threads(int n) { g_max_threads.store(n > 0 ? n : 0); }

int max_threads() {
    const int n = g_max_threads.load();
    return n > 0 ? n : hardware_threads();
}

void parallel_chunks(std::size_t n_items, std::size_t chunk_size,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                     int threads) {
    if (n_items == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;

    int n_workers = threads > 0 ? threads : max_threads();
    n_workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n_workers), n_chunks));

    auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = c * chunk_size;
        const std::size_t end = std::min(begin + chunk_size, n_items);
        fn(c, begin, end);
    };

    if (n_workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (int w = 0; w < n_workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= n_chunks || failed.load()) return;
                try {
                    run_chunk(c);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace nullrec
