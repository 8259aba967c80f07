#ifndef PSKC_PARALLEL_HPP
#define PSKC_PARALLEL_HPP

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace pskc {

// Process-wide worker count for the parallel read phases (embedding and
// candidate scans). PSKC_THREADS overrides the hardware default; the CLI
// --threads flag overrides both.
inline unsigned& thread_count() {
    static unsigned count = [] {
        if (const char* env = std::getenv("PSKC_THREADS")) {
            int v = std::atoi(env);
            if (v > 0) return static_cast<unsigned>(v);
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1u;
    }();
    return count;
}

// Splits [0, n) into contiguous chunks, one per worker; f(chunk, begin, end).
// Chunk indices are stable so callers can merge results deterministically.
template <typename F>
void parallel_chunks(std::size_t n, F&& f) {
    unsigned workers = thread_count();
    if (workers <= 1 || n < 2048) {
        f(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = static_cast<std::size_t>(w) * chunk;
        std::size_t end = std::min(begin + chunk, n);
        if (begin >= end) break;
        pool.emplace_back([&f, w, begin, end] { f(std::size_t{w}, begin, end); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace pskc

#endif
