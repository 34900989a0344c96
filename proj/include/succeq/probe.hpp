#pragma once

#include <cstdint>

// Word-probe instrumentation. Every read of a stored word, packed entry, table
// slot or dictionary bucket made by a query path calls probe::tick(). Tests and
// the bench command read the per-thread counter around a call to bound query
// cost without relying on wall-clock time.

namespace succeq::probe {

inline thread_local std::uint64_t counter = 0;

inline void tick(std::uint64_t n = 1) noexcept { counter += n; }

inline std::uint64_t now() noexcept { return counter; }

/// Counts probes made during its lifetime.
class Scope {
public:
    Scope() noexcept : start_(counter) {}
    std::uint64_t count() const noexcept { return counter - start_; }

private:
    std::uint64_t start_;
};

}  // namespace succeq::probe
