#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace aop {

// splitmix64 finalizer over (master, stream); used to give every replication
// and every sub-stream an independent, worker-count-independent seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on the open interval (0, 1).
    double uniform_open() noexcept
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) noexcept { return -std::log(uniform_open()) / rate; }

private:
    std::mt19937_64 engine_;
};

} // namespace aop
