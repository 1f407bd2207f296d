#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "aop/core_model.hpp"
#include "aop/queue_sim.hpp"
#include "aop/stats.hpp"

namespace aop {

enum class EstimateMethod { TimeIntegral, CycleAreas };

std::string_view to_string(EstimateMethod method) noexcept;

struct Window {
    double t0 = 0.0;
    double t1 = 0.0;
    double length() const noexcept { return t1 - t0; }
};

/// Renewal-cycle quantities of one polled update i: the hops generated in
/// [gen_{i-1}, gen_i) and the system time of update i. Areas are geometric
/// (v^2 weighting, no kappa); kappa enters at aggregation.
struct CycleStats {
    std::size_t k = 0;
    std::vector<double> hop_durations;
    double X = 0.0;  // inter-generation time, sum of hop_durations
    double T = 0.0;  // system time of the closing update
    double H = 0.0;  // v^2 sum Y_j^2
    double G1 = 0.0; // sum (v^2/3) Y_j^3
    double G2 = 0.0; // sum_j Y_j * v^2 sum_{l<j} Y_l^2
    double G3 = 0.0; // H * T
    double Q = 0.0;  // G1 + G2 + G3
};

struct AopEstimate {
    double mean = 0.0;
    double ci95_halfwidth = 0.0;
    std::size_t n_cycles = 0;
    double horizon = 0.0; // observation interval length
    EstimateMethod method = EstimateMethod::TimeIntegral;
    double renewal_mean = 0.0; // p kappa lambda mean(Q); CycleAreas only
    std::vector<RatioBatch> batches;
};

/// Whole-cycle decomposition of a sample path over [first, last] departure
/// inside a window.
///
/// The exact integral of the PEB-excess sawtooth over the trimmed window is
/// sum(Q_i) + tail_area - head_area, where head/tail are the areas
/// accumulated by the first/last retained update between its generation and
/// its departure.
struct CycleDecomposition {
    std::vector<CycleStats> cycles;
    double head_area = 0.0;
    double tail_area = 0.0;
    Window window;

    double edge_correction() const noexcept { return tail_area - head_area; }
};

/// Time average of PEB(t) - PEB0 over the window, integrated exactly per
/// piecewise-parabolic segment. DR paths use the exact per-hop factor
/// 2(1 - cos delta_j); MA uses factor 1. The CI comes from equal-length time
/// batches.
///
/// Requires a departure at or before t0 and hop coverage of [t0, t1].
AopEstimate integrate_aop(std::span<const HopRecord> hops, std::span<const UpdateRecord> updates,
                          const ModelParams& model, Window window, std::size_t n_batches = 30);

CycleDecomposition cycle_decompose(std::span<const HopRecord> hops, std::span<const UpdateRecord> updates,
                                   const ModelParams& model, Window window);

/// kappa * (sum Q_i + edge_correction) / window_length, with the renewal form
/// p kappa lambda mean(Q_i) reported alongside. CI from batch means of (Q, X).
AopEstimate aop_from_cycles(std::span<const CycleStats> cycles, double window_length, const ModelParams& model,
                            const QueueParams& queue, double edge_correction = 0.0, std::size_t n_batches = 30);

AopEstimate aop_from_cycles(const CycleDecomposition& decomposition, const ModelParams& model,
                            const QueueParams& queue, std::size_t n_batches = 30);

/// Writes `cycle_index,k,X_i,T_i,H_i,G1,G2,G3,Q_i`.
void write_cycles_csv(std::ostream& os, std::span<const CycleStats> cycles);

} // namespace aop
