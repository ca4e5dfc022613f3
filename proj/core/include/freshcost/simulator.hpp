#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "freshcost/cost_model.hpp"

namespace freshcost {

// SplitMix64. Each simulated item draws from its own stream derived from
// (seed, index) by substream(), so results do not depend on scheduling.
class RngStream {
public:
    explicit RngStream(std::uint64_t state) noexcept : state_(state) {}

    std::uint64_t next() noexcept;
    // Uniform in [0, 1) from the top 53 bits.
    double uniform() noexcept;

    std::uint64_t state() const noexcept { return state_; }

    // state = mix64(mix64(seed) + (index + 1) * 0x9E3779B97F4A7C15)
    static RngStream substream(std::uint64_t seed, std::uint64_t index) noexcept;

private:
    std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

struct SimItem {
    ClassId actual;
    ClassId predicted;
};

struct SimOutcome {
    bool purchased = false;
    bool incident = false;
    double revenue = 0.0;
    double incident_cost_incurred = 0.0;
    double realized_regret = 0.0;

    bool operator==(const SimOutcome&) const = default;
};

struct SimOptions {
    // Probability that purchasing a hazardous item causes an incident.
    double incident_probability = 1.0;
    // 0 = std::thread::hardware_concurrency().
    unsigned threads = 0;
};

struct SimSummary {
    std::uint64_t n = 0;
    double mean_realized_regret = 0.0;
    double total_realized_regret = 0.0;
    double std_error = 0.0;
    double total_revenue = 0.0;
    std::uint64_t incident_count = 0;
    std::uint64_t purchase_count = 0;
    std::uint64_t seed = 0;

    bool operator==(const SimSummary&) const = default;
};

// One draw for the purchase decision; a second draw for the incident only
// when incident_probability < 1. Discard actions consume no draws.
SimOutcome simulate_item(const BusinessAssumptions& assumptions, const SimItem& item,
                         RngStream& rng, const SimOptions& options = {});

// n independent trials of one (actual, predicted) cell; trial t uses
// substream(seed, t).
SimSummary estimate_mcc_empirical(const BusinessAssumptions& assumptions, ClassId actual,
                                  ClassId predicted, std::uint64_t n, std::uint64_t seed,
                                  const SimOptions& options = {});

struct DayResult {
    SimSummary summary;
    std::vector<SimOutcome> outcomes;
};

// Item i uses substream(seed, i). Totals are pairwise sums in index order.
DayResult simulate_day(const BusinessAssumptions& assumptions, std::span<const SimItem> items,
                       std::uint64_t seed, const SimOptions& options = {});

// Recursive pairwise summation in index order.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace freshcost
