#include "freshcost/simulator.hpp"

#include <cmath>

#include <fmt/format.h>

#include "detail/parallel.hpp"

namespace freshcost {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t RngStream::next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
}

double RngStream::uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

RngStream RngStream::substream(std::uint64_t seed, std::uint64_t index) noexcept {
    return RngStream(mix64(mix64(seed) + (index + 1) * 0x9E3779B97F4A7C15ULL));
}

double pairwise_sum(std::span<const double> values) noexcept {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

void check_item(const BusinessAssumptions& a, const SimItem& item) {
    if (item.actual.value >= a.class_count() || item.predicted.value >= a.class_count())
        throw ArgumentError(fmt::format("sim item ({}, {}) out of range (K = {})", item.actual.value,
                                        item.predicted.value, a.class_count()));
}

void check_ready(const BusinessAssumptions& a, const SimOptions& options) {
    if (auto v = validate_assumptions(a); !v.empty()) throw ValidationError(std::move(v));
    if (!(options.incident_probability >= 0.0 && options.incident_probability <= 1.0))
        throw ArgumentError(
            fmt::format("incident_probability must be in [0, 1], got {}", options.incident_probability));
}

// Running statistics of one block of trials, mergeable in a fixed order.
struct BlockStats {
    std::uint64_t n = 0;
    double sum = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    double revenue = 0.0;
    std::uint64_t incidents = 0;
    std::uint64_t purchases = 0;

    void push(const SimOutcome& o) {
        ++n;
        sum += o.realized_regret;
        const double delta = o.realized_regret - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (o.realized_regret - mean);
        revenue += o.revenue;
        incidents += o.incident;
        purchases += o.purchased;
    }
};

BlockStats merge(const BlockStats& x, const BlockStats& y) {
    if (x.n == 0) return y;
    if (y.n == 0) return x;
    BlockStats out;
    out.n = x.n + y.n;
    out.sum = x.sum + y.sum;
    const double nx = static_cast<double>(x.n);
    const double ny = static_cast<double>(y.n);
    const double delta = y.mean - x.mean;
    out.mean = x.mean + delta * ny / static_cast<double>(out.n);
    out.m2 = x.m2 + y.m2 + delta * delta * nx * ny / static_cast<double>(out.n);
    out.revenue = x.revenue + y.revenue;
    out.incidents = x.incidents + y.incidents;
    out.purchases = x.purchases + y.purchases;
    return out;
}

BlockStats merge_pairwise(std::span<const BlockStats> blocks) {
    if (blocks.empty()) return {};
    if (blocks.size() == 1) return blocks.front();
    const std::size_t half = blocks.size() / 2;
    return merge(merge_pairwise(blocks.first(half)), merge_pairwise(blocks.subspan(half)));
}

double standard_error(double m2, std::uint64_t n) {
    if (n < 2) return 0.0;
    const double variance = std::max(0.0, m2 / static_cast<double>(n - 1));
    return std::sqrt(variance / static_cast<double>(n));
}

constexpr std::uint64_t kBlockSize = 4096;

}  // namespace

SimOutcome simulate_item(const BusinessAssumptions& a, const SimItem& item, RngStream& rng,
                         const SimOptions& options) {
    check_item(a, item);
    const ActionId taken = a.action_for(item.predicted);
    SimOutcome out;
    if (!a.actions[taken.value].is_discard) {
        out.purchased = rng.uniform() < a.prob(item.actual, taken);
        if (out.purchased) {
            out.revenue = a.price(taken);
            if (a.hazard[item.actual.value]) {
                out.incident = options.incident_probability >= 1.0 ||
                               rng.uniform() < options.incident_probability;
                if (out.incident) out.incident_cost_incurred = a.incident_cost;
            }
        }
    }
    const double realized = out.incident_cost_incurred - out.revenue;
    out.realized_regret = realized - net_cost(a, item.actual, a.action_for(item.actual));
    return out;
}

SimSummary estimate_mcc_empirical(const BusinessAssumptions& a, ClassId actual, ClassId predicted,
                                  std::uint64_t n, std::uint64_t seed, const SimOptions& options) {
    if (n == 0) throw ArgumentError("estimate_mcc_empirical needs n >= 1");
    check_ready(a, options);
    const SimItem item{actual, predicted};
    check_item(a, item);

    const std::size_t block_count = static_cast<std::size_t>((n + kBlockSize - 1) / kBlockSize);
    std::vector<BlockStats> blocks(block_count);
    detail::parallel_chunks(block_count, options.threads, [&](std::size_t b0, std::size_t b1, unsigned) {
        for (std::size_t b = b0; b < b1; ++b) {
            const std::uint64_t first = b * kBlockSize;
            const std::uint64_t last = std::min<std::uint64_t>(n, first + kBlockSize);
            BlockStats stats;
            for (std::uint64_t t = first; t < last; ++t) {
                auto rng = RngStream::substream(seed, t);
                stats.push(simulate_item(a, item, rng, options));
            }
            blocks[b] = stats;
        }
    });

    const auto all = merge_pairwise(blocks);
    SimSummary s;
    s.n = n;
    s.total_realized_regret = all.sum;
    s.mean_realized_regret = all.sum / static_cast<double>(n);
    s.std_error = standard_error(all.m2, n);
    s.total_revenue = all.revenue;
    s.incident_count = all.incidents;
    s.purchase_count = all.purchases;
    s.seed = seed;
    return s;
}

DayResult simulate_day(const BusinessAssumptions& a, std::span<const SimItem> items,
                       std::uint64_t seed, const SimOptions& options) {
    if (items.empty()) throw ArgumentError("simulate_day needs at least one item");
    check_ready(a, options);
    for (const auto& item : items) check_item(a, item);

    DayResult day;
    day.outcomes.resize(items.size());
    detail::parallel_chunks(items.size(), options.threads, [&](std::size_t i0, std::size_t i1, unsigned) {
        for (std::size_t i = i0; i < i1; ++i) {
            auto rng = RngStream::substream(seed, i);
            day.outcomes[i] = simulate_item(a, items[i], rng, options);
        }
    });

    std::vector<double> regrets(items.size());
    std::vector<double> revenue(items.size());
    SimSummary& s = day.summary;
    for (std::size_t i = 0; i < items.size(); ++i) {
        regrets[i] = day.outcomes[i].realized_regret;
        revenue[i] = day.outcomes[i].revenue;
        s.incident_count += day.outcomes[i].incident;
        s.purchase_count += day.outcomes[i].purchased;
    }
    s.n = items.size();
    s.seed = seed;
    s.total_realized_regret = pairwise_sum(regrets);
    s.mean_realized_regret = s.total_realized_regret / static_cast<double>(s.n);
    s.total_revenue = pairwise_sum(revenue);
    for (auto& r : regrets) r = (r - s.mean_realized_regret) * (r - s.mean_realized_regret);
    s.std_error = standard_error(pairwise_sum(regrets), s.n);
    return day;
}

}  // namespace freshcost
