#include "freshcost/cost_model.hpp"

#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace freshcost {

namespace {

void check_class(const BusinessAssumptions& a, ClassId c, const char* what) {
    if (c.value >= a.class_count())
        throw ArgumentError(fmt::format("{} class index {} out of range (K = {})", what, c.value,
                                        a.class_count()));
}

void check_action(const BusinessAssumptions& a, ActionId act) {
    if (act.value >= a.action_count())
        throw ArgumentError(fmt::format("action index {} out of range (M = {})", act.value,
                                        a.action_count()));
}

// Shape checks the per-cell operations rely on; full validation lives in
// validate_assumptions.
void check_shape(const BusinessAssumptions& a) {
    if (a.policy.size() != a.class_count() || a.hazard.size() != a.class_count() ||
        a.purchase_prob.rows() != a.class_count() || a.purchase_prob.cols() != a.action_count())
        throw ArgumentError("assumptions are not shape-consistent; run validate_assumptions");
    for (const auto& p : a.policy) check_action(a, p);
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error([&] {
          std::string msg = fmt::format("{} validation error(s)", violations.size());
          for (const auto& v : violations) msg += fmt::format("\n  {}: {}", v.path, v.message);
          return msg;
      }()),
      violations_(std::move(violations)) {}

std::optional<ClassId> BusinessAssumptions::find_class(std::string_view name) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i].name == name) return ClassId{i};
    return std::nullopt;
}

std::optional<ActionId> BusinessAssumptions::find_action(std::string_view name) const {
    for (std::size_t i = 0; i < actions.size(); ++i)
        if (actions[i].name == name) return ActionId{i};
    return std::nullopt;
}

std::vector<std::string> BusinessAssumptions::class_names() const {
    std::vector<std::string> names;
    names.reserve(classes.size());
    for (const auto& c : classes) names.push_back(c.name);
    return names;
}

BusinessAssumptions default_assumptions() {
    BusinessAssumptions a;
    a.classes = {{"FR", 0}, {"HF", 1}, {"SP", 2}};
    a.actions = {{"sell-10", 10.0, false}, {"sell-5", 5.0, false}, {"discard", 0.0, true}};
    a.policy = {ActionId{0}, ActionId{1}, ActionId{2}};
    a.purchase_prob = {
        {0.90, 1.00, 0.0},
        {0.10, 0.90, 0.0},
        {0.01, 0.05, 0.0},
    };
    a.hazard = {false, false, true};
    a.incident_cost = 10000.0;
    return a;
}

BusinessAssumptions scale_costs(const BusinessAssumptions& assumptions, double factor) {
    BusinessAssumptions scaled = assumptions;
    for (auto& action : scaled.actions) action.price *= factor;
    scaled.incident_cost *= factor;
    return scaled;
}

std::vector<Violation> validate_assumptions(const BusinessAssumptions& a) {
    std::vector<Violation> out;
    auto add = [&out](std::string path, std::string message) {
        out.push_back({std::move(path), std::move(message)});
    };

    const std::size_t k = a.class_count();
    const std::size_t m = a.action_count();
    if (k < 2) add("classes", fmt::format("need at least 2 classes, got {}", k));
    if (m < 2) add("actions", fmt::format("need at least 2 actions, got {}", m));

    std::set<std::string> seen;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& c = a.classes[i];
        if (c.name.empty()) add(fmt::format("classes[{}].name", i), "must not be empty");
        if (!seen.insert(c.name).second)
            add(fmt::format("classes[{}].name", i), fmt::format("duplicate class name '{}'", c.name));
        if (c.index != i)
            add(fmt::format("classes[{}].index", i), fmt::format("index {} does not match position", c.index));
    }
    seen.clear();
    for (std::size_t j = 0; j < m; ++j) {
        const auto& act = a.actions[j];
        const auto path = fmt::format("actions[{}]", j);
        if (act.name.empty()) add(path + ".name", "must not be empty");
        if (!seen.insert(act.name).second)
            add(path + ".name", fmt::format("duplicate action name '{}'", act.name));
        if (!std::isfinite(act.price) || act.price < 0.0)
            add(path + ".price", fmt::format("price must be a finite value >= 0, got {}", act.price));
        if (act.is_discard && act.price != 0.0)
            add(path + ".price", "discard action must have price 0");
    }

    if (!std::isfinite(a.incident_cost) || a.incident_cost < 0.0)
        add("incident_cost", fmt::format("must be a finite value >= 0, got {}", a.incident_cost));

    if (a.hazard.size() != k)
        add("hazard", fmt::format("expected {} entries, got {}", k, a.hazard.size()));

    if (a.purchase_prob.rows() != k || a.purchase_prob.cols() != m) {
        add("purchase_prob", fmt::format("expected {}x{} matrix, got {}x{}", k, m,
                                         a.purchase_prob.rows(), a.purchase_prob.cols()));
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const double p = a.purchase_prob(i, j);
                const auto path = fmt::format("purchase_prob[{}][{}]", i, j);
                if (!(p >= 0.0 && p <= 1.0))
                    add(path, fmt::format("probability must be in [0, 1], got {}", p));
                else if (a.actions[j].is_discard && p != 0.0)
                    add(path, fmt::format("discard action '{}' must have purchase probability 0",
                                          a.actions[j].name));
            }
        }
    }

    if (a.policy.size() != k) {
        add("policy", fmt::format("policy must map all {} classes, got {}", k, a.policy.size()));
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            const auto path = fmt::format("policy[{}]", i);
            if (a.policy[i].value >= m) {
                add(path, fmt::format("action index {} out of range", a.policy[i].value));
                continue;
            }
            if (i < a.hazard.size() && a.hazard[i] && !a.actions[a.policy[i].value].is_discard)
                add(path, fmt::format("hazard class '{}' must map to a discard action, maps to '{}'",
                                      a.classes[i].name, a.actions[a.policy[i].value].name));
        }
    }
    return out;
}

double net_cost(const BusinessAssumptions& a, ClassId actual, ActionId action) {
    check_class(a, actual, "actual");
    check_action(a, action);
    const double p = a.prob(actual, action);
    const double incident = a.hazard[actual.value] ? a.incident_cost * p : 0.0;
    return incident - a.price(action) * p;
}

double expected_loss(const BusinessAssumptions& a, ClassId actual, ClassId predicted) {
    check_class(a, actual, "actual");
    check_class(a, predicted, "predicted");
    check_shape(a);
    if (actual == predicted) return 0.0;
    if (a.hazard[actual.value]) return a.incident_cost * a.prob(actual, a.action_for(predicted));
    const ActionId correct = a.action_for(actual);
    return a.price(correct) * a.prob(actual, correct);
}

double expected_gain(const BusinessAssumptions& a, ClassId actual, ClassId predicted) {
    check_class(a, actual, "actual");
    check_class(a, predicted, "predicted");
    check_shape(a);
    if (actual == predicted) return 0.0;
    const ActionId taken = a.action_for(predicted);
    return a.price(taken) * a.prob(actual, taken);
}

double mcc_cell(const BusinessAssumptions& a, ClassId actual, ClassId predicted) {
    return expected_loss(a, actual, predicted) - expected_gain(a, actual, predicted);
}

MccMatrix mcc_matrix(const BusinessAssumptions& a) {
    if (auto violations = validate_assumptions(a); !violations.empty())
        throw ValidationError(std::move(violations));
    const std::size_t k = a.class_count();
    MccMatrix out{a.class_names(), Matrix<double>(k, k)};
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) out.values(i, j) = mcc_cell(a, ClassId{i}, ClassId{j});
    return out;
}

ActionRecommendation recommend_action(const BusinessAssumptions& a,
                                      std::span<const double> class_probabilities) {
    if (class_probabilities.size() != a.class_count())
        throw ArgumentError(fmt::format("expected {} class probabilities, got {}", a.class_count(),
                                        class_probabilities.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < class_probabilities.size(); ++i) {
        const double p = class_probabilities[i];
        if (!std::isfinite(p) || p < 0.0)
            throw ArgumentError(fmt::format("probability {} at index {} is not >= 0", p, i));
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw ArgumentError(fmt::format("probabilities sum to {}, expected 1", sum));

    ActionRecommendation out{ActionId{0}, std::vector<double>(a.action_count(), 0.0)};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a.action_count(); ++j) {
        double cost = 0.0;
        for (std::size_t i = 0; i < a.class_count(); ++i)
            cost += class_probabilities[i] * net_cost(a, ClassId{i}, ActionId{j});
        out.expected_costs[j] = cost;
        if (cost < best) {
            best = cost;
            out.action = ActionId{j};
        }
    }
    return out;
}

}  // namespace freshcost
