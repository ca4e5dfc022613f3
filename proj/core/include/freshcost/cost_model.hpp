#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freshcost/errors.hpp"
#include "freshcost/matrix.hpp"

namespace freshcost {

struct ClassId {
    std::size_t value = 0;
    auto operator<=>(const ClassId&) const = default;
};

struct ActionId {
    std::size_t value = 0;
    auto operator<=>(const ActionId&) const = default;
};

struct FreshnessClass {
    std::string name;
    std::size_t index = 0;
};

struct ActionSpec {
    std::string name;
    double price = 0.0;
    bool is_discard = false;
};

// Declarative retail assumptions. Rows of purchase_prob are actual classes,
// columns are actions; policy[i] is the action taken when class i is
// predicted.
struct BusinessAssumptions {
    std::vector<FreshnessClass> classes;
    std::vector<ActionSpec> actions;
    std::vector<ActionId> policy;
    Matrix<double> purchase_prob;
    std::vector<bool> hazard;
    double incident_cost = 0.0;

    std::size_t class_count() const noexcept { return classes.size(); }
    std::size_t action_count() const noexcept { return actions.size(); }

    std::optional<ClassId> find_class(std::string_view name) const;
    std::optional<ActionId> find_action(std::string_view name) const;
    std::vector<std::string> class_names() const;

    double prob(ClassId actual, ActionId action) const {
        return purchase_prob(actual.value, action.value);
    }
    double price(ActionId action) const { return actions[action.value].price; }
    ActionId action_for(ClassId predicted) const { return policy[predicted.value]; }
};

// Three freshness classes FR/HF/SP, $10 / $5 / discard pricing, the purchase
// probability table and a 10,000 incident cost.
BusinessAssumptions default_assumptions();

// Copy with every price and the incident cost multiplied by `factor`.
BusinessAssumptions scale_costs(const BusinessAssumptions& assumptions, double factor);

// Every invariant violation, with a field path. Empty means valid.
std::vector<Violation> validate_assumptions(const BusinessAssumptions& assumptions);

// Expected net cost of handling an item of class `actual` with `action`:
// hazard * incident_cost * P - price * P. Negative values are revenue.
double net_cost(const BusinessAssumptions& assumptions, ClassId actual, ActionId action);

double expected_loss(const BusinessAssumptions& assumptions, ClassId actual, ClassId predicted);
double expected_gain(const BusinessAssumptions& assumptions, ClassId actual, ClassId predicted);

// expected_loss - expected_gain; zero on the diagonal.
double mcc_cell(const BusinessAssumptions& assumptions, ClassId actual, ClassId predicted);

struct MccMatrix {
    std::vector<std::string> labels;
    Matrix<double> values;  // actual rows x predicted columns

    std::size_t size() const noexcept { return labels.size(); }
    double operator()(ClassId actual, ClassId predicted) const {
        return values(actual.value, predicted.value);
    }
};

// Throws ValidationError listing every violated invariant.
MccMatrix mcc_matrix(const BusinessAssumptions& assumptions);

struct ActionRecommendation {
    ActionId action;
    std::vector<double> expected_costs;  // one per action
};

// argmin over actions of sum_i p_i * net_cost(i, action); ties go to the
// lowest action index.
ActionRecommendation recommend_action(const BusinessAssumptions& assumptions,
                                      std::span<const double> class_probabilities);

}  // namespace freshcost
