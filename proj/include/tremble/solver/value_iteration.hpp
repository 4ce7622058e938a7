#pragma once

#include <cstddef>
#include <vector>

#include "tremble/solver/product.hpp"

namespace tremble::solver {

inline constexpr double kDefaultEpsilon = 1e-3;

enum class Sweep { GaussSeidel, Jacobi };

struct ViOptions {
    double epsilon = kDefaultEpsilon;
    Sweep sweep = Sweep::GaussSeidel;
    unsigned threads = 1;  // Jacobi only
    /// Fix the states of almost_sure() at 1 before iterating.
    bool qualitative = true;
};

struct ValueFn {
    std::vector<double> v;  // per sub-model state
    std::size_t iterations = 0;
    double residual = 0;
};

/// Σ over outcomes of mass · min over the set, in outcome order.
double choice_value(const SubMdpst& z, std::uint32_t choice, const std::vector<double>& v);

/// max over the choices of `s`, unclamped; the fixed value for goals and
/// sinks.
double backup(const SubMdpst& z, std::uint32_t s, const std::vector<double>& v);

/// States from which some strategy reaches a goal with probability 1 against
/// every nature: the greatest X such that the least Y containing the goals
/// and every state with a choice whose sets all lie in X and one of whose
/// sets lies in Y equals X.
std::vector<bool> almost_sure(const SubMdpst& z);

/// Robust value iteration from 1 on goals (and, with `qualitative`, on the
/// almost-sure states) and 0 elsewhere until a full sweep changes no value by
/// eps or more. Throws InputError for eps <= 0.
ValueFn robust_vi(const SubMdpst& z, const ViOptions& opts = {});

}  // namespace tremble::solver
