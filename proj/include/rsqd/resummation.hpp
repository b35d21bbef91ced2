#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rsqd/operators.hpp"
#include "rsqd/series.hpp"
#include "rsqd/tree.hpp"

namespace rsqd {

enum class ResummationScheme { LeftComb, Accelerated, Alternative };

std::string to_string(ResummationScheme scheme);

struct ResummedTerm {
    ResummationScheme scheme;
    Tree tree;
    OperatorBlock block; ///< P -> Q
};

// ---------------------------------------------------------------------------
// Left combs

/// Sum over n >= 0 of Omega_{t_n}, t_0 = t, t_{n+1} = t_n v |, in closed form:
///   sum_i Q_i Omega_t (PH0P - e_i P) G_P(e_i).
/// For t = Y this is sum_i Q_i lambda V G_P(e_i); for t = u v v with u, v
/// not bare it is -sum_i Q_i Omega_u lambda V Omega_v G_P(e_i).
/// Throws NearSingular when a PHP eigenvalue meets an energy outside M.
ResummedTerm left_comb_resummed(const Tree& t, const ProblemInstance& inst);

struct LeftCombPartialSum {
    Matrix sum;                 ///< sum_{n=0}^{terms-1} Omega_{t_n}
    std::size_t terms = 0;
    double last_term_norm = 0;  ///< ||Omega_{t_{terms-1}}||_F
    double ratio = 0;           ///< largest ratio of successive norms over the last few terms
    double tail_estimate = 0;   ///< geometric bound on the omitted terms, +inf if ratio >= 1
};

/// Plain partial sum sum_{n=0}^{n_max} Omega_{t_n} with a geometric tail estimate.
LeftCombPartialSum left_comb_partial_sum(const Tree& t, const ProblemInstance& inst, std::size_t n_max = 20);

/// P + sum of Omega'_t over the comb bases of order <= N: Y (standing for
/// every pure comb of |) and all trees whose right subtree is not bare.
WaveOperatorTruncation left_comb_wave_operator(const ProblemInstance& inst, std::size_t order,
                                               std::size_t cap = kDefaultEnumerationCap);

// ---------------------------------------------------------------------------
// Right-normalized (accelerated) expansion

/// Omega^_Y = sum_i Q_i lambda V G_P(e_i)
/// Omega^_{| v t2} = sum_i Q_i lambda V Omega^_{t2} G_P(e_i)
/// Omega^_{t1 v t2} = -sum_i Q_i Omega^_{t1} lambda V Omega^_{t2} G_P(e_i)
/// Throws ValidationError if t is not right-normalized.
ResummedTerm accelerated_term(const Tree& t, const ProblemInstance& inst);

/// P + sum of Omega^_t over right-normalized trees with 1 <= |t| <= N.
WaveOperatorTruncation accelerated_wave_operator(const ProblemInstance& inst, std::size_t order,
                                                 std::size_t cap = kDefaultEnumerationCap);

// ---------------------------------------------------------------------------
// Alternative expansion over all trees, bare root included

/// Omega~_| = sum_j S(ē_j) Q lambda V P̄_j
/// Omega~_{t1 v t2} = -sum_j S(ē_j) Omega~_{t1} lambda V Omega~_{t2} P̄_j
/// Throws NearSingular if the spectra of PHP and QHQ touch.
ResummedTerm alternative_term(const Tree& t, const ProblemInstance& inst);

/// P + sum of Omega~_t over 0 <= |t| <= N. per_order[0] holds Omega~_|,
/// which already carries one factor of lambda.
WaveOperatorTruncation alternative_wave_operator(const ProblemInstance& inst, std::size_t order,
                                                 std::size_t cap = kDefaultEnumerationCap);

// ---------------------------------------------------------------------------
// Iterative schemes

enum class IterativeScheme { LkFixedPoint, SuzukiLeeCF, GeneralizedCF };

std::string to_string(IterativeScheme scheme);

struct IterationOptions {
    std::size_t max_iter = 50;
    double tol = 1e-10;
};

/// iterates[m] is chi_{m+1}; the start chi_0 = 0 is not stored.
/// residuals[m] = lindgren_residual(iterates[m]), steps[m] = ||chi_{m+1} - chi_m||_F.
/// converged once both step and residual are <= tol.
struct IterativeSolution {
    IterativeScheme scheme;
    std::vector<OperatorBlock> iterates;
    std::vector<double> residuals;
    std::vector<double> steps;
    bool converged = false;

    std::size_t iterations() const noexcept { return iterates.size(); }
    const OperatorBlock& chi() const { return iterates.back(); }
};

enum class LkVariant { Barred, Bare };

/// Comb fixed point, chi <- RHS(chi).
///  Barred: chi = sum_m A_m, A_0 = sum_j S(ē_j) Q lambda V P̄_j,
///          A_m = -sum_j S(ē_j) A_{m-1} lambda V chi P̄_j
///  Bare:   chi = sum_i sum_{k>=1} (-1)^(k-1) Q_i [lambda V Omega G0_P(e_i)]^k,
///          Omega = P + chi
/// With a cutoff K the inner sums stop at m = K (Barred) or k = K (Bare).
/// Without one they run until the next term is below 1e-17 of the sum, up
/// to kLkMaxCombTerms terms.
IterativeSolution lk_fixed_point(const ProblemInstance& inst, LkVariant variant,
                                 std::optional<std::size_t> cutoff = std::nullopt,
                                 IterationOptions options = {});

inline constexpr std::size_t kLkMaxCombTerms = 400;

/// Right-hand side of the comb equation for a given chi (one iteration step).
Matrix lk_rhs(const ProblemInstance& inst, LkVariant variant, const Matrix& chi,
              std::optional<std::size_t> cutoff = std::nullopt);

/// (e0 Q - QHQ + chi_{n-1} lambda V Q) chi_n = Q lambda V P - chi_{n-1} lambda V P,
/// inverted on the complement. Throws NotDegenerate unless all model
/// energies agree within 1e-12.
IterativeSolution suzuki_lee_cf(const ProblemInstance& inst, IterationOptions options = {});

/// Q_i chi_n = (Q_i lambda V P + Q_i lambda V chi_{n-1}) (PHP - e_i P + P lambda V chi_{n-1})^-1,
/// the inverse taken inside the model space for each i outside M.
IterativeSolution generalized_cf(const ProblemInstance& inst, IterationOptions options = {});

// ---------------------------------------------------------------------------
// Shifted expansion for a degenerate model space

struct ShiftedExpansion {
    int parent;                     ///< index of the parent state within M (0-based)
    Matrix rotation;                ///< unitary, identity outside M, PVP eigenvectors on M
    RealVector shifted_energies;    ///< e'_i = e0 + lambda <i|V|i> on M, e_i elsewhere
    ProblemInstance shifted;        ///< H'0, V' in the rotated basis, model {parent state}
    WaveOperatorTruncation truncation; ///< terms of the shifted series
    Complex heff;                   ///< e'_0 + lambda <0|V' chi|0>
    double min_denominator;         ///< smallest |e'_0 - e'_i| that entered a term
};

inline constexpr double kShiftSeparation = 1e-10;

/// Rotates M to the eigenbasis of PVP, moves the diagonal of lambda PVP
/// into H0 and expands with the one-dimensional model space spanned by the
/// chosen parent state. Terms follow the four-case recursion with index sets
/// Q (outside M) and Q0 (the other parent states); t1 v | vanishes.
/// Throws NotDegenerate, ShiftDegenerate if shifted energies collide, and
/// ValidationError if parent is out of range.
ShiftedExpansion shifted_degenerate_expansion(const ProblemInstance& inst, int parent, std::size_t order,
                                              std::size_t cap = kDefaultEnumerationCap);

} // namespace rsqd
