#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rsqd/operators.hpp"

namespace rsqd {

/// Exact wave operator from the full diagonalization of H0 + lambda V.
struct ExactWaveOperator {
    OperatorBlock omega;   ///< Full; P Omega = P, Omega P = Omega
    OperatorBlock chi;     ///< Q Omega P
    RealVector energies;   ///< selected eigenvalues, ascending
    Matrix states;         ///< dim x N, selected eigenvectors in the same order
    Matrix heff;           ///< N x N, P H Omega restricted to M
    double min_singular;   ///< smallest singular value of the P-component matrix
};

inline constexpr double kDetachedThreshold = 1e-8;

/// Picks N eigenvectors by an overlap assignment to the model basis states
/// (greedy, then pairwise repair) and returns Omega = Phi (P Phi)^-1.
/// Throws ModelSpaceDetached when P Phi has a singular value below 1e-8.
ExactWaveOperator exact_wave_operator(const ProblemInstance& inst);
ExactWaveOperator exact_wave_operator(const ProblemInstance& inst, double lambda);

struct CoefficientOptions {
    double step_fraction = 0.05; ///< h = step_fraction * gap / ||V||
    int depth = 4;               ///< Richardson levels; grid h, h/2, ..., h/2^depth
    double rel_tol = 1e-6;       ///< agreement required between neighbouring diagonal entries
};

/// lambda^n Taylor coefficient of chi_exact(lambda) at lambda = 0 (the
/// instance's own lambda is ignored). Central differences on a halving grid,
/// Richardson-extrapolated in h^2; returns the diagonal tableau entry that
/// changed least from the previous one. Throws ValidationError for n > 6 and
/// ExtrapolationError when the tableau does not settle.
OperatorBlock series_coefficient(const ProblemInstance& inst, int n, CoefficientOptions options = {});

enum class ScanMethod { Exact, Series, LeftComb, Accelerated, Alternative, LkBarred, LkBare, SuzukiLee, GeneralizedCF };

std::string to_string(ScanMethod method);
ScanMethod scan_method_from_string(const std::string& name);
bool is_iterative(ScanMethod method);

struct ConvergenceRow {
    double lambda;
    std::size_t order_or_iter;
    double err_vs_exact;      ///< ||chi_method - chi_exact||_F
    double lindgren_residual;
};

/// Least-squares line through (log lambda, log err) for one order.
struct SlopeFit {
    std::size_t order_or_iter;
    double slope;
    double intercept;
    double fit_residual; ///< RMS deviation of the points from the line
    std::size_t points;
};

struct ConvergenceReport {
    ScanMethod method;
    std::vector<ConvergenceRow> rows;
    std::vector<SlopeFit> fits;
};

/// Runs `method` for each order (series-type) or iteration count (iterative)
/// at each lambda and compares with the exact oracle.
ConvergenceReport convergence_scan(const ProblemInstance& inst, ScanMethod method,
                                   const std::vector<std::size_t>& orders, const std::vector<double>& lambdas);

/// Fit over rows with positive error; orders with fewer than two points are skipped.
std::vector<SlopeFit> fit_slopes(const std::vector<ConvergenceRow>& rows);

/// Approximate chi of `method` at one order or iteration count.
Matrix method_chi(const ProblemInstance& inst, ScanMethod method, std::size_t order_or_iter);

} // namespace rsqd
