#include "rsqd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rsqd {

std::string to_string(ResolventKind kind) {
    switch (kind) {
    case ResolventKind::G0P: return "G0P";
    case ResolventKind::GP: return "GP";
    case ResolventKind::S0: return "S0";
    case ResolventKind::S: return "S";
    case ResolventKind::R: return "R";
    }
    return "?";
}

NearSingular::NearSingular(ResolventKind kind, std::complex<double> z, double margin,
                           const std::string& detail)
    : NumericalError([&] {
          std::ostringstream os;
          os << "near-singular resolvent " << to_string(kind) << " at z=" << z.real();
          if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
          os << " (margin " << margin << ")";
          if (!detail.empty()) os << ": " << detail;
          return os.str();
      }()),
      kind_(kind), z_(z), margin_(margin) {}

double brute_force_gap(const RealVector& h0, const std::vector<int>& model) {
    double gap = std::numeric_limits<double>::infinity();
    for (int j : model) {
        for (int i = 0; i < h0.size(); ++i) {
            if (std::find(model.begin(), model.end(), i) != model.end()) continue;
            gap = std::min(gap, std::abs(h0[j] - h0[i]));
        }
    }
    return gap;
}

ProblemInstance::ProblemInstance(RealVector h0, Matrix v, std::vector<int> model, double lambda)
    : h0_(std::move(h0)), v_(std::move(v)), model_(std::move(model)), lambda_(lambda) {
    const int n = dim();
    if (n <= 0) throw ValidationError("instance dimension must be positive");
    if (v_.rows() != n || v_.cols() != n) {
        std::ostringstream os;
        os << "perturbation is " << v_.rows() << "x" << v_.cols() << ", expected " << n << "x" << n;
        throw ValidationError(os.str());
    }
    if (!h0_.allFinite() || !v_.allFinite() || !std::isfinite(lambda_))
        throw ValidationError("instance contains non-finite values");
    const double asym = (v_ - v_.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kHermiticityTolerance) {
        std::ostringstream os;
        os << "perturbation is not Hermitian (max |V - V^dagger| = " << asym << ")";
        throw ValidationError(os.str());
    }
    std::sort(model_.begin(), model_.end());
    if (std::adjacent_find(model_.begin(), model_.end()) != model_.end())
        throw ValidationError("model space indices must be distinct");
    if (model_.empty()) throw ValidationError("model space is empty");
    if (model_.front() < 0 || model_.back() >= n) throw ValidationError("model space index out of range");
    if (static_cast<int>(model_.size()) == n) throw ValidationError("model space must not be the whole space");

    in_model_.assign(static_cast<std::size_t>(n), false);
    for (int j : model_) in_model_[static_cast<std::size_t>(j)] = true;
    for (int i = 0; i < n; ++i)
        if (!in_model_[static_cast<std::size_t>(i)]) complement_.push_back(i);

    gap_ = std::numeric_limits<double>::infinity();
    for (int j : model_)
        for (int i : complement_) gap_ = std::min(gap_, std::abs(h0_[j] - h0_[i]));
    const double scale = std::max(1.0, h0_.cwiseAbs().maxCoeff());
    if (!(gap_ > kSingularityThreshold * scale)) {
        std::ostringstream os;
        os << "no spectral gap between model space and complement (gap = " << gap_ << ")";
        throw ValidationError(os.str());
    }
}

Matrix ProblemInstance::h0_matrix() const { return h0_.cast<Complex>().asDiagonal(); }

Matrix ProblemInstance::hamiltonian() const { return h0_matrix() + lambda_ * v_; }

ProblemInstance ProblemInstance::with_lambda(double lambda) const {
    ProblemInstance copy = *this;
    copy.lambda_ = lambda;
    return copy;
}

ProblemInstance ProblemInstance::with_v(Matrix v) const { return ProblemInstance(h0_, std::move(v), model_, lambda_); }

bool ProblemInstance::is_degenerate(double tol) const {
    const double e0 = h0_[model_.front()];
    return std::all_of(model_.begin(), model_.end(), [&](int j) { return std::abs(h0_[j] - e0) <= tol; });
}

double chi_shape_defect(const Matrix& m, const ProblemInstance& inst) {
    double worst = 0.0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (inst.in_model(i) || !inst.in_model(j)) worst = std::max(worst, std::abs(m(i, j)));
    return worst;
}

bool is_chi_shaped(const Matrix& m, const ProblemInstance& inst, double tol) {
    return m.rows() == inst.dim() && m.cols() == inst.dim() && chi_shape_defect(m, inst) <= tol;
}

Matrix chi_part(const Matrix& m, const ProblemInstance& inst) {
    Matrix out = Matrix::Zero(inst.dim(), inst.dim());
    for (int i : inst.complement())
        for (int j : inst.model()) out(i, j) = m(i, j);
    return out;
}

Projectors projectors(const ProblemInstance& inst) {
    const int n = inst.dim();
    Matrix p = Matrix::Zero(n, n);
    for (int j : inst.model()) p(j, j) = 1.0;
    Matrix q = Matrix::Identity(n, n) - p;
    return {{std::move(p), Subspace::P, Subspace::P}, {std::move(q), Subspace::Q, Subspace::Q}};
}

Matrix restrict(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m(rows[a], cols[b]);
    return out;
}

Matrix embed(const Matrix& block, int dim, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix out = Matrix::Zero(dim, dim);
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) out(rows[a], cols[b]) = block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    return out;
}

namespace {

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

} // namespace

Matrix checked_inverse(const Matrix& a, const Matrix& reference, ResolventKind kind, Complex z) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double scale = std::max({sv(0), spectral_norm(reference), std::abs(z), std::numeric_limits<double>::min()});
    const double margin = smin / scale;
    if (margin < kSingularityThreshold) throw NearSingular(kind, z, margin);
    return a.partialPivLu().inverse();
}

OperatorBlock resolvent(const ProblemInstance& inst, ResolventKind kind, Complex z) {
    const int n = inst.dim();
    const auto& m = inst.model();
    const auto& c = inst.complement();
    switch (kind) {
    case ResolventKind::G0P: {
        Matrix block = restrict(inst.h0_matrix(), m, m);
        Matrix a = block - z * Matrix::Identity(block.rows(), block.cols());
        return {embed(checked_inverse(a, block, kind, z), n, m, m), Subspace::P, Subspace::P};
    }
    case ResolventKind::GP: {
        Matrix block = restrict(inst.hamiltonian(), m, m);
        Matrix a = block - z * Matrix::Identity(block.rows(), block.cols());
        return {embed(checked_inverse(a, block, kind, z), n, m, m), Subspace::P, Subspace::P};
    }
    case ResolventKind::S0:
    case ResolventKind::R: {
        Matrix block = restrict(inst.h0_matrix(), c, c);
        Matrix a = z * Matrix::Identity(block.rows(), block.cols()) - block;
        return {embed(checked_inverse(a, block, kind, z), n, c, c), Subspace::Q, Subspace::Q};
    }
    case ResolventKind::S: {
        Matrix block = restrict(inst.hamiltonian(), c, c);
        Matrix a = z * Matrix::Identity(block.rows(), block.cols()) - block;
        return {embed(checked_inverse(a, block, kind, z), n, c, c), Subspace::Q, Subspace::Q};
    }
    }
    throw ValidationError("unknown resolvent kind");
}

PHPEigensystem php_eigensystem(const ProblemInstance& inst) {
    const auto& m = inst.model();
    const Matrix block = restrict(inst.hamiltonian(), m, m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(block);
    PHPEigensystem out;
    out.energies = es.eigenvalues();
    Matrix vecs = es.eigenvectors();
    // Fix the phase: largest component real and positive.
    for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
        Eigen::Index imax = 0;
        vecs.col(k).cwiseAbs().maxCoeff(&imax);
        const Complex a = vecs(imax, k);
        vecs.col(k) *= std::conj(a) / std::abs(a);
    }
    out.states = Matrix::Zero(inst.dim(), vecs.cols());
    for (std::size_t a = 0; a < m.size(); ++a) out.states.row(m[a]) = vecs.row(static_cast<Eigen::Index>(a));
    for (Eigen::Index k = 0; k < vecs.cols(); ++k)
        out.projectors.push_back(out.states.col(k) * out.states.col(k).adjoint());
    return out;
}

RealVector qhq_eigenvalues(const ProblemInstance& inst) {
    const Matrix block = restrict(inst.hamiltonian(), inst.complement(), inst.complement());
    Eigen::SelfAdjointEigenSolver<Matrix> es(block, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double php_qhq_gap(const ProblemInstance& inst) {
    const RealVector p = php_eigensystem(inst).energies;
    const RealVector q = qhq_eigenvalues(inst);
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < p.size(); ++a)
        for (Eigen::Index b = 0; b < q.size(); ++b) gap = std::min(gap, std::abs(p(a) - q(b)));
    return gap;
}

OperatorBlock sylvester_solve(const ProblemInstance& inst, const OperatorBlock& c) {
    const double tol = 1e-12 * std::max(1.0, c.matrix.cwiseAbs().maxCoeff());
    if (!is_chi_shaped(c.matrix, inst, tol))
        throw ValidationError("sylvester_solve expects a block mapping P into Q");
    Matrix x = Matrix::Zero(inst.dim(), inst.dim());
    for (int i : inst.complement())
        for (int j : inst.model()) x(i, j) = c.matrix(i, j) / (inst.h0()[j] - inst.h0()[i]);
    return {std::move(x), Subspace::P, Subspace::Q};
}

Matrix commutator_with_h0(const Matrix& x, const ProblemInstance& inst) {
    const RealVector& e = inst.h0();
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) * (e[j] - e[i]);
    return out;
}

double v_norm(const ProblemInstance& inst) { return spectral_norm(inst.v()); }

} // namespace rsqd
