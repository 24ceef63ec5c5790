#pragma once

#include "gyrolat/lattice.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gyrolat {

enum class Regime { Subcritical, Critical, Intercritical, Supercritical };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        case Regime::Intercritical: return "intercritical";
        case Regime::Supercritical: return "supercritical";
    }
    return "unknown";
}

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Matrix4c = Eigen::Matrix<std::complex<Scalar>, 4, 4>;
template <typename Scalar>
using MatrixXc = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

// Propagating branches at one Bloch vector: real radian frequencies sorted
// ascending (zero kept for the acoustic origin), count of discarded
// negative-omega^2 roots, and the lattice regime.
template <typename Scalar = double>
struct DispersionBranches {
    std::vector<Scalar> omegas;
    Regime regime{Regime::Subcritical};
    int discarded{0};
};

namespace detail {

template <typename Scalar>
Scalar phase_phi(const BlochVector<Scalar>& k, Scalar l) {
    return k.k1 * l / 2 + std::sqrt(Scalar(3)) / 2 * k.k2 * l;
}

template <typename Scalar>
Scalar phase_psi(const BlochVector<Scalar>& k, Scalar l) {
    return k.k1 * l / 2 - std::sqrt(Scalar(3)) / 2 * k.k2 * l;
}

// omega^2 magnitudes at or below this count as the acoustic zero.
template <typename Scalar>
Scalar zero_tolerance(const LatticeSpec<Scalar>& spec) {
    return Scalar(1e-10) * spec.c / std::min(spec.m1, spec.m2);
}

}  // namespace detail

template <typename Scalar>
Matrix2<Scalar> stiffness_mono(const BlochVector<Scalar>& k, const LatticeSpec<Scalar>& spec) {
    spec.validate();
    if (spec.flavor != LatticeFlavor::Monatomic)
        throw std::invalid_argument("stiffness_mono: spec is not monatomic");
    const Scalar l = spec.l, c = spec.c;
    const Scalar s3 = std::sqrt(Scalar(3));
    const Scalar cPhi = std::cos(detail::phase_phi(k, l));
    const Scalar cPsi = std::cos(detail::phase_psi(k, l));
    Matrix2<Scalar> C;
    C(0, 0) = c * (3 - 2 * std::cos(k.k1 * l) - (cPhi + cPsi) / 2);
    C(0, 1) = c * s3 * (cPsi - cPhi) / 2;
    C(1, 0) = C(0, 1);
    C(1, 1) = c * (3 - 3 * (cPhi + cPsi) / 2);
    return C;
}

template <typename Scalar>
Matrix4c<Scalar> stiffness_bi(const BlochVector<Scalar>& k, const LatticeSpec<Scalar>& spec) {
    using Cplx = std::complex<Scalar>;
    spec.validate();
    if (spec.flavor != LatticeFlavor::Biatomic)
        throw std::invalid_argument("stiffness_bi: spec is not biatomic");
    const Scalar l = spec.l, c = spec.c;
    const Scalar s3 = std::sqrt(Scalar(3));
    const Scalar Phi = detail::phase_phi(k, l);
    const Scalar Psi = detail::phase_psi(k, l);
    const Scalar cPhi = std::cos(Phi), cPsi = std::cos(Psi);

    Matrix2<Scalar> D;  // both on-diagonal blocks
    D(0, 0) = c * (3 - cPhi / 2);
    D(0, 1) = -c * s3 / 2 * cPhi;
    D(1, 0) = D(0, 1);
    D(1, 1) = c * (3 - 3 * cPhi / 2);

    Matrix2<Scalar> E;  // real factor of the lower-left block
    E(0, 0) = c * (-2 * std::cos(Phi + Psi) - cPsi / 2);
    E(0, 1) = c * s3 / 2 * cPsi;
    E(1, 0) = E(0, 1);
    E(1, 1) = -c * Scalar(1.5) * cPsi;
    const Cplx gauge(std::cos(Phi + Psi), std::sin(Phi + Psi));

    Matrix4c<Scalar> C = Matrix4c<Scalar>::Zero();
    C.template block<2, 2>(0, 0) = D.template cast<Cplx>();
    C.template block<2, 2>(2, 2) = D.template cast<Cplx>();
    C.template block<2, 2>(2, 0) = gauge * E.template cast<Cplx>();
    C.template block<2, 2>(0, 2) = C.template block<2, 2>(2, 0).adjoint();
    return C;
}

// Independent assembly of C(k) directly from the equations of motion: each
// spring bond contributes its outer product a a^T to the diagonal block and
// -a a^T times the Bloch phase of the neighbour's cell offset to the coupling
// block.  Serves as the oracle for the closed forms above.
template <typename Scalar>
MatrixXc<Scalar> stiffness_bond_sum(const BlochVector<Scalar>& k, const LatticeSpec<Scalar>& spec) {
    using Cplx = std::complex<Scalar>;
    using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
    spec.validate();
    const CellBasis<Scalar> cb = cell_basis(spec);
    const auto phase = [&](const Vec2& shift) {
        const Scalar arg = k.k1 * shift.x() + k.k2 * shift.y();
        return Cplx(std::cos(arg), std::sin(arg));
    };

    if (spec.flavor == LatticeFlavor::Monatomic) {
        // One mass per cell; the six neighbours sit at +-l*a_j.
        MatrixXc<Scalar> C = MatrixXc<Scalar>::Zero(2, 2);
        for (const Vec2& a : {cb.a1, cb.a2, cb.a3}) {
            const Matrix2<Scalar> P = a * a.transpose();
            const Cplx f = Scalar(2) - phase(spec.l * a) - phase(-spec.l * a);
            C += spec.c * f * P.template cast<Cplx>();
        }
        return C;
    }

    // Two masses per cell at (0,0) and (l,0); each row lists the bond
    // direction, the neighbour's sublattice, and the neighbour's cell offset
    // in (t1, t2) units.
    struct Bond {
        int row, col, n1, n2;
        Vec2 dir;
    };
    const std::vector<Bond> bonds = {
        {0, 1, 0, 0, cb.a1},  {0, 1, -1, 0, cb.a1}, {0, 1, -1, 1, cb.a2}, {0, 1, 0, -1, cb.a2},
        {0, 0, 0, -1, cb.a3}, {0, 0, 0, 1, cb.a3},  {1, 0, 1, 0, cb.a1},  {1, 0, 0, 0, cb.a1},
        {1, 0, 0, 1, cb.a2},  {1, 0, 1, -1, cb.a2}, {1, 1, 0, -1, cb.a3}, {1, 1, 0, 1, cb.a3},
    };
    MatrixXc<Scalar> C = MatrixXc<Scalar>::Zero(4, 4);
    for (const Bond& b : bonds) {
        const Matrix2<Scalar> P = b.dir * b.dir.transpose();
        const Vec2 shift = Scalar(b.n1) * cb.t1 + Scalar(b.n2) * cb.t2;
        C.block(2 * b.row, 2 * b.row, 2, 2) += spec.c * P.template cast<Cplx>();
        C.block(2 * b.row, 2 * b.col, 2, 2) -= spec.c * phase(shift) * P.template cast<Cplx>();
    }
    return C;
}

// Mass matrix M and the Hermitian chiral matrix Sigma; the dispersion pencil
// uses B = M - Sigma, whose eigenvalues are m_j -+ alpha_j.
template <typename Scalar = double>
struct InertiaMatrix {
    MatrixXc<Scalar> M;
    MatrixXc<Scalar> Sigma;
};

template <typename Scalar>
InertiaMatrix<Scalar> inertia(const LatticeSpec<Scalar>& spec) {
    using Cplx = std::complex<Scalar>;
    spec.validate();
    const int n = (spec.flavor == LatticeFlavor::Monatomic) ? 2 : 4;
    InertiaMatrix<Scalar> im;
    im.M = MatrixXc<Scalar>::Zero(n, n);
    im.Sigma = MatrixXc<Scalar>::Zero(n, n);
    im.M(0, 0) = im.M(1, 1) = spec.m1;
    im.Sigma(0, 1) = Cplx(0, -spec.alpha1);
    im.Sigma(1, 0) = Cplx(0, spec.alpha1);
    if (n == 4) {
        im.M(2, 2) = im.M(3, 3) = spec.m2;
        im.Sigma(2, 3) = Cplx(0, -spec.alpha2);
        im.Sigma(3, 2) = Cplx(0, spec.alpha2);
    }
    return im;
}

template <typename Scalar>
Regime classify_regime(const LatticeSpec<Scalar>& spec) {
    spec.validate();
    if (spec.flavor == LatticeFlavor::Monatomic) {
        const Scalar m2 = spec.m1 * spec.m1;
        const Scalar a2 = spec.alpha1 * spec.alpha1;
        if (std::abs(m2 - a2) <= Scalar(1e-12) * m2) return Regime::Critical;
        return (m2 > a2) ? Regime::Subcritical : Regime::Supercritical;
    }
    // Count junction types whose inertia pencil eigenvalue m - |alpha| has
    // gone negative; ties resolve to the less critical side.
    int negative = 0;
    if (spec.m1 - std::abs(spec.alpha1) < Scalar(0)) ++negative;
    if (spec.m2 - std::abs(spec.alpha2) < Scalar(0)) ++negative;
    if (negative == 0) return Regime::Subcritical;
    if (negative == 1) return Regime::Intercritical;
    return Regime::Supercritical;
}

namespace detail {

template <typename Scalar>
void push_root(std::vector<Scalar>& omegas, int& discarded, Scalar omegaSq, Scalar zeroTol) {
    if (omegaSq > zeroTol)
        omegas.push_back(std::sqrt(omegaSq));
    else if (omegaSq >= -zeroTol)
        omegas.push_back(Scalar(0));
    else
        ++discarded;
}

// Real roots of det(C - x*B) = 0 for the Hermitian pencil, used where
// neither C nor B is definite.  The determinant is a real polynomial of
// degree <= 4 in x, recovered exactly from five samples.
template <typename Scalar>
std::vector<Scalar> pencil_roots_interpolated(const Matrix4c<Scalar>& C, const Matrix4c<Scalar>& B,
                                              Scalar xScale) {
    using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const int nSample = 5;
    Eigen::Matrix<Scalar, 5, 5> V;
    Eigen::Matrix<Scalar, 5, 1> f;
    for (int i = 0; i < nSample; ++i) {
        const Scalar x = xScale * Scalar(i - 2);
        const Matrix4c<Scalar> P = C - std::complex<Scalar>(x) * B;
        f(i) = P.determinant().real();
        Scalar p = 1;
        for (int q = 0; q < nSample; ++q) {
            V(i, q) = p;
            p *= x;
        }
    }
    Eigen::Matrix<Scalar, 5, 1> coef = V.fullPivLu().solve(f);

    // Trim negligible leading coefficients (the pencil degenerates when
    // det B = 0) and deflate trailing ones (roots pinned at zero by a
    // singular C), then take companion-matrix eigenvalues of the rest.
    // Deflating first matters: a double root at zero would otherwise split
    // into a +-1e-8 pair through the companion matrix.
    Scalar magMax = 0;
    for (int q = 0; q < nSample; ++q)
        magMax = std::max(magMax, std::abs(coef(q)) * std::pow(xScale, Scalar(q)));
    int deg = 4;
    while (deg > 0 && std::abs(coef(deg)) * std::pow(xScale, Scalar(deg)) <= Scalar(1e-10) * magMax)
        --deg;
    std::vector<Scalar> roots;
    int low = 0;
    while (low < deg && std::abs(coef(low)) * std::pow(xScale, Scalar(low)) <= Scalar(1e-10) * magMax) {
        roots.push_back(Scalar(0));
        ++low;
    }
    const int n = deg - low;
    if (n == 0) return roots;

    MatX comp = MatX::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -coef(low + i) / coef(deg);
    Eigen::EigenSolver<MatX> es(comp, false);
    for (int i = 0; i < n; ++i) {
        const std::complex<Scalar> r = es.eigenvalues()(i);
        if (std::abs(r.imag()) > Scalar(1e-8) * std::max(xScale, std::abs(r.real()))) {
            std::ostringstream msg;
            msg << "dispersion solver: complex omega^2 root (" << r.real() << ", " << r.imag()
                << ") from the degenerate pencil — assembly inconsistency";
            throw std::runtime_error(msg.str());
        }
        roots.push_back(r.real());
    }
    return roots;
}

}  // namespace detail

template <typename Scalar>
DispersionBranches<Scalar> dispersion_mono(const BlochVector<Scalar>& k,
                                           const LatticeSpec<Scalar>& spec) {
    spec.validate();
    if (spec.flavor != LatticeFlavor::Monatomic)
        throw std::invalid_argument("dispersion_mono: spec is not monatomic");
    const Matrix2<Scalar> C = stiffness_mono(k, spec);
    const Scalar trC = C.trace();
    const Scalar detC = C.determinant();
    const Scalar m = spec.m1, alpha = spec.alpha1;
    const Scalar a = m * m - alpha * alpha;
    const Scalar zeroTol = detail::zero_tolerance(spec);

    DispersionBranches<Scalar> out;
    out.regime = classify_regime(spec);

    if (trC <= zeroTol * m) {  // C vanishes only at the reciprocal-lattice origin
        out.omegas.assign(out.regime == Regime::Critical ? 1 : 2, Scalar(0));
        return out;
    }
    if (out.regime == Regime::Critical) {
        detail::push_root(out.omegas, out.discarded, detC / (m * trC), zeroTol);
        return out;
    }
    // omega^4 a - omega^2 m trC + detC = 0, solved in the cancellation-free
    // form: q = (m trC + sqrt(D))/2 > 0, roots q/a and detC/q.
    const Scalar D = std::max(Scalar(0), m * m * trC * trC - 4 * a * detC);
    const Scalar q = (m * trC + std::sqrt(D)) / 2;
    detail::push_root(out.omegas, out.discarded, detC / q, zeroTol);
    detail::push_root(out.omegas, out.discarded, q / a, zeroTol);
    std::sort(out.omegas.begin(), out.omegas.end());
    return out;
}

template <typename Scalar>
DispersionBranches<Scalar> dispersion_bi(const BlochVector<Scalar>& k,
                                         const LatticeSpec<Scalar>& spec) {
    using Cplx = std::complex<Scalar>;
    spec.validate();
    if (spec.flavor != LatticeFlavor::Biatomic)
        throw std::invalid_argument("dispersion_bi: spec is not biatomic");
    const Matrix4c<Scalar> C = stiffness_bi(k, spec);
    const InertiaMatrix<Scalar> im = inertia(spec);
    const Matrix4c<Scalar> B = im.M - im.Sigma;

    const Scalar massScale = spec.m1 + spec.m2 + std::abs(spec.alpha1) + std::abs(spec.alpha2);
    const Scalar bMin = std::min(spec.m1 - std::abs(spec.alpha1), spec.m2 - std::abs(spec.alpha2));
    const Scalar zeroTol = detail::zero_tolerance(spec);

    DispersionBranches<Scalar> out;
    out.regime = classify_regime(spec);

    std::vector<Scalar> roots;
    if (bMin > Scalar(1e-12) * massScale) {
        // B positive definite: standard reduction, eigenvalues are omega^2.
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix4c<Scalar>> es(C, B,
                                                                      Eigen::EigenvaluesOnly);
        for (int i = 0; i < 4; ++i) roots.push_back(es.eigenvalues()(i));
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix4c<Scalar>> esC(C, Eigen::EigenvaluesOnly);
        if (esC.eigenvalues()(0) > Scalar(1e-11) * spec.c) {
            // C positive definite: solve B x = nu C x; finite roots are 1/nu,
            // nu near zero is a branch escaped to infinity (dropped, not a
            // discarded negative root).
            Eigen::GeneralizedSelfAdjointEigenSolver<Matrix4c<Scalar>> es(B, C,
                                                                          Eigen::EigenvaluesOnly);
            const Scalar nuTol = Scalar(1e-12) * massScale / spec.c;
            for (int i = 0; i < 4; ++i) {
                const Scalar nu = es.eigenvalues()(i);
                if (std::abs(nu) > nuTol) roots.push_back(1 / nu);
            }
        } else {
            const Scalar xScale = std::max(C.trace().real() / 4, spec.c) / massScale;
            roots = detail::pencil_roots_interpolated(C, B, xScale);
        }
    }
    for (const Scalar x : roots) detail::push_root(out.omegas, out.discarded, x, zeroTol);
    std::sort(out.omegas.begin(), out.omegas.end());
    return out;
}

template <typename Scalar>
DispersionBranches<Scalar> dispersion(const BlochVector<Scalar>& k,
                                      const LatticeSpec<Scalar>& spec) {
    return spec.flavor == LatticeFlavor::Monatomic ? dispersion_mono(k, spec)
                                                   : dispersion_bi(k, spec);
}

// Finite propagating branches expected at a generic k for the regime.
template <typename Scalar>
int expected_branch_count(const LatticeSpec<Scalar>& spec) {
    const Regime r = classify_regime(spec);
    if (spec.flavor == LatticeFlavor::Monatomic) return (r == Regime::Subcritical) ? 2 : 1;
    const bool onBoundary1 = std::abs(spec.m1 - std::abs(spec.alpha1)) == Scalar(0);
    const bool onBoundary2 = std::abs(spec.m2 - std::abs(spec.alpha2)) == Scalar(0);
    int count = 4;
    if (r == Regime::Intercritical) count = 3;
    if (r == Regime::Supercritical) count = 2;
    // On a regime boundary one branch sits at infinity rather than negative
    // omega^2, reducing the finite count by one.
    return count - (onBoundary1 ? 1 : 0) - (onBoundary2 ? 1 : 0);
}

// Brute-force oracle: sign-change scan of det[C - omega^2 (M - Sigma)] over
// omega^2 in [0, omegaMax^2] followed by bisection.
template <typename Scalar = double>
struct DetScanResult {
    std::vector<Scalar> omegas;
    int expectedCount{0};
    bool countMismatch{false};
};

template <typename Scalar>
DetScanResult<Scalar> dispersion_det_scan(const BlochVector<Scalar>& k,
                                          const LatticeSpec<Scalar>& spec, Scalar omegaMax,
                                          int nSteps) {
    using Cplx = std::complex<Scalar>;
    spec.validate();
    if (!(omegaMax > Scalar(0)))
        throw std::invalid_argument("dispersion_det_scan: omegaMax must be positive");
    if (nSteps < 100) throw std::invalid_argument("dispersion_det_scan: nSteps must be >= 100");

    MatrixXc<Scalar> C;
    if (spec.flavor == LatticeFlavor::Monatomic)
        C = stiffness_mono(k, spec).template cast<Cplx>();
    else
        C = stiffness_bi(k, spec);
    const InertiaMatrix<Scalar> im = inertia(spec);
    const MatrixXc<Scalar> B = im.M - im.Sigma;
    const auto det = [&](Scalar x) {
        return MatrixXc<Scalar>(C - Cplx(x) * B).determinant().real();
    };

    const Scalar xMax = omegaMax * omegaMax;
    const Scalar detScale = std::pow(C.cwiseAbs().maxCoeff() + xMax * B.cwiseAbs().maxCoeff(),
                                     Scalar(C.rows()));
    DetScanResult<Scalar> out;
    Scalar fPrev = det(Scalar(0));
    if (std::abs(fPrev) <= Scalar(1e-12) * detScale) out.omegas.push_back(Scalar(0));
    for (int i = 1; i <= nSteps; ++i) {
        const Scalar x0 = xMax * Scalar(i - 1) / nSteps;
        const Scalar x1 = xMax * Scalar(i) / nSteps;
        const Scalar f1 = det(x1);
        if ((fPrev < 0) != (f1 < 0)) {
            Scalar lo = x0, hi = x1, flo = fPrev;
            for (int it = 0; it < 100 && hi - lo > Scalar(1e-15) * xMax; ++it) {
                const Scalar mid = (lo + hi) / 2;
                const Scalar fm = det(mid);
                if ((flo < 0) == (fm < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.omegas.push_back(std::sqrt((lo + hi) / 2));
        } else if (f1 == Scalar(0)) {
            out.omegas.push_back(std::sqrt(x1));
        }
        fPrev = f1;
    }
    // Collapse duplicates from a root landing exactly on a scan node.
    std::sort(out.omegas.begin(), out.omegas.end());
    out.omegas.erase(std::unique(out.omegas.begin(), out.omegas.end(),
                                 [&](Scalar a, Scalar b) {
                                     return b - a <= Scalar(1e-9) * omegaMax;
                                 }),
                     out.omegas.end());
    out.expectedCount = expected_branch_count(spec);
    out.countMismatch = static_cast<int>(out.omegas.size()) != out.expectedCount;
    return out;
}

// Leading-order dispersion near the reciprocal-lattice origin.
template <typename Scalar = double>
struct LowFrequency {
    Scalar omega1{0};
    std::optional<Scalar> omega2;  // upper branch; absent once |alpha| >= m
};

template <typename Scalar>
LowFrequency<Scalar> lowfreq_mono(const BlochVector<Scalar>& k, const LatticeSpec<Scalar>& spec) {
    spec.validate();
    if (spec.flavor != LatticeFlavor::Monatomic)
        throw std::invalid_argument("lowfreq_mono: spec is not monatomic");
    const Scalar m = spec.m1, alpha = spec.alpha1, c = spec.c;
    const Scalar kk = (k.k1 * spec.l) * (k.k1 * spec.l) + (k.k2 * spec.l) * (k.k2 * spec.l);
    LowFrequency<Scalar> out;
    if (std::abs(m - std::abs(alpha)) <= Scalar(1e-12) * m) {
        out.omega1 = Scalar(0.375) * std::sqrt(2 * c / m * kk);
        return out;
    }
    const Scalar root = std::sqrt(m * m + 3 * alpha * alpha);
    const Scalar den = m * m - alpha * alpha;
    out.omega1 = std::sqrt(3 * c / 8 * (2 * m - root) / den * kk);
    if (std::abs(alpha) < m) out.omega2 = std::sqrt(3 * c / 8 * (2 * m + root) / den * kk);
    return out;
}

// Out-of-plane shear lattice with the same triangular geometry.
template <typename Scalar>
Scalar scalar_lattice_dispersion(const BlochVector<Scalar>& k, Scalar cs, Scalar ms, Scalar l) {
    if (!(cs > Scalar(0)) || !(ms > Scalar(0)))
        throw std::invalid_argument("scalar_lattice_dispersion: cs and ms must be positive");
    const Scalar c1 = std::cos(k.k1 * l / 2);
    const Scalar c2 = std::cos(std::sqrt(Scalar(3)) * k.k2 * l / 2);
    const Scalar val = cs / ms * (8 - 4 * c1 * c1 - 4 * c1 * c2);
    return std::sqrt(std::max(Scalar(0), val));
}

// Stiffness/mass ratio of the scalar lattice whose low-frequency shear wave
// matches the chiral vector lattice; continuous through |alpha| = m.
template <typename Scalar>
Scalar equivalent_scalar_ratio(Scalar m, Scalar alpha, Scalar c) {
    if (!(m > Scalar(0)) || !(c > Scalar(0)))
        throw std::invalid_argument("equivalent_scalar_ratio: m and c must be positive");
    const Scalar t = (alpha / m) * (alpha / m);
    if (std::abs(t - 1) <= Scalar(1e-12)) return 3 * c / (16 * m);
    return c / (4 * m) * (std::sqrt(1 + 3 * t) - 2) / (t - 1);
}

}  // namespace gyrolat
