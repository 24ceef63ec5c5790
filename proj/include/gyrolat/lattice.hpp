#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gyrolat {

enum class LatticeFlavor { Monatomic, Biatomic };

// Triangular lattice of point masses joined by linear springs of stiffness c
// and rest length l.  Each junction carries a spinner whose chiral inertia
// enters the equations of motion through alpha (sign = handedness).
template <typename Scalar = double>
struct LatticeSpec {
    Scalar l{1};
    Scalar c{1};
    Scalar m1{1};
    Scalar m2{1};
    Scalar alpha1{0};
    Scalar alpha2{0};
    LatticeFlavor flavor{LatticeFlavor::Monatomic};

    void validate() const {
        if (!(l > Scalar(0)) || !(c > Scalar(0)))
            throw std::invalid_argument("LatticeSpec: l and c must be positive");
        if (!(m1 > Scalar(0)) || !(m2 > Scalar(0)))
            throw std::invalid_argument("LatticeSpec: masses must be positive");
        if (flavor == LatticeFlavor::Monatomic && (m1 != m2 || alpha1 != alpha2))
            throw std::invalid_argument(
                "LatticeSpec: monatomic flavor requires m1 == m2 and alpha1 == alpha2");
    }
};

template <typename Scalar = double>
struct BlochVector {
    Scalar k1{0};
    Scalar k2{0};
};

// Cell translations, unit bond directions, and the Bloch translation matrix T
// whose columns are t1/2 and t2 (the monatomic unit cell holds one mass, so
// its Bloch condition steps by half of t1).
template <typename Scalar = double>
struct CellBasis {
    using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
    Vec2 t1, t2;
    Vec2 a1, a2, a3;
    Eigen::Matrix<Scalar, 2, 2> T;
};

template <typename Scalar>
CellBasis<Scalar> cell_basis(const LatticeSpec<Scalar>& spec) {
    spec.validate();
    const Scalar l = spec.l;
    const Scalar s3 = std::sqrt(Scalar(3));
    CellBasis<Scalar> b;
    b.t1 = {2 * l, Scalar(0)};
    b.t2 = {l / 2, l * s3 / 2};
    b.a1 = {Scalar(1), Scalar(0)};
    b.a2 = {Scalar(-0.5), s3 / 2};
    b.a3 = {Scalar(-0.5), -s3 / 2};
    b.T << l, l / 2, Scalar(0), l * s3 / 2;
    return b;
}

template <typename Scalar>
std::complex<Scalar> bloch_phase(const BlochVector<Scalar>& k,
                                 std::pair<int, int> n,
                                 const CellBasis<Scalar>& basis) {
    using Vec2 = typename CellBasis<Scalar>::Vec2;
    const Vec2 shift = basis.T * Vec2(Scalar(n.first), Scalar(n.second));
    const Scalar arg = k.k1 * shift.x() + k.k2 * shift.y();
    return {std::cos(arg), std::sin(arg)};
}

// Columns are the reciprocal basis b1, b2 with b_i . t_j = 2*pi*delta_ij,
// where the direct translations are (t1/2, t2) for the monatomic flavor and
// (t1, t2) for the biatomic one.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> reciprocal_basis(const LatticeSpec<Scalar>& spec) {
    const CellBasis<Scalar> cb = cell_basis(spec);
    Eigen::Matrix<Scalar, 2, 2> Tr;
    if (spec.flavor == LatticeFlavor::Monatomic)
        Tr << cb.t1.x() / 2, cb.t2.x(), cb.t1.y() / 2, cb.t2.y();
    else
        Tr << cb.t1.x(), cb.t2.x(), cb.t1.y(), cb.t2.y();
    const Scalar twoPi = 2 * Scalar(EIGEN_PI);
    return twoPi * Tr.inverse().transpose();
}

// resolution x resolution grid covering one reciprocal cell; the periodic
// image of each edge is excluded so every physically distinct k appears once.
template <typename Scalar>
std::vector<BlochVector<Scalar>> reciprocal_cell_samples(const LatticeSpec<Scalar>& spec,
                                                         int resolution) {
    if (resolution < 2)
        throw std::invalid_argument("reciprocal_cell_samples: resolution must be >= 2");
    const Eigen::Matrix<Scalar, 2, 2> B = reciprocal_basis(spec);
    std::vector<BlochVector<Scalar>> out;
    out.reserve(static_cast<std::size_t>(resolution) * resolution);
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            const Eigen::Matrix<Scalar, 2, 1> k =
                B * Eigen::Matrix<Scalar, 2, 1>(Scalar(i) / resolution, Scalar(j) / resolution);
            out.push_back({k.x(), k.y()});
        }
    }
    return out;
}

}  // namespace gyrolat
