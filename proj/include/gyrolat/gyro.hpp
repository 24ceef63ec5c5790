#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace gyrolat {

enum class SignBranch { Plus, Minus };

template <typename Scalar = double>
struct SpinnerBody {
    Scalar I0{1};  // transverse moment of inertia (I_xx = I_yy)
    Scalar I{1};   // axial moment of inertia (I_zz)
    Scalar h{1};   // characteristic spinner length
    SignBranch branch{SignBranch::Plus};

    void validate() const {
        if (!(I0 > Scalar(0)) || !(I > Scalar(0)) || !(h > Scalar(0)))
            throw std::invalid_argument("SpinnerBody: I0, I, h must be positive");
    }
};

// Euler angles and rates of one spinner: theta nutation, phi precession,
// psiDot the (constant) spin rate.  Small-angle validity is the caller's
// responsibility.
template <typename Scalar = double>
struct GyroState {
    Scalar theta{0}, thetaDot{0}, thetaDdot{0};
    Scalar phi{0}, phiDot{0}, phiDdot{0};
    Scalar psiDot{0};
};

// Moments (Mx, My, Mz) for constant spin rate.
template <typename Scalar>
std::array<Scalar, 3> gyro_moments(const GyroState<Scalar>& s, const SpinnerBody<Scalar>& b) {
    b.validate();
    const Scalar st = std::sin(s.theta);
    const Scalar ct = std::cos(s.theta);
    const Scalar Mx = b.I0 * (s.thetaDdot - s.phiDot * s.phiDot * st * ct) +
                      b.I * s.phiDot * st * (s.phiDot * ct + s.psiDot);
    const Scalar My = st * (b.I0 * (s.phiDdot * st + 2 * s.phiDot * s.thetaDot * ct) -
                            b.I * s.thetaDot * (s.phiDot * ct + s.psiDot));
    const Scalar Mz = b.I * (s.phiDdot * ct - s.phiDot * s.thetaDot * st);
    return {Mx, My, Mz};
}

template <typename Scalar>
Scalar precession_rate(const SpinnerBody<Scalar>& b, Scalar Omega) {
    b.validate();
    const Scalar den = 2 * b.I0 - b.I;
    if (den == Scalar(0))
        throw std::invalid_argument("precession_rate: degenerate spinner (2*I0 == I)");
    return b.I * Omega / den;
}

// Spin rate making a nutation at radian frequency omega torque-free about
// the x and y axes; the sign branch picks the gyro handedness.
template <typename Scalar>
Scalar compatible_spin_rate(const SpinnerBody<Scalar>& b, Scalar omega) {
    b.validate();
    const Scalar sign = (b.branch == SignBranch::Plus) ? Scalar(1) : Scalar(-1);
    return sign * omega * (2 * b.I0 - b.I) / b.I;
}

template <typename Scalar>
Scalar spinner_constant(const SpinnerBody<Scalar>& b) {
    b.validate();
    return b.I / (b.h * b.h);
}

// State of a compatibly spinning body at time t under the real nutation
// theta(t) = Theta*cos(omega*t), with constant precession and spin rates.
template <typename Scalar>
GyroState<Scalar> compatible_state(const SpinnerBody<Scalar>& b, Scalar omega, Scalar Theta,
                                   Scalar t) {
    const Scalar Omega = compatible_spin_rate(b, omega);
    GyroState<Scalar> s;
    s.theta = Theta * std::cos(omega * t);
    s.thetaDot = -Theta * omega * std::sin(omega * t);
    s.thetaDdot = -Theta * omega * omega * std::cos(omega * t);
    s.phiDot = precession_rate(b, Omega);
    s.phiDdot = Scalar(0);
    s.psiDot = Omega;
    return s;
}

}  // namespace gyrolat
