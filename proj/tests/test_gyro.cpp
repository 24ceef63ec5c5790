#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gyrolat/gyro.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace gyrolat;

namespace {

SpinnerBody<> sample_body() {
    SpinnerBody<> b;
    b.I0 = 2.0;
    b.I = 1.0;
    b.h = 0.5;
    b.branch = SignBranch::Plus;
    return b;
}

}  // namespace

TEST_CASE("spinner validation") {
    auto b = sample_body();
    CHECK_NOTHROW(b.validate());
    b.I0 = 0.0;
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = sample_body();
    b.h = -1.0;
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
    b = sample_body();
    b.I = 0.0;
    CHECK_THROWS_AS(b.validate(), std::invalid_argument);
}

TEST_CASE("precession rate and compatible spin rate") {
    const auto b = sample_body();
    const double omega = 3.0;
    // Omega = omega * (2 I0 - I) / I = 3 * 3 / 1 = 9, and feeding it back gives
    // phiDot = I * Omega / (2 I0 - I) = omega.
    const double Omega = compatible_spin_rate(b, omega);
    CHECK(Omega == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(precession_rate(b, Omega) == doctest::Approx(omega).epsilon(1e-15));

    auto minus = b;
    minus.branch = SignBranch::Minus;
    CHECK(compatible_spin_rate(minus, omega) == doctest::Approx(-9.0).epsilon(1e-15));

    SpinnerBody<> equal;
    equal.I0 = 1.5;
    equal.I = 1.5;
    CHECK(precession_rate(equal, 4.0) == doctest::Approx(4.0).epsilon(1e-15));

    auto degenerate = b;
    degenerate.I = 2 * degenerate.I0;
    CHECK_THROWS_AS(precession_rate(degenerate, 1.0), std::invalid_argument);
    CHECK(compatible_spin_rate(degenerate, 7.0) == 0.0);
}

TEST_CASE("torque balance about the vertical axis") {
    // (I - I0) phiDot^2 + I Omega phiDot - I0 omega^2 vanishes when Omega and
    // phiDot come from the compatibility condition, on either sign branch.
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        SpinnerBody<> b;
        b.I0 = u(rng);
        b.I = u(rng);
        b.h = u(rng);
        if (std::abs(2 * b.I0 - b.I) < 1e-3) continue;
        b.branch = (trial % 2 == 0) ? SignBranch::Plus : SignBranch::Minus;
        const double omega = u(rng);
        const double Omega = compatible_spin_rate(b, omega);
        const double phiDot = precession_rate(b, Omega);
        const double residual =
            (b.I - b.I0) * phiDot * phiDot + b.I * Omega * phiDot - b.I0 * omega * omega;
        CHECK(std::abs(residual) <= 1e-10 * b.I0 * omega * omega);
    }
}

TEST_CASE("spinner constant") {
    CHECK(spinner_constant(sample_body()) == doctest::Approx(4.0).epsilon(1e-15));
    SpinnerBody<> tall;
    tall.I0 = 1.0;
    tall.I = 0.3;
    tall.h = 2.0;
    CHECK(spinner_constant(tall) == doctest::Approx(0.075).epsilon(1e-15));
}

TEST_CASE("spinner constant is invariant under I -> sI, h -> sqrt(s) h") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.2, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        SpinnerBody<> b;
        b.I0 = u(rng);
        b.I = u(rng);
        b.h = u(rng);
        const double s = u(rng);
        auto scaled = b;
        scaled.I *= s;
        scaled.h *= std::sqrt(s);
        CHECK(spinner_constant(scaled) ==
              doctest::Approx(spinner_constant(b)).epsilon(1e-12));
    }
}

TEST_CASE("moments vanish for a static upright spinner") {
    GyroState<> rest;  // all angles and rates zero
    const auto m = gyro_moments(rest, sample_body());
    CHECK(m[0] == 0.0);
    CHECK(m[1] == 0.0);
    CHECK(m[2] == 0.0);
}

TEST_CASE("steady precession leaves tilt moments small") {
    // theta(t) = Theta cos(omega t) with the precession locked to the nutation
    // frequency: the x and y moment components shrink as Theta^3.
    const auto b = sample_body();
    const double omega = 2.0;
    const double Theta = 1e-4;
    const double scale = b.I0 * omega * omega;
    for (double t : {0.0, 0.3, 1.1, 2.9}) {
        const auto st = compatible_state(b, omega, Theta, t);
        const auto m = gyro_moments(st, b);
        CHECK(std::abs(m[0]) <= 1e-10 * scale);
        CHECK(std::abs(m[1]) <= 1e-10 * scale);
    }
}

TEST_CASE("tilt moments scale cubically with amplitude") {
    const auto b = sample_body();
    const double omega = 2.0;
    auto residual = [&](double Theta) {
        double worst = 0.0;
        for (double t : {0.1, 0.7, 1.9}) {
            const auto m = gyro_moments(compatible_state(b, omega, Theta, t), b);
            worst = std::max(worst, std::max(std::abs(m[0]), std::abs(m[1])));
        }
        return worst;
    };
    const double r1 = residual(1e-2);
    const double r2 = residual(1e-3);
    CHECK(r1 / r2 > 300.0);  // one decade in Theta buys ~three decades in moment
    CHECK(r1 / r2 < 3000.0);
}

TEST_CASE("axial moment follows the linearized tilt law") {
    // At the compatible state Mz tracks -I * omega * thetaDot * theta (Plus
    // branch) to O(Theta^2) relative; Theta = 1e-4 puts that at the 1e-8 level.
    const auto b = sample_body();
    const double omega = 2.0;
    const double Theta = 1e-4;
    for (double t : {0.2, 0.9, 1.6, 3.3}) {
        const auto st = compatible_state(b, omega, Theta, t);
        const auto m = gyro_moments(st, b);
        const double predicted = -b.I * omega * st.thetaDot * st.theta;
        CHECK(std::abs(m[2] - predicted) <= 1e-8 * std::abs(predicted));
    }

    auto minus = b;
    minus.branch = SignBranch::Minus;
    const auto st = compatible_state(minus, omega, Theta, 0.9);
    const auto m = gyro_moments(st, minus);
    const double predicted = b.I * omega * st.thetaDot * st.theta;
    CHECK(std::abs(m[2] - predicted) <= 1e-8 * std::abs(predicted));
}

TEST_CASE("compatible state carries the requested motion") {
    const auto b = sample_body();
    const double omega = 2.0;
    const double Theta = 1e-3;
    const auto st = compatible_state(b, omega, Theta, 0.0);
    CHECK(st.theta == doctest::Approx(Theta).epsilon(1e-15));
    CHECK(st.thetaDot == 0.0);
    CHECK(st.thetaDdot == doctest::Approx(-omega * omega * Theta).epsilon(1e-15));
    CHECK(st.phiDot == doctest::Approx(omega).epsilon(1e-12));
    CHECK(st.phiDdot == 0.0);
    CHECK(st.psiDot == doctest::Approx(compatible_spin_rate(b, omega)).epsilon(1e-15));

    const auto later = compatible_state(b, omega, Theta, 0.6);
    CHECK(later.theta == doctest::Approx(Theta * std::cos(1.2)).epsilon(1e-14));
    CHECK(later.thetaDot == doctest::Approx(-Theta * omega * std::sin(1.2)).epsilon(1e-14));
}

TEST_CASE("moment formulas reduce to rigid-body limits") {
    // Pure nutation with no spin or precession: Mx = I0 * thetaDdot.
    const auto b = sample_body();
    GyroState<> st;
    st.theta = 0.4;
    st.thetaDdot = 1.7;
    const auto m = gyro_moments(st, b);
    CHECK(m[0] == doctest::Approx(b.I0 * 1.7).epsilon(1e-15));
    CHECK(m[1] == 0.0);
    CHECK(m[2] == 0.0);

    // Pure axial spin-up: Mz = I * phiDdot at theta = 0.
    GyroState<> spinup;
    spinup.phiDdot = 2.5;
    const auto ms = gyro_moments(spinup, b);
    CHECK(ms[0] == 0.0);
    CHECK(ms[1] == 0.0);
    CHECK(ms[2] == doctest::Approx(b.I * 2.5).epsilon(1e-15));
}
