#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gyrolat/bands.hpp>

#include <cmath>
#include <set>
#include <vector>

using namespace gyrolat;

namespace {

LatticeSpec<> mono_spec(double alpha = 0.0) {
    LatticeSpec<> s;
    s.alpha1 = s.alpha2 = alpha;
    return s;
}

LatticeSpec<> heavy_light_spec(double alpha) {
    LatticeSpec<> s;
    s.flavor = LatticeFlavor::Biatomic;
    s.m2 = 10.0;
    s.alpha1 = s.alpha2 = alpha;
    return s;
}

}  // namespace

TEST_CASE("surface sampling shape") {
    CHECK_THROWS_AS(compute_surfaces(mono_spec(), 8), std::invalid_argument);
    const auto s = compute_surfaces(mono_spec(), 16);
    CHECK(s.resolution == 16);
    CHECK(s.kGrid.size() == 256);
    CHECK(s.branches.size() == 256);
    // First sample is the origin with its two acoustic zeros.
    CHECK(s.branches[0] == std::vector<double>{0.0, 0.0});
    for (const auto& b : s.branches) CHECK(b.size() <= 2);
}

TEST_CASE("monatomic lattices have no total gap") {
    // Both surfaces reach omega = 0 at the origin, so the union of their
    // ranges is a single interval starting at zero.
    for (const double alpha : {0.0, 0.8}) {
        const auto spec = mono_spec(alpha);
        const auto s = compute_surfaces(spec, 64);
        CHECK(band_gaps(s, spec, 4.0).empty());
    }
}

TEST_CASE("two-mass lattice opens a gap between acoustic and optical surfaces") {
    const auto spec = heavy_light_spec(0.0);
    const auto s = compute_surfaces(spec, 64);
    const auto gaps = band_gaps(s, spec, 4.0);
    REQUIRE(gaps.size() == 1);
    CHECK(gaps[0].omegaLow == doctest::Approx(0.70711).epsilon(0.01));
    CHECK(gaps[0].omegaHigh == doctest::Approx(1.0).epsilon(0.01));
    CHECK(gaps[0].width() == doctest::Approx(0.293).epsilon(0.05));

    // Scanning only below the gap reports nothing.
    CHECK(band_gaps(s, spec, 0.5).empty());
    CHECK_THROWS_AS(band_gaps(compute_surfaces(spec, 32), spec, 4.0), std::invalid_argument);
}

TEST_CASE("spinners split off a second gap in the two-mass lattice") {
    const auto spec = heavy_light_spec(0.25);
    const auto s = compute_surfaces(spec, 64);
    const auto gaps = band_gaps(s, spec, 4.0);
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[0].width() > 0.05);
    CHECK(gaps[1].omegaLow == doctest::Approx(1.70075).epsilon(0.01));
    CHECK(gaps[1].omegaHigh == doctest::Approx(1.81541).epsilon(0.01));

    const auto spec2 = heavy_light_spec(0.5);
    CHECK(band_gaps(compute_surfaces(spec2, 64), spec2, 4.0).size() == 2);
}

TEST_CASE("no sampled frequency falls inside a reported gap") {
    const auto spec = heavy_light_spec(0.25);
    const auto s = compute_surfaces(spec, 64);
    const auto gaps = band_gaps(s, spec, 4.0);
    REQUIRE(!gaps.empty());
    for (const auto& b : s.branches)
        for (const double w : b)
            for (const auto& g : gaps)
                CHECK(!(w > g.omegaLow + 1e-12 && w < g.omegaHigh - 1e-12));
}

TEST_CASE("gap probing is deterministic per seed") {
    const auto spec = heavy_light_spec(0.5);
    const auto s = compute_surfaces(spec, 64);
    GapOptions<> opt;
    const auto a = band_gaps(s, spec, 4.0, opt);
    const auto b = band_gaps(s, spec, 4.0, opt);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].omegaLow == b[i].omegaLow);
        CHECK(a[i].omegaHigh == b[i].omegaHigh);
    }
    // More probes can only shrink or keep each gap.
    auto dense = opt;
    dense.probeCount = 6000;
    const auto c = band_gaps(s, spec, 4.0, dense);
    REQUIRE(c.size() <= a.size());
    for (const auto& g : c) {
        bool contained = false;
        for (const auto& ga : a)
            contained = contained ||
                        (g.omegaLow >= ga.omegaLow - 1e-12 && g.omegaHigh <= ga.omegaHigh + 1e-12);
        CHECK(contained);
    }
}

TEST_CASE("alpha sweep along the reciprocal diagonal") {
    const auto sweep = alpha_sweep_diagonal(mono_spec(), {0.0, 0.5, 2.0}, {0.3, 0.9, 1.7});
    REQUIRE(sweep.alphas.size() == 3);
    REQUIRE(sweep.kls.size() == 3);
    REQUIRE(sweep.branches.size() == 3);
    for (const auto& row : sweep.branches) REQUIRE(row.size() == 3);
    // Entries match direct dispersion with the swept spinner constant.
    for (std::size_t ia = 0; ia < 3; ++ia) {
        auto spec = mono_spec(sweep.alphas[ia]);
        for (std::size_t ik = 0; ik < 3; ++ik) {
            const BlochVector<> k{sweep.kls[ik], sweep.kls[ik]};
            CHECK(sweep.branches[ia][ik] == dispersion(k, spec).omegas);
        }
    }
    // Branch count drops from two to one across the critical coupling.
    CHECK(sweep.branches[0][0].size() == 2);
    CHECK(sweep.branches[2][0].size() == 1);
}

TEST_CASE("slowness contours trace near-circles at low frequency") {
    const auto spec = mono_spec();
    const auto s = compute_surfaces(spec, 96);
    const double level = 0.2;
    const auto lines = slowness_contours(s, spec, {level});
    REQUIRE(!lines.empty());

    const auto B = reciprocal_basis(spec);
    std::size_t nPoints = 0;
    double rMin = 1e30, rMax = 0.0;
    for (const auto& line : lines) {
        if (line.branch != 0) continue;
        CHECK(line.level == level);
        CHECK(line.points.size() >= 2);
        for (const auto& p : line.points) {
            double r = 1e30;
            for (int n1 = -1; n1 <= 2; ++n1)
                for (int n2 = -1; n2 <= 2; ++n2)
                    r = std::min(r, (p - B * Eigen::Vector2d(n1, n2)).norm());
            rMin = std::min(rMin, r);
            rMax = std::max(rMax, r);
            ++nPoints;
        }
    }
    REQUIRE(nPoints > 20);
    // The acoustic sheet is isotropic at this level: radii within 5%.
    CHECK((rMax - rMin) / rMax < 0.05);
    // And the radius matches the low-frequency slope omega = sqrt(3/8) k l.
    CHECK(rMax == doctest::Approx(level / std::sqrt(3.0 / 8)).epsilon(0.03));
}

TEST_CASE("contour points lie on the dispersion surface") {
    const auto spec = mono_spec(0.5);
    const auto s = compute_surfaces(spec, 96);
    const std::vector<double> levels{0.4, 0.9};
    const auto lines = slowness_contours(s, spec, levels);
    REQUIRE(!lines.empty());
    std::set<int> branchesSeen;
    for (const auto& line : lines) {
        branchesSeen.insert(line.branch);
        int checked = 0;
        for (const auto& p : line.points) {
            if (++checked > 8) break;  // spot-check; interpolation is smooth
            const auto d = dispersion(BlochVector<>{p.x(), p.y()}, spec);
            REQUIRE(static_cast<int>(d.omegas.size()) > line.branch);
            CHECK(d.omegas[line.branch] == doctest::Approx(line.level).epsilon(0.02));
        }
    }
    CHECK(branchesSeen.count(0) == 1);
}

TEST_CASE("contour polylines advance in small steps") {
    const auto spec = mono_spec();
    const auto s = compute_surfaces(spec, 64);
    const auto lines = slowness_contours(s, spec, {0.5});
    const double cellDiag = reciprocal_basis(spec).colwise().norm().sum() / 64.0;
    for (const auto& line : lines)
        for (std::size_t i = 1; i < line.points.size(); ++i)
            CHECK((line.points[i] - line.points[i - 1]).norm() <= 2 * cellDiag);
}
