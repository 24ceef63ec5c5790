#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace gyrolat {

enum class SourceKind { PointForce, PointMoment };

struct Source {
    SourceKind kind{SourceKind::PointForce};
    Eigen::Vector2d position{0, 0};
    Eigen::Vector2d direction{1, 0};  // force direction; ignored for moments
    double magnitude{1};
};

// Circular inclusion with an optional chiral coating split into two
// semi-rings of opposite spinner handedness by the symmetry axis.
struct CoatedInclusion {
    Eigen::Vector2d center{0, 0};
    double rInner{1};
    double rOuter{1.5};
    double inclusionLambda{23};
    double inclusionMu{12};
    double coatingAlpha{0};  // 0 = bare inclusion
    Eigen::Vector2d symmetryAxis{1, 0};
    bool flipHandedness{false};
};

// All lengths in ambient shear wavelengths 2*pi*sqrt(mu/rho)/omega, so a
// scene keeps its proportions when omega changes.
struct SceneConfig {
    double omega{10};
    double ambientRho{1};
    double ambientMu{1};
    double ambientLambda{1};
    double uniformAlpha{0};
    int pointsPerWavelength{16};
    double domainWavelengths{12};
    int pmlCells{20};
    double pmlReflection{1e-6};
    Source source;  // position in wavelength units
    std::optional<CoatedInclusion> inclusion;  // geometry in wavelength units
};

// Rasterized coefficient grids; index i is x, index j is y, node coordinate
// coord(i) = x0 + i*h.  The PML collar of pmlCells nodes lies outside the
// physical interior of half-width interiorHalf().
struct ContinuumScene {
    int n{0};
    double h{0};
    double omega{0};
    int pmlCells{0};
    double sigmaMax{0};
    double x0{0};
    double shearWavelength{0};
    Eigen::MatrixXd lambda, mu, rho, alpha;
    Source source;  // position in physical coordinates
    std::optional<CoatedInclusion> inclusion;  // geometry in physical coordinates

    double coord(int i) const { return x0 + i * h; }
    double interiorHalf() const { return -x0 - pmlCells * h; }
};

ContinuumScene build_scene(const SceneConfig& cfg);

struct ComplexField {
    Eigen::MatrixXcd u1, u2;
    int n{0};
    int pmlCells{0};
    double h{0};
    double x0{0};
    double omega{0};

    double coord(int i) const { return x0 + i * h; }
};

Eigen::SparseMatrix<std::complex<double>> assemble_operator(const ContinuumScene& scene);
Eigen::VectorXcd source_vector(const ContinuumScene& scene);

struct SolveReport {
    double residual{0};
    std::string method;
    std::vector<double> history;  // residual trail when iteration was needed
};

ComplexField solve(const ContinuumScene& scene, SolveReport* report = nullptr);

Eigen::MatrixXd field_amplitude(const ComplexField& f);

// Amplitude along the anti-diagonal from the upper-left corner (min x,
// max y) to the lower-right corner, bilinearly interpolated.
std::vector<double> diagonal_profile(const ComplexField& f, int samples = 512);

struct ShadowSector {
    double halfAngleDeg{30};
    double rLowFactor{1};   // multiples of the inclusion's outer radius
    double rHighFactor{3};
};

// RMS amplitude over the wedge behind the inclusion (opposite the source).
double shadow_metric(const ComplexField& f, const ContinuumScene& scene,
                     const ShadowSector& sector = {});

// Relative L2 difference between the amplitude grid and its reflection
// about the horizontal line through the source, PML excluded.
double mirror_asymmetry(const ComplexField& f, const ContinuumScene& scene);

// Dominant radial wavelength from the phase slope of the azimuthal
// component along rays leaving the source, sampled in r in [rLow, rHigh].
double radial_wavelength(const ComplexField& f, const ContinuumScene& scene, double rLow,
                         double rHigh, int rays = 8);

// (max - min) / mean of the amplitude on a circle around the source.
double angular_variation(const ComplexField& f, const ContinuumScene& scene, double radius,
                         int samples = 256);

// Relative L2 difference over the common interior, excluding nodes within
// `margin` of the smaller field's PML.  Grids must share h and be
// concentric (as produced by enlarging domainWavelengths).
double interior_l2_difference(const ComplexField& a, const ComplexField& b, double margin);

}  // namespace gyrolat
