#include "gyrolat/continuum.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gyrolat {

namespace {

using Cd = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Cd>;
using Trip = Eigen::Triplet<Cd>;

constexpr double kPi = 3.14159265358979323846;
constexpr int kPmlOrder = 3;

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

std::string format_length(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// 1/s(x) for the complex coordinate stretch s = 1 + i*sigma(x)/omega with a
// cubic sigma profile that vanishes on the interior side of the collar.
Cd stretch_inverse(double x, double interiorHalf, double pmlDepth, double sigmaMax,
                   double omega) {
    const double depth = std::abs(x) - interiorHalf;
    if (depth <= 0 || pmlDepth <= 0) return Cd(1, 0);
    const double t = std::min(depth / pmlDepth, 1.0);
    const double sigma = sigmaMax * t * t * t;
    return 1.0 / Cd(1.0, sigma / omega);
}

int flat_index(int n, int i, int j, int comp) { return 2 * (i * n + j) + comp; }

double bilinear(const Eigen::MatrixXd& g, double gi, double gj) {
    const int n1 = static_cast<int>(g.rows()) - 1;
    const int n2 = static_cast<int>(g.cols()) - 1;
    const double ci = std::clamp(gi, 0.0, static_cast<double>(n1));
    const double cj = std::clamp(gj, 0.0, static_cast<double>(n2));
    const int i0 = std::min(static_cast<int>(ci), n1 - 1);
    const int j0 = std::min(static_cast<int>(cj), n2 - 1);
    const double wi = ci - i0;
    const double wj = cj - j0;
    return (1 - wi) * (1 - wj) * g(i0, j0) + wi * (1 - wj) * g(i0 + 1, j0) +
           (1 - wi) * wj * g(i0, j0 + 1) + wi * wj * g(i0 + 1, j0 + 1);
}

Cd bilinear_complex(const Eigen::MatrixXcd& g, double gi, double gj) {
    const int n1 = static_cast<int>(g.rows()) - 1;
    const int n2 = static_cast<int>(g.cols()) - 1;
    const double ci = std::clamp(gi, 0.0, static_cast<double>(n1));
    const double cj = std::clamp(gj, 0.0, static_cast<double>(n2));
    const int i0 = std::min(static_cast<int>(ci), n1 - 1);
    const int j0 = std::min(static_cast<int>(cj), n2 - 1);
    const double wi = ci - i0;
    const double wj = cj - j0;
    return (1 - wi) * (1 - wj) * g(i0, j0) + wi * (1 - wj) * g(i0 + 1, j0) +
           (1 - wi) * wj * g(i0, j0 + 1) + wi * wj * g(i0 + 1, j0 + 1);
}

}  // namespace

ContinuumScene build_scene(const SceneConfig& cfg) {
    if (!(cfg.omega > 0)) throw std::invalid_argument("scene: omega must be positive");
    if (!(cfg.ambientRho > 0)) throw std::invalid_argument("scene: density must be positive");
    if (!(cfg.ambientMu > 0)) throw std::invalid_argument("scene: shear modulus must be positive");
    if (!(cfg.ambientLambda >= 0))
        throw std::invalid_argument("scene: first Lame parameter must be nonnegative");
    if (cfg.pointsPerWavelength < 10)
        throw std::invalid_argument(
            "scene: fewer than 10 grid points per shear wavelength; raise points_per_wavelength");
    if (!(cfg.domainWavelengths > 0))
        throw std::invalid_argument("scene: domain size must be positive");
    if (cfg.pmlCells < 1) throw std::invalid_argument("scene: at least one PML cell is required");
    if (!(cfg.pmlReflection > 0 && cfg.pmlReflection < 1))
        throw std::invalid_argument("scene: PML reflection target must lie in (0, 1)");

    const double shearSpeed = std::sqrt(cfg.ambientMu / cfg.ambientRho);
    const double wavelength = 2 * kPi * shearSpeed / cfg.omega;

    ContinuumScene scene;
    scene.omega = cfg.omega;
    scene.pmlCells = cfg.pmlCells;
    scene.shearWavelength = wavelength;
    scene.h = wavelength / cfg.pointsPerWavelength;

    const int interiorNodes =
        static_cast<int>(std::lround(cfg.domainWavelengths * cfg.pointsPerWavelength)) + 1;
    scene.n = interiorNodes + 2 * cfg.pmlCells;
    const double interiorHalf = 0.5 * (interiorNodes - 1) * scene.h;
    scene.x0 = -interiorHalf - cfg.pmlCells * scene.h;

    const double pmlDepth = cfg.pmlCells * scene.h;
    scene.sigmaMax =
        -(kPmlOrder + 1) * shearSpeed * std::log(cfg.pmlReflection) / (2 * pmlDepth);

    scene.source = cfg.source;
    scene.source.position *= wavelength;
    const double srcMargin = interiorHalf - wavelength;
    if (std::abs(scene.source.position.x()) > srcMargin ||
        std::abs(scene.source.position.y()) > srcMargin)
        throw std::invalid_argument(
            "scene: source must sit at least one wavelength inside the PML-free region");
    if (!(scene.source.magnitude != 0) || !std::isfinite(scene.source.magnitude))
        throw std::invalid_argument("scene: source magnitude must be finite and nonzero");
    if (scene.source.kind == SourceKind::PointForce) {
        const double dn = scene.source.direction.norm();
        if (!(dn > 0)) throw std::invalid_argument("scene: force direction must be nonzero");
        scene.source.direction /= dn;
    }

    scene.lambda = Eigen::MatrixXd::Constant(scene.n, scene.n, cfg.ambientLambda);
    scene.mu = Eigen::MatrixXd::Constant(scene.n, scene.n, cfg.ambientMu);
    scene.rho = Eigen::MatrixXd::Constant(scene.n, scene.n, cfg.ambientRho);
    scene.alpha = Eigen::MatrixXd::Constant(scene.n, scene.n, cfg.uniformAlpha);

    if (cfg.inclusion) {
        CoatedInclusion inc = *cfg.inclusion;
        inc.center *= wavelength;
        inc.rInner *= wavelength;
        inc.rOuter *= wavelength;
        if (!(inc.rInner > 0 && inc.rOuter > inc.rInner))
            throw std::invalid_argument("scene: inclusion radii must satisfy 0 < inner < outer");
        if (!(inc.inclusionMu > 0))
            throw std::invalid_argument("scene: inclusion shear modulus must be positive");
        if (!(inc.inclusionLambda >= 0))
            throw std::invalid_argument("scene: inclusion Lame parameter must be nonnegative");
        const double reach =
            std::max(std::abs(inc.center.x()), std::abs(inc.center.y())) + inc.rOuter;
        if (reach > interiorHalf)
            throw std::invalid_argument("scene: inclusion extends into the PML (reach " +
                                        format_length(reach) + ", interior half-width " +
                                        format_length(interiorHalf) + ")");
        const double an = inc.symmetryAxis.norm();
        if (!(an > 0)) throw std::invalid_argument("scene: coating symmetry axis must be nonzero");
        inc.symmetryAxis /= an;
        scene.inclusion = inc;

        // Painter's order: the inclusion disc overwrites the ambient medium,
        // the coating ring overwrites both, each cell taking the value at
        // its node.
        for (int i = 0; i < scene.n; ++i) {
            for (int j = 0; j < scene.n; ++j) {
                const Eigen::Vector2d p(scene.coord(i), scene.coord(j));
                const Eigen::Vector2d d = p - inc.center;
                const double r = d.norm();
                if (r < inc.rInner) {
                    scene.lambda(i, j) = inc.inclusionLambda;
                    scene.mu(i, j) = inc.inclusionMu;
                } else if (r <= inc.rOuter && inc.coatingAlpha != 0) {
                    const double side =
                        inc.symmetryAxis.x() * d.y() - inc.symmetryAxis.y() * d.x();
                    double a = (side > 0) ? inc.coatingAlpha : (side < 0 ? -inc.coatingAlpha : 0);
                    if (inc.flipHandedness) a = -a;
                    scene.alpha(i, j) = a;
                }
            }
        }
    }
    return scene;
}

SpMat assemble_operator(const ContinuumScene& scene) {
    const int n = scene.n;
    if (n < 3) throw std::invalid_argument("operator: grid too small");
    if (scene.mu.minCoeff() <= 0)
        throw std::invalid_argument("operator: shear modulus must be positive everywhere");
    if (scene.rho.minCoeff() <= 0)
        throw std::invalid_argument("operator: density must be positive everywhere");

    const double h = scene.h;
    const double w2 = scene.omega * scene.omega;
    const double interiorHalf = scene.interiorHalf();
    const double pmlDepth = scene.pmlCells * h;

    // Per-axis inverse stretches at nodes and at cell midpoints; the same
    // profile serves both axes because the grid is square and centered.
    std::vector<Cd> sNode(n), sHalf(n - 1);
    for (int i = 0; i < n; ++i)
        sNode[i] = stretch_inverse(scene.coord(i), interiorHalf, pmlDepth, scene.sigmaMax,
                                   scene.omega);
    for (int i = 0; i + 1 < n; ++i)
        sHalf[i] = stretch_inverse(scene.coord(i) + 0.5 * h, interiorHalf, pmlDepth,
                                   scene.sigmaMax, scene.omega);

    const auto lp2m = [&](int i, int j) { return scene.lambda(i, j) + 2 * scene.mu(i, j); };

    std::vector<Trip> trips;
    trips.reserve(static_cast<size_t>(n) * n * 22);
    const Cd imagUnit(0, 1);

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int row1 = flat_index(n, i, j, 0);
            const int row2 = flat_index(n, i, j, 1);
            if (i == 0 || j == 0 || i == n - 1 || j == n - 1) {
                trips.emplace_back(row1, row1, Cd(1, 0));
                trips.emplace_back(row2, row2, Cd(1, 0));
                continue;
            }

            const Cd px = sNode[i] / (h * h);
            const Cd py = sNode[j] / (h * h);
            const Cd cross = sNode[i] * sNode[j] / (4 * h * h);

            // div(lambda tr(E) I + 2 mu E) acting on u1: normal fluxes use
            // harmonic-mean coefficients at cell midpoints, the mixed terms
            // a centered difference of centered differences.
            const Cd e1 = px * harmonic_mean(lp2m(i, j), lp2m(i + 1, j)) * sHalf[i];
            const Cd w1 = px * harmonic_mean(lp2m(i - 1, j), lp2m(i, j)) * sHalf[i - 1];
            const Cd n1 = py * harmonic_mean(scene.mu(i, j), scene.mu(i, j + 1)) * sHalf[j];
            const Cd s1 = py * harmonic_mean(scene.mu(i, j - 1), scene.mu(i, j)) * sHalf[j - 1];
            trips.emplace_back(row1, flat_index(n, i + 1, j, 0), e1);
            trips.emplace_back(row1, flat_index(n, i - 1, j, 0), w1);
            trips.emplace_back(row1, flat_index(n, i, j + 1, 0), n1);
            trips.emplace_back(row1, flat_index(n, i, j - 1, 0), s1);
            trips.emplace_back(row1, row1,
                               -(e1 + w1 + n1 + s1) + w2 * scene.rho(i, j));
            trips.emplace_back(row1, flat_index(n, i + 1, j + 1, 1),
                               cross * (scene.lambda(i + 1, j) + scene.mu(i, j + 1)));
            trips.emplace_back(row1, flat_index(n, i - 1, j - 1, 1),
                               cross * (scene.lambda(i - 1, j) + scene.mu(i, j - 1)));
            trips.emplace_back(row1, flat_index(n, i + 1, j - 1, 1),
                               -cross * (scene.lambda(i + 1, j) + scene.mu(i, j - 1)));
            trips.emplace_back(row1, flat_index(n, i - 1, j + 1, 1),
                               -cross * (scene.lambda(i - 1, j) + scene.mu(i, j + 1)));
            trips.emplace_back(row1, row2, -imagUnit * w2 * scene.alpha(i, j));

            const Cd e2 = px * harmonic_mean(scene.mu(i, j), scene.mu(i + 1, j)) * sHalf[i];
            const Cd w2b = px * harmonic_mean(scene.mu(i - 1, j), scene.mu(i, j)) * sHalf[i - 1];
            const Cd n2 = py * harmonic_mean(lp2m(i, j), lp2m(i, j + 1)) * sHalf[j];
            const Cd s2 = py * harmonic_mean(lp2m(i, j - 1), lp2m(i, j)) * sHalf[j - 1];
            trips.emplace_back(row2, flat_index(n, i + 1, j, 1), e2);
            trips.emplace_back(row2, flat_index(n, i - 1, j, 1), w2b);
            trips.emplace_back(row2, flat_index(n, i, j + 1, 1), n2);
            trips.emplace_back(row2, flat_index(n, i, j - 1, 1), s2);
            trips.emplace_back(row2, row2,
                               -(e2 + w2b + n2 + s2) + w2 * scene.rho(i, j));
            trips.emplace_back(row2, flat_index(n, i + 1, j + 1, 0),
                               cross * (scene.lambda(i, j + 1) + scene.mu(i + 1, j)));
            trips.emplace_back(row2, flat_index(n, i - 1, j - 1, 0),
                               cross * (scene.lambda(i, j - 1) + scene.mu(i - 1, j)));
            trips.emplace_back(row2, flat_index(n, i + 1, j - 1, 0),
                               -cross * (scene.lambda(i, j - 1) + scene.mu(i + 1, j)));
            trips.emplace_back(row2, flat_index(n, i - 1, j + 1, 0),
                               -cross * (scene.lambda(i, j + 1) + scene.mu(i - 1, j)));
            trips.emplace_back(row2, row1, imagUnit * w2 * scene.alpha(i, j));
        }
    }

    SpMat A(2 * n * n, 2 * n * n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    return A;
}

Eigen::VectorXcd source_vector(const ContinuumScene& scene) {
    const int n = scene.n;
    const double h = scene.h;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(2 * n * n);
    const Source& src = scene.source;

    if (src.kind == SourceKind::PointForce) {
        const double gi = (src.position.x() - scene.x0) / h;
        const double gj = (src.position.y() - scene.x0) / h;
        const int i0 = std::clamp(static_cast<int>(std::floor(gi)), 0, n - 2);
        const int j0 = std::clamp(static_cast<int>(std::floor(gj)), 0, n - 2);
        const double wi = std::clamp(gi - i0, 0.0, 1.0);
        const double wj = std::clamp(gj - j0, 0.0, 1.0);
        const double weights[2][2] = {{(1 - wi) * (1 - wj), (1 - wi) * wj},
                                      {wi * (1 - wj), wi * wj}};
        const double scale = src.magnitude / (h * h);
        for (int di = 0; di < 2; ++di) {
            for (int dj = 0; dj < 2; ++dj) {
                const double w = weights[di][dj] * scale;
                b[flat_index(n, i0 + di, j0 + dj, 0)] -= w * src.direction.x();
                b[flat_index(n, i0 + di, j0 + dj, 1)] -= w * src.direction.y();
            }
        }
        return b;
    }

    // Point moment: tangential forces on the nodes of a disc of radius 2h,
    // snapped to the nearest node so opposite nodes cancel exactly and the
    // net force vanishes to machine precision.
    const int ic = static_cast<int>(std::lround((src.position.x() - scene.x0) / h));
    const int jc = static_cast<int>(std::lround((src.position.y() - scene.x0) / h));
    double r2sum = 0;
    for (int di = -2; di <= 2; ++di)
        for (int dj = -2; dj <= 2; ++dj) {
            const int r2 = di * di + dj * dj;
            if (r2 > 0 && r2 <= 4) r2sum += r2 * h * h;
        }
    const double kappa = src.magnitude / (h * h * r2sum);
    for (int di = -2; di <= 2; ++di) {
        for (int dj = -2; dj <= 2; ++dj) {
            const int r2 = di * di + dj * dj;
            if (r2 == 0 || r2 > 4) continue;
            const int i = ic + di;
            const int j = jc + dj;
            if (i < 1 || j < 1 || i >= n - 1 || j >= n - 1)
                throw std::invalid_argument("source: moment disc leaves the grid");
            b[flat_index(n, i, j, 0)] -= kappa * (-dj * h);
            b[flat_index(n, i, j, 1)] -= kappa * (di * h);
        }
    }
    return b;
}

ComplexField solve(const ContinuumScene& scene, SolveReport* report) {
    const SpMat A = assemble_operator(scene);
    const Eigen::VectorXcd b = source_vector(scene);
    const double bNorm = b.norm();
    if (!(bNorm > 0)) throw std::invalid_argument("solve: empty load vector");

    const double tol = 1e-6;
    Eigen::VectorXcd u;
    double residual = std::numeric_limits<double>::infinity();
    std::string method;
    std::vector<double> history;

    if (scene.n <= 500) {
        Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(A);
        if (lu.info() == Eigen::Success) {
            u = lu.solve(b);
            residual = (A * u - b).norm() / bNorm;
            method = "sparse-lu";
            history.push_back(residual);
        }
    }

    if (!(residual <= tol)) {
        Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<Cd>> krylov;
        krylov.preconditioner().setDroptol(1e-6);
        krylov.preconditioner().setFillfactor(40);
        krylov.setTolerance(1e-9);
        krylov.compute(A);
        if (krylov.info() != Eigen::Success)
            throw std::runtime_error("solve: preconditioner construction failed");
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(b.size());
        krylov.setMaxIterations(250);
        for (int round = 0; round < 8; ++round) {
            x = krylov.solveWithGuess(b, x);
            residual = (A * x - b).norm() / bNorm;
            history.push_back(residual);
            if (residual <= tol) break;
        }
        method = method.empty() ? "bicgstab-ilut" : "sparse-lu+bicgstab-ilut";
        u = x;
        if (!(residual <= tol)) {
            std::string msg = "solve: relative residual " + format_length(residual) +
                              " exceeds 1e-6; history:";
            for (double r : history) msg += " " + format_length(r);
            throw std::runtime_error(msg);
        }
    }

    ComplexField f;
    f.n = scene.n;
    f.pmlCells = scene.pmlCells;
    f.h = scene.h;
    f.x0 = scene.x0;
    f.omega = scene.omega;
    f.u1.resize(scene.n, scene.n);
    f.u2.resize(scene.n, scene.n);
    for (int i = 0; i < scene.n; ++i)
        for (int j = 0; j < scene.n; ++j) {
            f.u1(i, j) = u[flat_index(scene.n, i, j, 0)];
            f.u2(i, j) = u[flat_index(scene.n, i, j, 1)];
        }
    if (report) {
        report->residual = residual;
        report->method = method;
        report->history = history;
    }
    return f;
}

Eigen::MatrixXd field_amplitude(const ComplexField& f) {
    return (f.u1.cwiseAbs2() + f.u2.cwiseAbs2()).cwiseSqrt();
}

std::vector<double> diagonal_profile(const ComplexField& f, int samples) {
    if (samples < 2) throw std::invalid_argument("profile: need at least two samples");
    const Eigen::MatrixXd amp = field_amplitude(f);
    const int top = f.n - 1;
    std::vector<double> out(samples);
    for (int s = 0; s < samples; ++s) {
        const double t = static_cast<double>(s) / (samples - 1);
        out[s] = bilinear(amp, t * top, (1 - t) * top);
    }
    return out;
}

double shadow_metric(const ComplexField& f, const ContinuumScene& scene,
                     const ShadowSector& sector) {
    if (!scene.inclusion)
        throw std::invalid_argument("shadow: scene has no inclusion to cast one");
    const CoatedInclusion& inc = *scene.inclusion;
    Eigen::Vector2d axis = inc.center - scene.source.position;
    const double an = axis.norm();
    if (!(an > 0)) throw std::invalid_argument("shadow: source coincides with inclusion center");
    axis /= an;
    const double rLow = sector.rLowFactor * inc.rOuter;
    const double rHigh = sector.rHighFactor * inc.rOuter;
    const double cosLimit = std::cos(sector.halfAngleDeg * kPi / 180.0);
    if (!(rHigh > rLow && rLow > 0) || sector.halfAngleDeg <= 0 || sector.halfAngleDeg > 90)
        throw std::invalid_argument("shadow: malformed sector");

    const double interiorHalf = scene.interiorHalf();
    const double phi0 = std::atan2(axis.y(), axis.x());
    const double halfAngle = sector.halfAngleDeg * kPi / 180.0;
    for (int k = 0; k <= 64; ++k) {
        const double phi = phi0 - halfAngle + 2 * halfAngle * k / 64;
        const Eigen::Vector2d p = inc.center + rHigh * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        if (std::max(std::abs(p.x()), std::abs(p.y())) > interiorHalf)
            throw std::invalid_argument("shadow: sector reaches into the PML");
    }

    const Eigen::MatrixXd amp = field_amplitude(f);
    double sum = 0;
    long count = 0;
    for (int i = 0; i < f.n; ++i) {
        for (int j = 0; j < f.n; ++j) {
            const Eigen::Vector2d d(f.coord(i) - inc.center.x(), f.coord(j) - inc.center.y());
            const double r = d.norm();
            if (r < rLow || r > rHigh) continue;
            if (d.dot(axis) < cosLimit * r) continue;
            sum += amp(i, j) * amp(i, j);
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("shadow: sector contains no grid nodes");
    return std::sqrt(sum / count);
}

double mirror_asymmetry(const ComplexField& f, const ContinuumScene& scene) {
    const double gj = (scene.source.position.y() - f.x0) / f.h;
    const int js = static_cast<int>(std::lround(gj));
    if (std::abs(gj - js) > 1e-9)
        throw std::invalid_argument("mirror: source must lie on a grid row");
    const Eigen::MatrixXd amp = field_amplitude(f);
    const int lo = f.pmlCells;
    const int hi = f.n - 1 - f.pmlCells;
    double num = 0, den = 0;
    for (int i = lo; i <= hi; ++i) {
        for (int j = lo; j <= hi; ++j) {
            const int jm = 2 * js - j;
            if (jm < lo || jm > hi) continue;
            const double d = amp(i, j) - amp(i, jm);
            num += d * d;
            den += amp(i, j) * amp(i, j);
        }
    }
    if (!(den > 0)) throw std::invalid_argument("mirror: field vanishes on the interior");
    return std::sqrt(num / den);
}

double radial_wavelength(const ComplexField& f, const ContinuumScene& scene, double rLow,
                         double rHigh, int rays) {
    if (!(rHigh > rLow && rLow > 0)) throw std::invalid_argument("wavelength: bad radial window");
    if (rays < 1) throw std::invalid_argument("wavelength: need at least one ray");
    const Eigen::Vector2d c = scene.source.position;
    const double step = f.h / 2;
    const int nSamp = static_cast<int>((rHigh - rLow) / step) + 1;
    if (nSamp < 8) throw std::invalid_argument("wavelength: radial window too narrow");

    double lambdaSum = 0;
    for (int ray = 0; ray < rays; ++ray) {
        const double phi = 2 * kPi * ray / rays + kPi / rays;
        const Eigen::Vector2d dir(std::cos(phi), std::sin(phi));
        const Eigen::Vector2d tang(-dir.y(), dir.x());
        // Least-squares slope of the unwrapped phase of the azimuthal
        // component, which carries the propagating rotation.
        double sumR = 0, sumP = 0, sumRR = 0, sumRP = 0;
        double prev = 0, offset = 0;
        for (int s = 0; s < nSamp; ++s) {
            const double r = rLow + s * step;
            const Eigen::Vector2d p = c + r * dir;
            const double gi = (p.x() - f.x0) / f.h;
            const double gjj = (p.y() - f.x0) / f.h;
            const Cd ut = tang.x() * bilinear_complex(f.u1, gi, gjj) +
                          tang.y() * bilinear_complex(f.u2, gi, gjj);
            double ph = std::arg(ut);
            if (s > 0) {
                while (ph + offset - prev > kPi) offset -= 2 * kPi;
                while (ph + offset - prev < -kPi) offset += 2 * kPi;
            }
            ph += offset;
            prev = ph;
            sumR += r;
            sumP += ph;
            sumRR += r * r;
            sumRP += r * ph;
        }
        const double slope = (nSamp * sumRP - sumR * sumP) / (nSamp * sumRR - sumR * sumR);
        if (!(std::abs(slope) > 0))
            throw std::invalid_argument("wavelength: phase is flat along a ray");
        lambdaSum += 2 * kPi / std::abs(slope);
    }
    return lambdaSum / rays;
}

double angular_variation(const ComplexField& f, const ContinuumScene& scene, double radius,
                         int samples) {
    if (!(radius > 0)) throw std::invalid_argument("variation: radius must be positive");
    if (samples < 8) throw std::invalid_argument("variation: need at least eight samples");
    const Eigen::MatrixXd amp = field_amplitude(f);
    const Eigen::Vector2d c = scene.source.position;
    double lo = std::numeric_limits<double>::infinity(), hi = 0, sum = 0;
    for (int s = 0; s < samples; ++s) {
        const double phi = 2 * kPi * s / samples;
        const Eigen::Vector2d p = c + radius * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        const double a = bilinear(amp, (p.x() - f.x0) / f.h, (p.y() - f.x0) / f.h);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
        sum += a;
    }
    const double mean = sum / samples;
    if (!(mean > 0)) throw std::invalid_argument("variation: field vanishes on the circle");
    return (hi - lo) / mean;
}

double interior_l2_difference(const ComplexField& a, const ComplexField& b, double margin) {
    const ComplexField& small = (a.n <= b.n) ? a : b;
    const ComplexField& big = (a.n <= b.n) ? b : a;
    if (std::abs(a.h - b.h) > 1e-12 * a.h)
        throw std::invalid_argument("interior difference: grid spacings differ");
    const int shift2 = big.n - small.n;
    if (shift2 % 2 != 0)
        throw std::invalid_argument("interior difference: grids are not concentric");
    const int shift = shift2 / 2;
    const int m = std::max(0, static_cast<int>(std::ceil(margin / small.h)));
    const int lo = small.pmlCells + m;
    const int hi = small.n - 1 - small.pmlCells - m;
    if (hi <= lo) throw std::invalid_argument("interior difference: margin leaves no interior");
    double num = 0, den = 0;
    for (int i = lo; i <= hi; ++i) {
        for (int j = lo; j <= hi; ++j) {
            num += std::norm(small.u1(i, j) - big.u1(i + shift, j + shift)) +
                   std::norm(small.u2(i, j) - big.u2(i + shift, j + shift));
            den += std::norm(big.u1(i + shift, j + shift)) +
                   std::norm(big.u2(i + shift, j + shift));
        }
    }
    if (!(den > 0)) throw std::invalid_argument("interior difference: reference field vanishes");
    return std::sqrt(num / den);
}

}  // namespace gyrolat
