#pragma once

#include "gyrolat/dispersion.hpp"
#include "gyrolat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

namespace gyrolat {

template <typename Scalar = double>
struct BandSurfaces {
    std::vector<BlochVector<Scalar>> kGrid;
    std::vector<std::vector<Scalar>> branches;  // ragged: branch count varies with regime
    int resolution{0};
};

template <typename Scalar>
BandSurfaces<Scalar> compute_surfaces(const LatticeSpec<Scalar>& spec, int resolution) {
    if (resolution < 16)
        throw std::invalid_argument("compute_surfaces: resolution must be >= 16");
    BandSurfaces<Scalar> s;
    s.resolution = resolution;
    s.kGrid = reciprocal_cell_samples(spec, resolution);
    s.branches.reserve(s.kGrid.size());
    for (const BlochVector<Scalar>& k : s.kGrid) s.branches.push_back(dispersion(k, spec).omegas);
    return s;
}

template <typename Scalar = double>
struct BandGap {
    Scalar omegaLow{0};
    Scalar omegaHigh{0};
    Scalar width() const { return omegaHigh - omegaLow; }
};

template <typename Scalar = double>
struct GapOptions {
    Scalar minWidth{Scalar(1e-3)};  // narrower holes are grid noise
    int probeCount{2000};
    std::uint64_t seed{12345};
};

// Total gaps: holes in the union of per-branch frequency ranges, the ranges
// taken over the sampled grid plus seeded random probe points.  Only interior
// holes count — the region above the highest band is not a gap.
template <typename Scalar>
std::vector<BandGap<Scalar>> band_gaps(const BandSurfaces<Scalar>& s,
                                       const LatticeSpec<Scalar>& spec, Scalar omegaMax,
                                       const GapOptions<Scalar>& opt = {}) {
    if (s.resolution < 64)
        throw std::invalid_argument("band_gaps: surfaces need resolution >= 64");
    std::vector<Scalar> lo, hi;
    const auto absorb = [&](const std::vector<Scalar>& omegas) {
        for (std::size_t j = 0; j < omegas.size(); ++j) {
            if (j >= lo.size()) {
                lo.push_back(omegas[j]);
                hi.push_back(omegas[j]);
            } else {
                lo[j] = std::min(lo[j], omegas[j]);
                hi[j] = std::max(hi[j], omegas[j]);
            }
        }
    };
    for (const std::vector<Scalar>& b : s.branches) absorb(b);

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<Scalar> unit(Scalar(0), Scalar(1));
    const Eigen::Matrix<Scalar, 2, 2> B = reciprocal_basis(spec);
    for (int p = 0; p < opt.probeCount; ++p) {
        const Eigen::Matrix<Scalar, 2, 1> k = B * Eigen::Matrix<Scalar, 2, 1>(unit(rng), unit(rng));
        absorb(dispersion(BlochVector<Scalar>{k.x(), k.y()}, spec).omegas);
    }

    std::vector<std::pair<Scalar, Scalar>> ranges;
    for (std::size_t j = 0; j < lo.size(); ++j) ranges.emplace_back(lo[j], hi[j]);
    std::sort(ranges.begin(), ranges.end());

    std::vector<BandGap<Scalar>> gaps;
    if (ranges.empty()) return gaps;
    Scalar cover = ranges.front().second;
    for (std::size_t j = 1; j < ranges.size(); ++j) {
        if (cover >= omegaMax) break;
        if (ranges[j].first - cover > opt.minWidth)
            gaps.push_back({cover, std::min(ranges[j].first, omegaMax)});
        cover = std::max(cover, ranges[j].second);
    }
    return gaps;
}

// omega(alpha, k) sheets along the diagonal k1 = k2 of the reciprocal space.
// kls holds k*l values; branch lists are ragged exactly as in dispersion.
template <typename Scalar = double>
struct AlphaSweep {
    std::vector<Scalar> alphas;
    std::vector<Scalar> kls;
    std::vector<std::vector<std::vector<Scalar>>> branches;  // [alpha][k]
};

template <typename Scalar>
AlphaSweep<Scalar> alpha_sweep_diagonal(const LatticeSpec<Scalar>& specTemplate,
                                        const std::vector<Scalar>& alphas,
                                        const std::vector<Scalar>& kls) {
    specTemplate.validate();
    AlphaSweep<Scalar> sweep;
    sweep.alphas = alphas;
    sweep.kls = kls;
    for (const Scalar a : alphas) {
        LatticeSpec<Scalar> spec = specTemplate;
        spec.alpha1 = spec.alpha2 = a;
        std::vector<std::vector<Scalar>> row;
        row.reserve(kls.size());
        for (const Scalar kl : kls) {
            const BlochVector<Scalar> k{kl / spec.l, kl / spec.l};
            row.push_back(dispersion(k, spec).omegas);
        }
        sweep.branches.push_back(std::move(row));
    }
    return sweep;
}

template <typename Scalar = double>
struct ContourLine {
    int branch{0};
    Scalar level{0};
    std::vector<Eigen::Matrix<Scalar, 2, 1>> points;  // k-space coordinates
};

namespace detail {

// Joins marching-squares segments into polylines by walking shared endpoints.
template <typename Scalar>
void chain_segments(
    std::vector<std::pair<Eigen::Matrix<Scalar, 2, 1>, Eigen::Matrix<Scalar, 2, 1>>>& segs,
    int branch, Scalar level, std::vector<ContourLine<Scalar>>& out) {
    using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
    const auto key = [](const Vec2& p) {
        const auto q = [](Scalar v) { return std::llround(static_cast<double>(v) * 1e7); };
        return std::make_pair(q(p.x()), q(p.y()));
    };
    std::multimap<std::pair<long long, long long>, std::size_t> ends;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        ends.emplace(key(segs[i].first), i);
        ends.emplace(key(segs[i].second), i);
    }
    std::vector<bool> used(segs.size(), false);
    for (std::size_t start = 0; start < segs.size(); ++start) {
        if (used[start]) continue;
        used[start] = true;
        std::vector<Vec2> line{segs[start].first, segs[start].second};
        for (int dir = 0; dir < 2; ++dir) {
            while (true) {
                const Vec2 tip = (dir == 0) ? line.back() : line.front();
                auto range = ends.equal_range(key(tip));
                std::size_t next = segs.size();
                for (auto it = range.first; it != range.second; ++it)
                    if (!used[it->second]) next = it->second;
                if (next == segs.size()) break;
                used[next] = true;
                const bool fromFirst = key(segs[next].first) == key(tip);
                const Vec2 far = fromFirst ? segs[next].second : segs[next].first;
                if (dir == 0)
                    line.push_back(far);
                else
                    line.insert(line.begin(), far);
            }
        }
        out.push_back({branch, level, std::move(line)});
    }
}

}  // namespace detail

// Marching-squares isolines of each dispersion branch over the sampled grid.
// Cells missing the branch at any corner (regime boundaries) are skipped, so
// lines close on themselves or stop at the sampled-cell boundary.
template <typename Scalar>
std::vector<ContourLine<Scalar>> slowness_contours(const BandSurfaces<Scalar>& s,
                                                   const LatticeSpec<Scalar>& spec,
                                                   const std::vector<Scalar>& levels) {
    using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
    const int res = s.resolution;
    const Eigen::Matrix<Scalar, 2, 2> B = reciprocal_basis(spec);
    std::size_t maxBranches = 0;
    for (const auto& b : s.branches) maxBranches = std::max(maxBranches, b.size());

    std::vector<ContourLine<Scalar>> out;
    for (std::size_t br = 0; br < maxBranches; ++br) {
        const auto value = [&](int i, int j, Scalar& v) {
            const auto& b = s.branches[static_cast<std::size_t>(i) * res + j];
            if (br >= b.size()) return false;
            v = b[br];
            return true;
        };
        for (const Scalar level : levels) {
            std::vector<std::pair<Vec2, Vec2>> segs;
            for (int i = 0; i + 1 < res; ++i) {
                for (int j = 0; j + 1 < res; ++j) {
                    Scalar f00, f10, f01, f11;
                    if (!value(i, j, f00) || !value(i + 1, j, f10) || !value(i, j + 1, f01) ||
                        !value(i + 1, j + 1, f11))
                        continue;
                    const auto cross = [&](Scalar fa, Scalar fb) {
                        return (fa < level) != (fb < level);
                    };
                    // Edge order: bottom (j), top (j+1), left (i), right (i+1).
                    Vec2 pts[4];
                    bool hit[4] = {false, false, false, false};
                    const auto lerp = [&](Scalar ia, Scalar ja, Scalar ib, Scalar jb, Scalar fa,
                                          Scalar fb) {
                        const Scalar t = (level - fa) / (fb - fa);
                        return Vec2(ia + t * (ib - ia), ja + t * (jb - ja));
                    };
                    const Scalar I = Scalar(i), J = Scalar(j);
                    if (cross(f00, f10)) { pts[0] = lerp(I, J, I + 1, J, f00, f10); hit[0] = true; }
                    if (cross(f01, f11)) { pts[1] = lerp(I, J + 1, I + 1, J + 1, f01, f11); hit[1] = true; }
                    if (cross(f00, f01)) { pts[2] = lerp(I, J, I, J + 1, f00, f01); hit[2] = true; }
                    if (cross(f10, f11)) { pts[3] = lerp(I + 1, J, I + 1, J + 1, f10, f11); hit[3] = true; }
                    int idx[4], nHit = 0;
                    for (int e = 0; e < 4; ++e)
                        if (hit[e]) idx[nHit++] = e;
                    const auto toK = [&](const Vec2& p) -> Vec2 { return B * (p / Scalar(res)); };
                    if (nHit == 2) {
                        segs.emplace_back(toK(pts[idx[0]]), toK(pts[idx[1]]));
                    } else if (nHit == 4) {
                        // Saddle cell: split by the centre value.
                        const Scalar centre = (f00 + f10 + f01 + f11) / 4;
                        if ((centre < level) == (f00 < level)) {
                            segs.emplace_back(toK(pts[0]), toK(pts[3]));
                            segs.emplace_back(toK(pts[1]), toK(pts[2]));
                        } else {
                            segs.emplace_back(toK(pts[0]), toK(pts[2]));
                            segs.emplace_back(toK(pts[1]), toK(pts[3]));
                        }
                    }
                }
            }
            detail::chain_segments(segs, static_cast<int>(br), level, out);
        }
    }
    return out;
}

}  // namespace gyrolat
