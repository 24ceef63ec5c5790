#include <CLI11.hpp>
#include <json.hpp>

#include <gyrolat/bands.hpp>
#include <gyrolat/config.hpp>
#include <gyrolat/continuum.hpp>
#include <gyrolat/csv.hpp>
#include <gyrolat/dispersion.hpp>
#include <gyrolat/gyro.hpp>
#include <gyrolat/lattice.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using gyrolat::format_float;
using gyrolat::Table;

constexpr const char* kArtifactVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int thread_count_from_env() {
    const char* env = std::getenv("GYROLAT_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1)
        throw std::invalid_argument("GYROLAT_THREADS must be a positive integer, got '" +
                                    std::string(env) + "'");
    return static_cast<int>(n);
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end == item.c_str() || *end != '\0')
            throw std::invalid_argument(what + ": not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument(what + ": empty list");
    return out;
}

std::pair<double, double> parse_double_pair(const std::string& text, const std::string& what) {
    const std::vector<double> v = parse_double_list(text, what);
    if (v.size() != 2) throw std::invalid_argument(what + ": expected two comma-separated values");
    return {v[0], v[1]};
}

std::vector<double> parse_range(const std::string& text, const std::string& what) {
    const std::vector<double> v = parse_double_list(text, what);
    if (v.size() != 3) throw std::invalid_argument(what + ": expected min,max,count");
    const int count = static_cast<int>(std::lround(v[2]));
    if (count < 2 || v[2] != count)
        throw std::invalid_argument(what + ": count must be an integer >= 2");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = v[0] + (v[1] - v[0]) * i / (count - 1);
    return out;
}

// Collects the output files of one run and writes the closing manifest; the
// timestamp lives only here so data files stay byte-reproducible.
struct RunOutput {
    std::optional<fs::path> dir;
    bool plotdata{false};
    std::string command;
    int threads{1};
    json parameters = json::object();
    std::vector<std::string> files;

    void set_dir(const std::string& path) {
        dir = fs::path(path);
        fs::create_directories(*dir);
    }

    void table(const std::string& stem, const Table& t) {
        if (!dir) {
            if (plotdata)
                gyrolat::write_plotdata(std::cout, t);
            else
                gyrolat::write_csv(std::cout, t);
            return;
        }
        const fs::path path = *dir / (stem + (plotdata ? ".dat" : ".csv"));
        if (plotdata)
            gyrolat::write_plotdata_file(path.string(), t);
        else
            gyrolat::write_csv_file(path.string(), t);
        files.push_back(path.filename().string());
    }

    void json_file(const std::string& name, const json& j, bool record = true) {
        if (!dir) {
            std::cout << j.dump(2) << "\n";
            return;
        }
        const fs::path path = *dir / name;
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << j.dump(2) << "\n";
        if (record) files.push_back(name);
    }

    void raw_file(const std::string& name, const char* data, std::size_t bytes) {
        if (!dir) throw std::runtime_error("binary output requires --out");
        const fs::path path = *dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out.write(data, static_cast<std::streamsize>(bytes));
        files.push_back(name);
    }

    void finish() {
        if (!dir) return;
        json m;
        m["command"] = command;
        m["artifact_version"] = kArtifactVersion;
        m["threads"] = threads;
        m["parameters"] = parameters;
        m["outputs"] = files;
        m["generated_at"] = utc_timestamp();
        json_file("manifest.json", m, false);
    }
};

struct LatticeCli {
    std::string specPath;

    gyrolat::LatticeSpec<double> resolve(json& params) const {
        gyrolat::ParsedConfig cfg = specPath.empty() ? gyrolat::ParsedConfig{}
                                                     : gyrolat::parse_config_file(specPath);
        gyrolat::LatticeSpec<double> spec;
        const std::string flavor = cfg.get("flavor", "monatomic");
        if (flavor == "monatomic")
            spec.flavor = gyrolat::LatticeFlavor::Monatomic;
        else if (flavor == "biatomic")
            spec.flavor = gyrolat::LatticeFlavor::Biatomic;
        else
            throw std::invalid_argument("lattice config: flavor must be monatomic or biatomic, got '" +
                                        flavor + "'");
        spec.l = cfg.get_double("l", 1);
        spec.c = cfg.get_double("c", 1);
        if (cfg.has("m")) {
            if (cfg.has("m1") || cfg.has("m2"))
                throw std::invalid_argument("lattice config: give either m or m1/m2, not both");
            spec.m1 = spec.m2 = cfg.get_double("m", 1);
        } else {
            spec.m1 = cfg.get_double("m1", 1);
            spec.m2 = cfg.get_double("m2", spec.m1);
        }
        if (cfg.has("alpha")) {
            if (cfg.has("alpha1") || cfg.has("alpha2"))
                throw std::invalid_argument(
                    "lattice config: give either alpha or alpha1/alpha2, not both");
            spec.alpha1 = spec.alpha2 = cfg.get_double("alpha", 0);
        } else {
            spec.alpha1 = cfg.get_double("alpha1", 0);
            spec.alpha2 = cfg.get_double("alpha2", spec.alpha1);
        }
        cfg.require_all_consumed();
        spec.validate();

        json& latJson = params["lattice"];
        latJson["flavor"] =
            (spec.flavor == gyrolat::LatticeFlavor::Monatomic) ? "monatomic" : "biatomic";
        latJson["l"] = spec.l;
        latJson["c"] = spec.c;
        latJson["m1"] = spec.m1;
        latJson["m2"] = spec.m2;
        latJson["alpha1"] = spec.alpha1;
        latJson["alpha2"] = spec.alpha2;
        return spec;
    }
};

json gaps_to_json(const std::vector<gyrolat::BandGap<double>>& gaps) {
    json out = json::array();
    for (const auto& g : gaps) {
        json j;
        j["omega_low"] = g.omegaLow;
        j["omega_high"] = g.omegaHigh;
        j["width"] = g.width();
        out.push_back(j);
    }
    return out;
}

double max_branch_omega(const gyrolat::BandSurfaces<double>& s) {
    double top = 0;
    for (const auto& b : s.branches)
        for (double w : b) top = std::max(top, w);
    return top;
}

void append_band_columns(std::vector<std::string>& header, const char* prefix, std::size_t count) {
    for (std::size_t j = 0; j < count; ++j)
        header.push_back(std::string(prefix) + "_" + std::to_string(j + 1));
}

int run_gyro(RunOutput& out, double I0, double I, double h, double omega,
             const std::string& branch) {
    gyrolat::SpinnerBody<double> body;
    body.I0 = I0;
    body.I = I;
    body.h = h;
    body.branch = (branch == "minus") ? gyrolat::SignBranch::Minus : gyrolat::SignBranch::Plus;

    const double phiDot = gyrolat::precession_rate(body, omega);
    const double Omega = gyrolat::compatible_spin_rate(body, omega);
    const double alpha = gyrolat::spinner_constant(body);

    out.parameters["I0"] = I0;
    out.parameters["I"] = I;
    out.parameters["h"] = h;
    out.parameters["omega"] = omega;
    out.parameters["branch"] = branch;

    Table t;
    t.header = {"I0", "I", "h", "omega", "branch", "phi_dot", "Omega", "alpha"};
    t.add_row({format_float(I0), format_float(I), format_float(h), format_float(omega), branch,
               format_float(phiDot), format_float(Omega), format_float(alpha)});
    out.table("gyro", t);
    out.finish();
    return 0;
}

int run_dispersion(RunOutput& out, const LatticeCli& lat, const std::string& kText, bool oracle,
                   double omegaMax, int detSteps) {
    const gyrolat::LatticeSpec<double> spec = lat.resolve(out.parameters);
    const auto [k1l, k2l] = parse_double_pair(kText, "--k");
    const gyrolat::BlochVector<double> k{k1l / spec.l, k2l / spec.l};

    const gyrolat::DispersionBranches<double> d = gyrolat::dispersion(k, spec);

    out.parameters["k1l"] = k1l;
    out.parameters["k2l"] = k2l;
    out.parameters["oracle"] = oracle;
    if (oracle) {
        out.parameters["omega_max"] = omegaMax;
        out.parameters["det_steps"] = detSteps;
    }

    Table t;
    t.header = {"k1l", "k2l", "regime", "discarded"};
    append_band_columns(t.header, "omega", d.omegas.size());
    std::vector<std::string> row{format_float(k1l), format_float(k2l),
                                 gyrolat::regime_name(d.regime), std::to_string(d.discarded)};
    for (double w : d.omegas) row.push_back(format_float(w));

    if (oracle) {
        const gyrolat::DetScanResult<double> scan =
            gyrolat::dispersion_det_scan(k, spec, omegaMax, detSteps);
        append_band_columns(t.header, "det_omega", scan.omegas.size());
        t.header.push_back("det_expected_count");
        t.header.push_back("det_count_mismatch");
        for (double w : scan.omegas) row.push_back(format_float(w));
        row.push_back(std::to_string(scan.expectedCount));
        row.push_back(scan.countMismatch ? "1" : "0");
    }
    t.add_row(std::move(row));
    out.table("dispersion", t);
    out.finish();
    return 0;
}

int run_bands(RunOutput& out, const LatticeCli& lat, int resolution, double omegaMax,
              double gapMinWidth, int gapProbes, std::uint64_t gapSeed, bool surfacesToo) {
    const gyrolat::LatticeSpec<double> spec = lat.resolve(out.parameters);
    const gyrolat::BandSurfaces<double> s = gyrolat::compute_surfaces(spec, resolution);
    if (!(omegaMax > 0)) omegaMax = max_branch_omega(s);

    gyrolat::GapOptions<double> opt;
    opt.minWidth = gapMinWidth;
    opt.probeCount = gapProbes;
    opt.seed = gapSeed;
    // Gap detection needs a dense grid; a coarse surfaces-only run reports null.
    const bool scanGaps = !surfacesToo || resolution >= 64;
    std::vector<gyrolat::BandGap<double>> gaps;
    if (scanGaps) gaps = gyrolat::band_gaps(s, spec, omegaMax, opt);

    out.parameters["resolution"] = resolution;
    out.parameters["omega_max"] = omegaMax;
    out.parameters["gap_min_width"] = opt.minWidth;
    out.parameters["gap_probes"] = opt.probeCount;
    out.parameters["gap_seed"] = opt.seed;

    if (surfacesToo) {
        std::size_t maxBranches = 0;
        for (const auto& b : s.branches) maxBranches = std::max(maxBranches, b.size());
        Table t;
        t.header = {"k1l", "k2l"};
        append_band_columns(t.header, "omega", maxBranches);
        for (std::size_t i = 0; i < s.kGrid.size(); ++i) {
            std::vector<std::string> row{format_float(s.kGrid[i].k1 * spec.l),
                                         format_float(s.kGrid[i].k2 * spec.l)};
            for (double w : s.branches[i]) row.push_back(format_float(w));
            t.add_row(std::move(row));
        }
        out.table("bands", t);
    } else {
        Table t;
        t.header = {"omega_low", "omega_high", "width"};
        for (const auto& g : gaps)
            t.add_row({format_float(g.omegaLow), format_float(g.omegaHigh),
                       format_float(g.width())});
        out.table("gaps", t);
    }

    json summary;
    summary["regime"] = gyrolat::regime_name(gyrolat::classify_regime(spec));
    summary["expected_branch_count"] = gyrolat::expected_branch_count(spec);
    summary["resolution"] = resolution;
    summary["omega_max"] = omegaMax;
    summary["gaps"] = scanGaps ? gaps_to_json(gaps) : json();
    out.json_file("summary.json", summary);
    out.finish();
    return 0;
}

int run_sweep_alpha(RunOutput& out, const LatticeCli& lat, const std::string& alphasText,
                    const std::string& alphaRangeText, const std::string& klsText,
                    const std::string& klRangeText) {
    const gyrolat::LatticeSpec<double> spec = lat.resolve(out.parameters);

    std::vector<double> alphas;
    if (!alphasText.empty() && !alphaRangeText.empty())
        throw std::invalid_argument("give either --alphas or --alpha-range, not both");
    if (!alphasText.empty())
        alphas = parse_double_list(alphasText, "--alphas");
    else
        alphas = parse_range(alphaRangeText.empty() ? "0,0.95,20" : alphaRangeText, "--alpha-range");

    std::vector<double> kls;
    if (!klsText.empty() && !klRangeText.empty())
        throw std::invalid_argument("give either --kls or --kl-range, not both");
    if (!klsText.empty())
        kls = parse_double_list(klsText, "--kls");
    else if (!klRangeText.empty())
        kls = parse_range(klRangeText, "--kl-range");
    else
        kls = {kPi / 2};

    // Orchestrate the sweep over the requested thread count; each worker
    // handles a contiguous block of alpha values and results merge in order.
    const int nThreads = std::min<int>(out.threads, static_cast<int>(alphas.size()));
    std::vector<gyrolat::AlphaSweep<double>> parts(static_cast<std::size_t>(nThreads));
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nThreads));
    for (int w = 0; w < nThreads; ++w) {
        const std::size_t lo = alphas.size() * w / nThreads;
        const std::size_t hi = alphas.size() * (w + 1) / nThreads;
        workers.emplace_back([&, w, lo, hi]() {
            try {
                const std::vector<double> block(alphas.begin() + lo, alphas.begin() + hi);
                parts[w] = gyrolat::alpha_sweep_diagonal(spec, block, kls);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    gyrolat::AlphaSweep<double> sweep;
    sweep.kls = kls;
    for (auto& part : parts) {
        sweep.alphas.insert(sweep.alphas.end(), part.alphas.begin(), part.alphas.end());
        for (auto& row : part.branches) sweep.branches.push_back(std::move(row));
    }

    out.parameters["alphas"] = alphas;
    out.parameters["kls"] = kls;

    std::size_t maxBranches = 0;
    for (const auto& row : sweep.branches)
        for (const auto& b : row) maxBranches = std::max(maxBranches, b.size());
    Table t;
    t.header = {"alpha", "kl"};
    append_band_columns(t.header, "omega", maxBranches);
    json regimes = json::array();
    for (std::size_t a = 0; a < sweep.alphas.size(); ++a) {
        gyrolat::LatticeSpec<double> at = spec;
        at.alpha1 = at.alpha2 = sweep.alphas[a];
        regimes.push_back(gyrolat::regime_name(gyrolat::classify_regime(at)));
        for (std::size_t ki = 0; ki < sweep.kls.size(); ++ki) {
            std::vector<std::string> row{format_float(sweep.alphas[a]),
                                         format_float(sweep.kls[ki])};
            for (double w : sweep.branches[a][ki]) row.push_back(format_float(w));
            t.add_row(std::move(row));
        }
    }
    out.table("sweep_alpha", t);

    json summary;
    summary["alphas"] = alphas;
    summary["kls"] = kls;
    summary["regimes"] = regimes;
    out.json_file("summary.json", summary);
    out.finish();
    return 0;
}

int run_contours(RunOutput& out, const LatticeCli& lat, int resolution,
                 const std::string& levelsText) {
    const gyrolat::LatticeSpec<double> spec = lat.resolve(out.parameters);
    const std::vector<double> levels = parse_double_list(levelsText, "--levels");
    const gyrolat::BandSurfaces<double> s = gyrolat::compute_surfaces(spec, resolution);
    const std::vector<gyrolat::ContourLine<double>> lines =
        gyrolat::slowness_contours(s, spec, levels);

    out.parameters["resolution"] = resolution;
    out.parameters["levels"] = levels;

    if (out.plotdata && out.dir) {
        // Blank-line-separated polyline blocks, ready for line plotting.
        const fs::path path = *out.dir / "contours.dat";
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << "# branch level k1l k2l\n";
        for (const auto& line : lines) {
            for (const auto& p : line.points)
                f << line.branch << " " << format_float(line.level) << " "
                  << format_float(p.x() * spec.l) << " " << format_float(p.y() * spec.l) << "\n";
            f << "\n";
        }
        out.files.push_back("contours.dat");
    } else {
        Table t;
        t.header = {"branch", "level", "line", "point", "k1l", "k2l"};
        for (std::size_t li = 0; li < lines.size(); ++li)
            for (std::size_t pi = 0; pi < lines[li].points.size(); ++pi)
                t.add_row({std::to_string(lines[li].branch), format_float(lines[li].level),
                           std::to_string(li), std::to_string(pi),
                           format_float(lines[li].points[pi].x() * spec.l),
                           format_float(lines[li].points[pi].y() * spec.l)});
        out.table("contours", t);
    }

    json summary;
    summary["regime"] = gyrolat::regime_name(gyrolat::classify_regime(spec));
    summary["resolution"] = resolution;
    summary["levels"] = levels;
    summary["line_count"] = lines.size();
    out.json_file("summary.json", summary);
    out.finish();
    return 0;
}

gyrolat::SceneConfig parse_scene_config(const std::string& path, json& params) {
    gyrolat::ParsedConfig cfg = gyrolat::parse_config_file(path);
    gyrolat::SceneConfig sc;

    sc.omega = cfg.get_double("domain.omega", sc.omega);
    sc.ambientRho = cfg.get_double("domain.rho", sc.ambientRho);
    sc.ambientMu = cfg.get_double("domain.mu", sc.ambientMu);
    sc.ambientLambda = cfg.get_double("domain.lambda", sc.ambientLambda);
    sc.uniformAlpha = cfg.get_double("domain.alpha", sc.uniformAlpha);
    sc.pointsPerWavelength = cfg.get_int("domain.points_per_wavelength", sc.pointsPerWavelength);
    sc.domainWavelengths = cfg.get_double("domain.size_wavelengths", sc.domainWavelengths);
    sc.pmlCells = cfg.get_int("domain.pml_cells", sc.pmlCells);
    sc.pmlReflection = cfg.get_double("domain.pml_reflection", sc.pmlReflection);

    const std::string kind = cfg.get("source.kind", "force");
    if (kind == "force")
        sc.source.kind = gyrolat::SourceKind::PointForce;
    else if (kind == "moment")
        sc.source.kind = gyrolat::SourceKind::PointMoment;
    else
        throw std::invalid_argument("scene config: source.kind must be force or moment, got '" +
                                    kind + "'");
    sc.source.position = {cfg.get_double("source.x", 0), cfg.get_double("source.y", 0)};
    sc.source.direction = {cfg.get_double("source.dir_x", 1), cfg.get_double("source.dir_y", 0)};
    sc.source.magnitude = cfg.get_double("source.magnitude", 1);

    bool hasInclusion = false, hasCoating = false;
    for (const std::string& key : cfg.keys()) {
        hasInclusion = hasInclusion || key.rfind("inclusion.", 0) == 0;
        hasCoating = hasCoating || key.rfind("coating.", 0) == 0;
    }
    if (hasCoating && !hasInclusion)
        throw std::invalid_argument("scene config: [coating] requires an [inclusion] section");
    if (hasInclusion) {
        gyrolat::CoatedInclusion inc;
        inc.center = {cfg.get_double("inclusion.x", 0), cfg.get_double("inclusion.y", 0)};
        inc.rInner = cfg.get_double("inclusion.r_inner", inc.rInner);
        inc.rOuter = cfg.get_double("inclusion.r_outer", inc.rOuter);
        inc.inclusionLambda = cfg.get_double("inclusion.lambda", inc.inclusionLambda);
        inc.inclusionMu = cfg.get_double("inclusion.mu", inc.inclusionMu);
        inc.coatingAlpha = cfg.get_double("coating.alpha", 0);
        inc.symmetryAxis = {cfg.get_double("coating.axis_x", 1),
                            cfg.get_double("coating.axis_y", 0)};
        inc.flipHandedness = cfg.get_bool("coating.flip", false);
        sc.inclusion = inc;
    }
    cfg.require_all_consumed();

    json& dom = params["domain"];
    dom["omega"] = sc.omega;
    dom["rho"] = sc.ambientRho;
    dom["mu"] = sc.ambientMu;
    dom["lambda"] = sc.ambientLambda;
    dom["alpha"] = sc.uniformAlpha;
    dom["points_per_wavelength"] = sc.pointsPerWavelength;
    dom["size_wavelengths"] = sc.domainWavelengths;
    dom["pml_cells"] = sc.pmlCells;
    dom["pml_reflection"] = sc.pmlReflection;
    json& src = params["source"];
    src["kind"] = kind;
    src["x"] = sc.source.position.x();
    src["y"] = sc.source.position.y();
    src["dir_x"] = sc.source.direction.x();
    src["dir_y"] = sc.source.direction.y();
    src["magnitude"] = sc.source.magnitude;
    if (sc.inclusion) {
        json& inc = params["inclusion"];
        inc["x"] = sc.inclusion->center.x();
        inc["y"] = sc.inclusion->center.y();
        inc["r_inner"] = sc.inclusion->rInner;
        inc["r_outer"] = sc.inclusion->rOuter;
        inc["lambda"] = sc.inclusion->inclusionLambda;
        inc["mu"] = sc.inclusion->inclusionMu;
        json& coat = params["coating"];
        coat["alpha"] = sc.inclusion->coatingAlpha;
        coat["axis_x"] = sc.inclusion->symmetryAxis.x();
        coat["axis_y"] = sc.inclusion->symmetryAxis.y();
        coat["flip"] = sc.inclusion->flipHandedness;
    }
    return sc;
}

json metric_or_error(const std::function<double()>& metric) {
    try {
        return metric();
    } catch (const std::exception& e) {
        json j;
        j["error"] = e.what();
        return j;
    }
}

int run_continuum(RunOutput& out, const std::string& scenePath, int profileSamples) {
    const gyrolat::SceneConfig cfg = parse_scene_config(scenePath, out.parameters);
    out.parameters["profile_samples"] = profileSamples;

    const gyrolat::ContinuumScene scene = gyrolat::build_scene(cfg);
    gyrolat::SolveReport rep;
    const gyrolat::ComplexField field = gyrolat::solve(scene, &rep);
    const Eigen::MatrixXd amp = gyrolat::field_amplitude(field);
    const int n = field.n;

    if (out.plotdata && out.dir) {
        // x-blocks separated by blank lines: gnuplot surface layout.
        const fs::path path = *out.dir / "amplitude.dat";
        std::ofstream f(path);
        if (!f) throw std::runtime_error("cannot write " + path.string());
        f << "# x y amplitude\n";
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                f << format_float(field.coord(i)) << " " << format_float(field.coord(j)) << " "
                  << format_float(amp(i, j)) << "\n";
            f << "\n";
        }
        out.files.push_back("amplitude.dat");
    } else {
        Table t;
        t.header = {"x", "y", "amplitude"};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                t.add_row({format_float(field.coord(i)), format_float(field.coord(j)),
                           format_float(amp(i, j))});
        out.table("amplitude", t);
    }

    static_assert(std::endian::native == std::endian::little,
                  "raw export assumes a little-endian host");
    std::vector<double> rawRowMajor(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rawRowMajor[static_cast<std::size_t>(i) * n + j] = amp(i, j);
    out.raw_file("amplitude.f64", reinterpret_cast<const char*>(rawRowMajor.data()),
                 rawRowMajor.size() * sizeof(double));
    json rawHeader;
    rawHeader["dtype"] = "<f8";
    rawHeader["dims"] = {n, n};
    rawHeader["layout"] = "x index outer, y index inner";
    rawHeader["spacing"] = field.h;
    rawHeader["origin"] = {field.x0, field.x0};
    rawHeader["pml_cells"] = field.pmlCells;
    out.json_file("amplitude.f64.json", rawHeader);

    const std::vector<double> profile = gyrolat::diagonal_profile(field, profileSamples);
    Table pt;
    pt.header = {"sample", "x", "y", "amplitude"};
    const double span = (n - 1) * field.h;
    for (std::size_t s = 0; s < profile.size(); ++s) {
        const double t = static_cast<double>(s) / (profile.size() - 1);
        pt.add_row({std::to_string(s), format_float(field.x0 + t * span),
                    format_float(field.x0 + (1 - t) * span), format_float(profile[s])});
    }
    out.table("diagonal_profile", pt);

    const double ls = scene.shearWavelength;
    json report;
    report["residual"] = rep.residual;
    report["method"] = rep.method;
    report["residual_history"] = rep.history;
    report["shear_wavelength"] = ls;
    report["grid_n"] = n;
    report["grid_spacing"] = field.h;
    json& metrics = report["metrics"];
    if (scene.inclusion)
        metrics["shadow"] = metric_or_error([&] { return gyrolat::shadow_metric(field, scene); });
    metrics["mirror_asymmetry"] =
        metric_or_error([&] { return gyrolat::mirror_asymmetry(field, scene); });
    metrics["radial_wavelength"] = metric_or_error(
        [&] { return gyrolat::radial_wavelength(field, scene, 1.5 * ls, 3 * ls); });
    metrics["angular_variation"] =
        metric_or_error([&] { return gyrolat::angular_variation(field, scene, 2 * ls); });
    out.json_file("report.json", report);
    out.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Triangular gyroscopic lattice dispersion and chiral continuum toolkit"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string outDir;
    bool plotdata = false;

    // gyro
    double gI0 = 1, gI = 1, gH = 1, gOmega = 0;
    std::string gBranch = "plus";
    CLI::App* gyro = app.add_subcommand("gyro", "Spinner rates and chiral constant for one gyroscope");
    gyro->set_help_flag("--help", "Print this help message and exit");
    gyro->add_option("--I0", gI0, "Transverse moment of inertia")->capture_default_str();
    gyro->add_option("--I", gI, "Axial moment of inertia")->capture_default_str();
    gyro->add_option("--h", gH, "Characteristic spinner length")->capture_default_str();
    gyro->add_option("--omega", gOmega, "Oscillation frequency (rad/s)")->required();
    gyro->add_option("--branch", gBranch, "Handedness branch")
        ->check(CLI::IsMember({"plus", "minus"}))
        ->capture_default_str();

    // dispersion
    LatticeCli lat;
    std::string kText;
    bool oracle = false;
    double detOmegaMax = 10;
    int detSteps = 4000;
    CLI::App* dispersion =
        app.add_subcommand("dispersion", "Bloch branches at one wave vector");
    dispersion->add_option("--spec", lat.specPath, "Lattice config file (key = value)");
    dispersion->add_option("--k", kText, "Wave vector as k1l,k2l")->required();
    dispersion->add_flag("--oracle", oracle, "Add determinant-scan comparison columns");
    dispersion->add_option("--omega-max", detOmegaMax, "Scan ceiling for --oracle")
        ->capture_default_str();
    dispersion->add_option("--det-steps", detSteps, "Scan step count for --oracle")
        ->capture_default_str();

    // bands / gaps
    int resolution = 64;
    double omegaMax = 0;
    double gapMinWidth = 1e-3;
    int gapProbes = 2000;
    std::uint64_t gapSeed = 12345;
    CLI::App* bands = app.add_subcommand("bands", "Dispersion surfaces over one reciprocal cell");
    CLI::App* gaps = app.add_subcommand("gaps", "Total band gaps of the sampled surfaces");
    for (CLI::App* cmd : {bands, gaps}) {
        cmd->add_option("--spec", lat.specPath, "Lattice config file (key = value)");
        cmd->add_option("--resolution", resolution, "Samples per reciprocal-cell edge")
            ->capture_default_str();
        cmd->add_option("--omega-max", omegaMax, "Gap search ceiling (0 = highest sampled)")
            ->capture_default_str();
        cmd->add_option("--gap-min-width", gapMinWidth, "Narrower gaps are grid noise")
            ->capture_default_str();
        cmd->add_option("--gap-probes", gapProbes, "Random probe points beyond the grid")
            ->capture_default_str();
        cmd->add_option("--gap-seed", gapSeed, "Probe sequence seed")->capture_default_str();
    }

    // sweep-alpha
    std::string alphasText, alphaRangeText, klsText, klRangeText;
    CLI::App* sweep =
        app.add_subcommand("sweep-alpha", "Branch frequencies versus spinner constant");
    sweep->add_option("--spec", lat.specPath, "Lattice config file (key = value)");
    sweep->add_option("--alphas", alphasText, "Comma-separated spinner constants");
    sweep->add_option("--alpha-range", alphaRangeText, "min,max,count (default 0,0.95,20)");
    sweep->add_option("--kls", klsText, "Comma-separated k*l values on the diagonal k1=k2");
    sweep->add_option("--kl-range", klRangeText, "min,max,count (default single pi/2)");

    // contours
    std::string levelsText;
    CLI::App* contours =
        app.add_subcommand("contours", "Isofrequency lines of the dispersion surfaces");
    contours->add_option("--spec", lat.specPath, "Lattice config file (key = value)");
    contours->add_option("--resolution", resolution, "Samples per reciprocal-cell edge")
        ->capture_default_str();
    contours->add_option("--levels", levelsText, "Comma-separated frequency levels")->required();

    // continuum
    std::string scenePath;
    int profileSamples = 512;
    CLI::App* continuum =
        app.add_subcommand("continuum", "Frequency-domain chiral elasticity solve");
    continuum->add_option("--scene", scenePath, "Scene config file (key = value)")->required();
    continuum->add_option("--profile-samples", profileSamples, "Anti-diagonal profile samples")
        ->capture_default_str();

    for (CLI::App* cmd : {gyro, dispersion, bands, gaps, sweep, contours, continuum})
        cmd->add_flag("--plotdata", plotdata, "Whitespace tables instead of CSV");
    for (CLI::App* cmd : {gyro, dispersion})
        cmd->add_option("--out", outDir, "Output directory (default: stdout)");
    for (CLI::App* cmd : {bands, gaps, sweep, contours, continuum})
        cmd->add_option("--out", outDir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    RunOutput out;
    try {
        out.threads = thread_count_from_env();
        Eigen::setNbThreads(out.threads);
        out.plotdata = plotdata;
        if (!outDir.empty()) out.set_dir(outDir);

        if (gyro->parsed()) {
            out.command = "gyro";
            return run_gyro(out, gI0, gI, gH, gOmega, gBranch);
        }
        if (dispersion->parsed()) {
            out.command = "dispersion";
            return run_dispersion(out, lat, kText, oracle, detOmegaMax, detSteps);
        }
        if (bands->parsed()) {
            out.command = "bands";
            return run_bands(out, lat, resolution, omegaMax, gapMinWidth, gapProbes, gapSeed,
                             true);
        }
        if (gaps->parsed()) {
            out.command = "gaps";
            return run_bands(out, lat, resolution, omegaMax, gapMinWidth, gapProbes, gapSeed,
                             false);
        }
        if (sweep->parsed()) {
            out.command = "sweep-alpha";
            return run_sweep_alpha(out, lat, alphasText, alphaRangeText, klsText, klRangeText);
        }
        if (contours->parsed()) {
            out.command = "contours";
            return run_contours(out, lat, resolution, levelsText);
        }
        if (continuum->parsed()) {
            out.command = "continuum";
            return run_continuum(out, scenePath, profileSamples);
        }
        throw std::logic_error("no subcommand dispatched");
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        err["command"] = out.command.empty() ? "unknown" : out.command;
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
