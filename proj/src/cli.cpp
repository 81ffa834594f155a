#include "stlgcp/cli.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "stlgcp/contrast.hpp"
#include "stlgcp/covariance.hpp"
#include "stlgcp/diagnostics.hpp"
#include "stlgcp/geometry.hpp"
#include "stlgcp/grf.hpp"
#include "stlgcp/intensity.hpp"
#include "stlgcp/io.hpp"
#include "stlgcp/kernels.hpp"
#include "stlgcp/lgcp.hpp"
#include "stlgcp/parallel.hpp"
#include "stlgcp/rng.hpp"
#include "stlgcp/scenarios.hpp"
#include "stlgcp/stats.hpp"
#include "stlgcp/summary.hpp"

namespace stlgcp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
    std::vector<double> window{0, 1, 0, 1, 0, 50};
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out_dir = ".";
    std::string config_path;

    // simulate / replicate
    std::string scenario;
    std::string family = "sep_exp";
    double sigma2 = 5.0, alpha = 0.1, beta = 5.0;
    double delta = 1.0, gamma_s = 1.0, gamma_t = 1.0;
    double baseline = 0.0;  // 0 = derive from n_expected
    double n_expected = 1000.0;
    std::vector<std::size_t> sim_grid;  // empty = family default
    std::string pattern_out = "pattern.csv";
    std::string field_out = "field.csv";
    std::size_t replicates = 10;

    // shared pattern input
    std::string pattern_path;

    // lag grid
    std::size_t nr = 15, nh = 15;
    double rmax = 0.0, hmax = 0.0;  // 0 = quarter of the maximum observable lag

    // bandwidths
    double eps_space = 0.0, eps_time = 0.0;
    double sigma_x = 0.0, sigma_y = 0.0, sigma_t = 0.0;
    std::size_t np = 0;
    double eps_floor = 1e-3;
    std::string kernel = "epanechnikov";

    // stats
    bool want_stack = false, want_k = false;

    // fit-intensity
    std::vector<std::size_t> cubes;  // empty = automatic rule
    double dummy_factor = 4.0;
    bool local = false;
    std::vector<std::size_t> eval_grid{10, 10, 5};
    std::string covariates_path;

    // diagnose
    std::string fit_path;
    std::string local_fit_path;
    std::size_t q_replicates = 39;
    std::string out_json = "result.json";
    std::string envelopes_csv = "envelopes.csv";
};

void apply_config_json(RunConfig& c, const json& j) {
    std::vector<std::string> unknown;
    for (const auto& [key, value] : j.items()) {
        if (key == "window")
            c.window = value.get<std::vector<double>>();
        else if (key == "seed")
            c.seed = value.get<std::uint64_t>();
        else if (key == "threads")
            c.threads = value.get<unsigned>();
        else if (key == "out_dir")
            c.out_dir = value.get<std::string>();
        else if (key == "scenario")
            c.scenario = value.get<std::string>();
        else if (key == "family")
            c.family = value.get<std::string>();
        else if (key == "sigma2")
            c.sigma2 = value.get<double>();
        else if (key == "alpha")
            c.alpha = value.get<double>();
        else if (key == "beta")
            c.beta = value.get<double>();
        else if (key == "delta")
            c.delta = value.get<double>();
        else if (key == "gamma_s")
            c.gamma_s = value.get<double>();
        else if (key == "gamma_t")
            c.gamma_t = value.get<double>();
        else if (key == "baseline")
            c.baseline = value.get<double>();
        else if (key == "n_expected")
            c.n_expected = value.get<double>();
        else if (key == "sim_grid")
            c.sim_grid = value.get<std::vector<std::size_t>>();
        else if (key == "pattern_out")
            c.pattern_out = value.get<std::string>();
        else if (key == "field_out")
            c.field_out = value.get<std::string>();
        else if (key == "replicates")
            c.replicates = value.get<std::size_t>();
        else if (key == "pattern")
            c.pattern_path = value.get<std::string>();
        else if (key == "nr")
            c.nr = value.get<std::size_t>();
        else if (key == "nh")
            c.nh = value.get<std::size_t>();
        else if (key == "rmax")
            c.rmax = value.get<double>();
        else if (key == "hmax")
            c.hmax = value.get<double>();
        else if (key == "eps_space")
            c.eps_space = value.get<double>();
        else if (key == "eps_time")
            c.eps_time = value.get<double>();
        else if (key == "sigma_x")
            c.sigma_x = value.get<double>();
        else if (key == "sigma_y")
            c.sigma_y = value.get<double>();
        else if (key == "sigma_t")
            c.sigma_t = value.get<double>();
        else if (key == "np")
            c.np = value.get<std::size_t>();
        else if (key == "eps_floor")
            c.eps_floor = value.get<double>();
        else if (key == "kernel")
            c.kernel = value.get<std::string>();
        else if (key == "stack")
            c.want_stack = value.get<bool>();
        else if (key == "k")
            c.want_k = value.get<bool>();
        else if (key == "cubes")
            c.cubes = value.get<std::vector<std::size_t>>();
        else if (key == "dummy_factor")
            c.dummy_factor = value.get<double>();
        else if (key == "local")
            c.local = value.get<bool>();
        else if (key == "eval_grid")
            c.eval_grid = value.get<std::vector<std::size_t>>();
        else if (key == "covariates")
            c.covariates_path = value.get<std::string>();
        else if (key == "fit")
            c.fit_path = value.get<std::string>();
        else if (key == "local_fit")
            c.local_fit_path = value.get<std::string>();
        else if (key == "q")
            c.q_replicates = value.get<std::size_t>();
        else if (key == "out")
            c.out_json = value.get<std::string>();
        else if (key == "envelopes")
            c.envelopes_csv = value.get<std::string>();
        else
            unknown.push_back(key);
    }
    if (!unknown.empty()) {
        std::ostringstream msg;
        msg << "unknown config keys:";
        for (const auto& k : unknown) msg << ' ' << k;
        throw std::runtime_error(msg.str());
    }
}

SpaceTimeWindow window_of(const RunConfig& c) {
    if (c.window.size() != 6)
        throw std::runtime_error("--window needs exactly 6 values X0,X1,Y0,Y1,T0,T1");
    return SpaceTimeWindow{{c.window[0], c.window[1]},
                           {c.window[2], c.window[3]},
                           {c.window[4], c.window[5]}};
}

unsigned resolved_threads(const RunConfig& c) {
    return c.threads == 0 ? default_threads() : c.threads;
}

fs::path out_path(const RunConfig& c, const std::string& name) {
    fs::create_directories(c.out_dir);
    return fs::path(c.out_dir) / name;
}

void note_written(const fs::path& p) { std::cout << "wrote " << p.string() << "\n"; }

LagGrid lag_grid_of(const RunConfig& c, const SpaceTimeWindow& w) {
    const double r_max = c.rmax > 0.0 ? c.rmax : w.spatial_diameter() / 4.0;
    const double h_max = c.hmax > 0.0 ? c.hmax : w.temporal_length() / 4.0;
    std::vector<double> r(c.nr), h(c.nh);
    for (std::size_t k = 0; k < c.nr; ++k)
        r[k] = r_max * static_cast<double>(k + 1) / static_cast<double>(c.nr);
    for (std::size_t k = 0; k < c.nh; ++k)
        h[k] = h_max * static_cast<double>(k + 1) / static_cast<double>(c.nh);
    return LagGrid(std::move(r), std::move(h));
}

BandwidthSet bandwidths_of(const RunConfig& c, const PointPattern& p) {
    BandwidthSet partial;
    partial.eps_space = c.eps_space;
    partial.eps_time = c.eps_time;
    partial.sigma_x = c.sigma_x;
    partial.sigma_y = c.sigma_y;
    partial.sigma_t = c.sigma_t;
    partial.pcf_kernel = kernel_type_from_string(c.kernel);
    if (c.np > 0) {
        // Variable-bandwidth rule: the per-point n_p-th neighbour distances set
        // the spatial weighting scale (their median) unless overridden.
        const std::vector<double> per_point = bandwidth_variable(p, c.np, c.eps_floor);
        const double med = median(per_point);
        if (partial.sigma_x <= 0.0) partial.sigma_x = med;
        if (partial.sigma_y <= 0.0) partial.sigma_y = med;
    }
    return default_bandwidths(p, partial);
}

CovarianceModel model_of(const RunConfig& c) {
    if (!c.scenario.empty()) return find_scenario(c.scenario).model;
    if (c.family == "sep_exp")
        return CovarianceModel(SeparableExponentialParams{c.sigma2, c.alpha, c.beta});
    if (c.family == "gneiting")
        return CovarianceModel(
            GneitingParams{c.sigma2, c.alpha, c.beta, c.gamma_s, c.gamma_t, c.delta});
    throw std::runtime_error("unknown model family: " + c.family);
}

SpaceTimeGrid sim_grid_of(const RunConfig& c, const SpaceTimeWindow& w,
                          const CovarianceModel& m) {
    if (!c.sim_grid.empty()) {
        if (c.sim_grid.size() != 3)
            throw std::runtime_error("--sim-grid needs exactly 3 values NX,NY,NT");
        return SpaceTimeGrid(w, c.sim_grid[0], c.sim_grid[1], c.sim_grid[2]);
    }
    // The non-separable family factorizes a dense covariance; stay under its cap.
    return m.is_separable() ? SpaceTimeGrid(w, 32, 32, 50) : SpaceTimeGrid(w, 12, 12, 25);
}

json bandwidths_json(const BandwidthSet& bw) {
    return json{{"eps_space", bw.eps_space}, {"eps_time", bw.eps_time},
                {"sigma_x", bw.sigma_x},     {"sigma_y", bw.sigma_y},
                {"sigma_t", bw.sigma_t},     {"pcf_kernel", to_string(bw.pcf_kernel)},
                {"weight_kernel", to_string(bw.weight_kernel)}};
}

void write_json_file(const json& j, const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open for writing: " + p.string());
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + p.string());
}

double param_value(const CovarianceModel& m, const std::string& param) {
    if (m.is_separable()) {
        const auto& p = m.separable();
        if (param == "sigma2") return p.sigma2;
        if (param == "alpha") return p.alpha;
        return p.beta;
    }
    const auto& p = m.gneiting();
    if (param == "sigma2") return p.sigma2;
    if (param == "alpha") return p.alpha;
    if (param == "beta") return p.beta;
    return p.delta;
}

void cmd_simulate(const RunConfig& c) {
    const SpaceTimeWindow w = window_of(c);
    const CovarianceModel model = model_of(c);
    const double rate = c.baseline > 0.0 ? c.baseline : c.n_expected / window_volume(w);

    SimulationConfig sim;
    sim.grid = sim_grid_of(c, w, model);
    sim.model = model;
    sim.baseline.constant = rate;
    sim.seed = c.seed;
    const SimulatedPattern out = lgcp_simulate(sim);

    const fs::path pat = out_path(c, c.pattern_out);
    write_pattern_csv(out.pattern, pat.string());
    note_written(pat);
    const fs::path fld = out_path(c, c.field_out);
    write_field_csv(out.field, fld.string());
    note_written(fld);
    std::cout << "simulated " << out.pattern.size() << " points (dominating rate "
              << out.lambda_max << ")\n";
}

void cmd_stats(const RunConfig& c) {
    const SpaceTimeWindow w = window_of(c);
    const PointPattern p = read_pattern_csv(c.pattern_path, w);
    const BandwidthSet bw = bandwidths_of(c, p);
    const LagGrid grid = lag_grid_of(c, w);
    const std::vector<double> lambda = constant_intensity(p);

    const SummaryStatistic stack = pcf_local_all(p, lambda, bw, grid, resolved_threads(c));
    const SummaryStatistic global = pcf_global_from_stack(stack);
    const fs::path pcf = out_path(c, "pcf.csv");
    write_summary_csv(global, pcf.string());
    note_written(pcf);
    if (c.want_stack) {
        const fs::path st = out_path(c, "stack.csv");
        write_summary_csv(stack, st.string());
        note_written(st);
    }
    if (c.want_k) {
        const fs::path kp = out_path(c, "k.csv");
        write_summary_csv(k_inhom(p, lambda, grid), kp.string());
        note_written(kp);
    }
}

QuadratureScheme quadrature_of(const RunConfig& c, const PointPattern& p) {
    QuadratureScheme q;
    if (!c.cubes.empty()) {
        if (c.cubes.size() != 3)
            throw std::runtime_error("--cubes needs exactly 3 values NX,NY,NT");
        q = build_quadrature(p, c.cubes[0], c.cubes[1], c.cubes[2]);
    } else {
        q = build_quadrature_auto(p, c.dummy_factor);
    }
    if (!c.covariates_path.empty()) {
        std::ifstream in(c.covariates_path);
        if (!in) throw std::runtime_error("cannot open covariates file: " + c.covariates_path);
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error(c.covariates_path + ": empty file");
        std::vector<Point> samples;
        std::vector<std::vector<double>> rows;
        std::size_t line_no = 1;
        std::size_t n_cov = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            std::vector<double> vals;
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ',')) {
                try {
                    vals.push_back(std::stod(field));
                } catch (const std::exception&) {
                    throw std::runtime_error(c.covariates_path + " line " +
                                             std::to_string(line_no) + ": bad number '" +
                                             field + "'");
                }
            }
            if (vals.size() < 4)
                throw std::runtime_error(c.covariates_path + " line " +
                                         std::to_string(line_no) +
                                         ": expected x,y,t and at least one covariate");
            if (n_cov == 0) n_cov = vals.size() - 3;
            if (vals.size() - 3 != n_cov)
                throw std::runtime_error(c.covariates_path + " line " +
                                         std::to_string(line_no) + ": ragged row");
            samples.push_back({vals[0], vals[1], vals[2]});
            rows.push_back(std::vector<double>(vals.begin() + 3, vals.end()));
        }
        Eigen::MatrixXd values(static_cast<std::ptrdiff_t>(rows.size()),
                               static_cast<std::ptrdiff_t>(n_cov));
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t k = 0; k < n_cov; ++k)
                values(static_cast<std::ptrdiff_t>(r), static_cast<std::ptrdiff_t>(k)) =
                    rows[r][k];
        attach_covariates(q, samples, values);
    }
    return q;
}

void cmd_fit_intensity(const RunConfig& c) {
    const SpaceTimeWindow w = window_of(c);
    const PointPattern p = read_pattern_csv(c.pattern_path, w);
    const QuadratureScheme q = quadrature_of(c, p);
    const IntensityFit fit = fit_poisson(q);

    json j;
    j["theta"] = std::vector<double>(fit.theta.data(), fit.theta.data() + fit.theta.size());
    j["deviance"] = fit.deviance;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["n"] = p.size();
    j["cubes"] = q.cubes;
    double weight_sum = 0.0;
    for (double a : q.weights) weight_sum += a;
    j["weight_sum"] = weight_sum;
    if (q.covariates.cols() == 0) j["lambda"] = std::exp(fit.theta[0]);
    const fs::path ip = out_path(c, "intensity.json");
    write_json_file(j, ip);
    note_written(ip);

    if (c.local) {
        if (c.eval_grid.size() != 3)
            throw std::runtime_error("--grid needs exactly 3 values NX,NY,NT");
        const BandwidthSet bw = bandwidths_of(c, p);
        const auto locations = evaluation_grid(w, c.eval_grid[0], c.eval_grid[1], c.eval_grid[2]);
        const LocalIntensityField field =
            fit_local_intensity(q, bw, locations, resolved_threads(c));
        const fs::path lp = out_path(c, "local_intensity.csv");
        write_local_intensity_csv(field, lp.string());
        note_written(lp);
    }
}

json global_fit_json(const GlobalFitResult& fit, const PointPattern& p,
                     const BandwidthSet& bw) {
    json j;
    j["model"] = json::parse(model_to_json(fit.model));
    j["contrast"] = fit.contrast;
    j["converged"] = fit.converged;
    j["evals"] = fit.evals;
    j["lambda"] = static_cast<double>(p.size()) / window_volume(p.window());
    j["n"] = p.size();
    j["bandwidths"] = bandwidths_json(bw);
    return j;
}

void cmd_fit_global(const RunConfig& c) {
    const SpaceTimeWindow w = window_of(c);
    const PointPattern p = read_pattern_csv(c.pattern_path, w);
    const BandwidthSet bw = bandwidths_of(c, p);
    ContrastSpec spec{lag_grid_of(c, w), c.family, ContrastTransform::Identity, c.gamma_s,
                      c.gamma_t};
    const GlobalFitResult fit =
        fit_global(p, constant_intensity(p), spec, bw, resolved_threads(c));
    const fs::path gp = out_path(c, "global_fit.json");
    write_json_file(global_fit_json(fit, p, bw), gp);
    note_written(gp);
}

void write_local_summary(const LocalFitResult& fit, const fs::path& path) {
    const bool gneiting = !fit.models.empty() && !fit.models.front().is_separable();
    std::vector<std::string> names{"sigma2", "alpha", "beta"};
    if (gneiting) names.push_back("delta");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.precision(17);
    out << "parameter,min,q25,q50,mean,q75,max\n";
    for (const auto& name : names) {
        std::vector<double> v;
        v.reserve(fit.models.size());
        for (const auto& m : fit.models) v.push_back(param_value(m, name));
        out << name << ',' << *std::min_element(v.begin(), v.end()) << ','
            << quantile(v, 0.25) << ',' << quantile(v, 0.5) << ',' << mean(v) << ','
            << quantile(v, 0.75) << ',' << *std::max_element(v.begin(), v.end()) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void cmd_fit_local(const RunConfig& c) {
    const SpaceTimeWindow w = window_of(c);
    const PointPattern p = read_pattern_csv(c.pattern_path, w);
    const BandwidthSet bw = bandwidths_of(c, p);
    ContrastSpec spec{lag_grid_of(c, w), c.family, ContrastTransform::Identity, c.gamma_s,
                      c.gamma_t};
    const LocalFitResult fit =
        fit_local(p, constant_intensity(p), spec, bw, resolved_threads(c));

    const fs::path gp = out_path(c, "global_fit.json");
    write_json_file(global_fit_json(fit.global, p, bw), gp);
    note_written(gp);
    const fs::path lp = out_path(c, "local_fits.csv");
    write_local_fit_csv(fit, p, lp.string());
    note_written(lp);
    const fs::path sp = out_path(c, "local_summary.csv");
    write_local_summary(fit, sp);
    note_written(sp);
}

void cmd_diagnose(const RunConfig& c) {
    const SpaceTimeWindow w = window_of(c);
    const PointPattern p = read_pattern_csv(c.pattern_path, w);
    if (c.fit_path.empty()) throw std::runtime_error("diagnose needs --fit FILE");
    std::ifstream in(c.fit_path);
    if (!in) throw std::runtime_error("cannot open fit file: " + c.fit_path);
    json fit_json = json::parse(in);
    const json model_json = fit_json.contains("model") ? fit_json["model"] : fit_json;
    const CovarianceModel model = model_from_json(model_json.dump());

    DiagnosticConfig cfg{lag_grid_of(c, w),
                         sim_grid_of(c, w, model),
                         c.q_replicates,
                         c.seed,
                         resolved_threads(c),
                         model,
                         nullptr,
                         static_cast<double>(p.size()) / window_volume(w)};

    std::optional<LocalFitResult> local;
    if (!c.local_fit_path.empty()) {
        LocalFitResult lf;
        lf.models = read_local_fit_csv(c.local_fit_path, model.family_name());
        if (lf.models.size() != p.size())
            throw std::runtime_error("local fit file has " + std::to_string(lf.models.size()) +
                                     " rows but the pattern has " + std::to_string(p.size()));
        lf.contrast.assign(lf.models.size(), 0.0);
        lf.converged.assign(lf.models.size(), 1);
        lf.global.model = model;
        local = std::move(lf);
        cfg.local = &*local;
    }

    const DiagnosticResult res = run_mc_test(p, cfg);
    json j;
    j["t_observed"] = res.t_observed;
    j["t_replicates"] = res.t_replicates;
    j["p_value"] = res.p_value;
    j["q"] = c.q_replicates;
    j["cells_excluded"] = res.cells_excluded;
    j["envelope_level"] = res.envelope_level;
    const fs::path rp = out_path(c, c.out_json);
    write_json_file(j, rp);
    note_written(rp);
    const fs::path ep = out_path(c, c.envelopes_csv);
    write_envelope_csv(res, ep.string());
    note_written(ep);
    std::cout << "p_value " << res.p_value << "\n";
}

void cmd_replicate(const RunConfig& c) {
    const Scenario& sc = find_scenario(c.scenario);
    const SpaceTimeWindow w = window_of(c);
    const double rate = c.baseline > 0.0 ? c.baseline : c.n_expected / window_volume(w);
    const SpaceTimeGrid grid = sim_grid_of(c, w, sc.model);
    const GrfSampler sampler(sc.model, grid);
    const std::string family = sc.model.family_name();

    std::vector<std::string> names{"sigma2", "alpha", "beta"};
    if (family == "gneiting") names.push_back("delta");
    // Per parameter: cross-replicate sums of the per-pattern q25/q50/mean/q75.
    std::vector<std::array<double, 4>> sums(names.size(), {0.0, 0.0, 0.0, 0.0});

    for (std::size_t rep = 0; rep < c.replicates; ++rep) {
        SimulationConfig sim;
        sim.grid = grid;
        sim.model = sc.model;
        sim.baseline.constant = rate;
        PointPattern pattern(std::vector<Point>{}, w);
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt >= 5)
                throw std::runtime_error("replicate simulation kept producing tiny patterns");
            sim.seed = derive_seed(c.seed, rep * 16 + attempt);
            pattern = lgcp_simulate(sim, sampler).pattern;
            if (pattern.size() >= 10) break;
        }
        const BandwidthSet bw = bandwidths_of(c, pattern);
        ContrastSpec spec{lag_grid_of(c, w), family, ContrastTransform::Identity, 1.0, 1.0};
        const LocalFitResult fit =
            fit_local(pattern, constant_intensity(pattern), spec, bw, resolved_threads(c));
        for (std::size_t k = 0; k < names.size(); ++k) {
            std::vector<double> v;
            v.reserve(fit.models.size());
            for (const auto& m : fit.models) v.push_back(param_value(m, names[k]));
            sums[k][0] += quantile(v, 0.25);
            sums[k][1] += quantile(v, 0.5);
            sums[k][2] += mean(v);
            sums[k][3] += quantile(v, 0.75);
        }
        std::cout << "replicate " << rep + 1 << "/" << c.replicates << ": n = "
                  << pattern.size() << "\n";
    }

    const fs::path tp = out_path(c, "replicate_table.csv");
    std::ofstream out(tp);
    if (!out) throw std::runtime_error("cannot open for writing: " + tp.string());
    out.precision(10);
    out << "scenario,replicates,parameter,truth,q25,q50,mean,q75\n";
    const double R = static_cast<double>(c.replicates);
    for (std::size_t k = 0; k < names.size(); ++k)
        out << sc.id << ',' << c.replicates << ',' << names[k] << ','
            << param_value(sc.model, names[k]) << ',' << sums[k][0] / R << ','
            << sums[k][1] / R << ',' << sums[k][2] / R << ',' << sums[k][3] / R << '\n';
    if (!out) throw std::runtime_error("write failed: " + tp.string());
    note_written(tp);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    RunConfig cfg;
    try {
        for (int k = 1; k < argc; ++k) {
            const std::string a = argv[k];
            if (a == "--config" && k + 1 < argc)
                cfg.config_path = argv[k + 1];
            else if (a.rfind("--config=", 0) == 0)
                cfg.config_path = a.substr(9);
        }
        if (!cfg.config_path.empty()) {
            std::ifstream in(cfg.config_path);
            if (!in) throw std::runtime_error("cannot open config file: " + cfg.config_path);
            apply_config_json(cfg, json::parse(in));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"Spatio-temporal log-Gaussian Cox process toolkit"};
    app.require_subcommand(1);
    app.add_option("--config", cfg.config_path, "JSON config file (flags take precedence)");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--window", cfg.window, "Window X0,X1,Y0,Y1,T0,T1")->delimiter(',');
        sub->add_option("--seed", cfg.seed, "Master seed");
        sub->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)");
        sub->add_option("--out-dir", cfg.out_dir, "Output directory");
    };
    auto add_lag_grid = [&](CLI::App* sub) {
        sub->add_option("--nr", cfg.nr, "Number of spatial lags");
        sub->add_option("--nh", cfg.nh, "Number of temporal lags");
        sub->add_option("--rmax", cfg.rmax, "Largest spatial lag (0 = quarter rule)");
        sub->add_option("--hmax", cfg.hmax, "Largest temporal lag (0 = quarter rule)");
    };
    auto add_bandwidths = [&](CLI::App* sub) {
        sub->add_option("--eps-space", cfg.eps_space, "pcf spatial bandwidth (0 = plug-in)");
        sub->add_option("--eps-time", cfg.eps_time, "pcf temporal bandwidth (0 = plug-in)");
        sub->add_option("--sigma-x", cfg.sigma_x, "weighting bandwidth in x (0 = plug-in)");
        sub->add_option("--sigma-y", cfg.sigma_y, "weighting bandwidth in y (0 = plug-in)");
        sub->add_option("--sigma-t", cfg.sigma_t, "weighting bandwidth in t (0 = plug-in)");
        sub->add_option("--np", cfg.np,
                        "variable-bandwidth neighbour count feeding sigma-x/y (0 = off)");
        sub->add_option("--eps-floor", cfg.eps_floor, "variable-bandwidth lower bound");
        sub->add_option("--kernel", cfg.kernel, "pcf kernel: epanechnikov|gaussian|box");
    };
    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--family", cfg.family, "Model family: sep_exp|gneiting");
        sub->add_option("--gamma-s", cfg.gamma_s, "Fixed spatial exponent (gneiting)");
        sub->add_option("--gamma-t", cfg.gamma_t, "Fixed temporal exponent (gneiting)");
    };

    CLI::App* sim = app.add_subcommand("simulate", "Simulate a pattern from a fitted or"
                                                   " catalog model");
    add_common(sim);
    add_model(sim);
    sim->add_option("--scenario", cfg.scenario, "Catalog scenario id");
    sim->add_option("--sigma2", cfg.sigma2, "Field variance");
    sim->add_option("--alpha", cfg.alpha, "Spatial scale");
    sim->add_option("--beta", cfg.beta, "Temporal scale");
    sim->add_option("--delta", cfg.delta, "Interaction exponent (gneiting)");
    sim->add_option("--baseline", cfg.baseline, "Constant baseline rate (0 = from n-expected)");
    sim->add_option("--n-expected", cfg.n_expected, "Expected number of points");
    sim->add_option("--sim-grid", cfg.sim_grid, "Simulation grid NX,NY,NT")->delimiter(',');
    sim->add_option("--pattern-out", cfg.pattern_out, "Pattern CSV name");
    sim->add_option("--field-out", cfg.field_out, "Field CSV name");
    sim->callback([&] { cmd_simulate(cfg); });

    CLI::App* st = app.add_subcommand("stats", "Summary statistics of a pattern");
    add_common(st);
    add_lag_grid(st);
    add_bandwidths(st);
    st->add_option("--pattern", cfg.pattern_path, "Pattern CSV")->required();
    st->add_flag("--stack", cfg.want_stack, "Also write the per-point pcf stack");
    st->add_flag("--k", cfg.want_k, "Also write the inhomogeneous K-function");
    st->callback([&] { cmd_stats(cfg); });

    CLI::App* fi = app.add_subcommand("fit-intensity", "Poisson intensity fit");
    add_common(fi);
    add_bandwidths(fi);
    fi->add_option("--pattern", cfg.pattern_path, "Pattern CSV")->required();
    fi->add_option("--cubes", cfg.cubes, "Quadrature partition NX,NY,NT")->delimiter(',');
    fi->add_option("--dummy-factor", cfg.dummy_factor, "Dummy points per data point");
    fi->add_option("--covariates", cfg.covariates_path, "Covariate CSV x,y,t,z1[,z2...]");
    fi->add_flag("--local", cfg.local, "Also fit the local intensity field");
    fi->add_option("--grid", cfg.eval_grid, "Local evaluation grid NX,NY,NT")->delimiter(',');
    fi->callback([&] { cmd_fit_intensity(cfg); });

    CLI::App* fg = app.add_subcommand("fit-global", "Joint minimum-contrast fit");
    add_common(fg);
    add_lag_grid(fg);
    add_bandwidths(fg);
    add_model(fg);
    fg->add_option("--pattern", cfg.pattern_path, "Pattern CSV")->required();
    fg->callback([&] { cmd_fit_global(cfg); });

    CLI::App* fl = app.add_subcommand("fit-local", "Locally weighted minimum-contrast fit");
    add_common(fl);
    add_lag_grid(fl);
    add_bandwidths(fl);
    add_model(fl);
    fl->add_option("--pattern", cfg.pattern_path, "Pattern CSV")->required();
    fl->callback([&] { cmd_fit_local(cfg); });

    CLI::App* dg = app.add_subcommand("diagnose", "Monte Carlo goodness-of-fit test");
    add_common(dg);
    add_lag_grid(dg);
    dg->add_option("--pattern", cfg.pattern_path, "Pattern CSV")->required();
    dg->add_option("--fit", cfg.fit_path, "Global fit JSON")->required();
    dg->add_option("--local-fit", cfg.local_fit_path, "Per-point fit CSV (patchwork field)");
    dg->add_option("--q", cfg.q_replicates, "Number of Monte Carlo replicates");
    dg->add_option("--sim-grid", cfg.sim_grid, "Simulation grid NX,NY,NT")->delimiter(',');
    dg->add_option("--out", cfg.out_json, "Result JSON name");
    dg->add_option("--envelopes", cfg.envelopes_csv, "Envelope CSV name");
    dg->callback([&] { cmd_diagnose(cfg); });

    CLI::App* rp = app.add_subcommand("replicate", "Scenario replication harness");
    add_common(rp);
    add_lag_grid(rp);
    add_bandwidths(rp);
    rp->add_option("--scenario", cfg.scenario, "Catalog scenario id")->required();
    rp->add_option("--replicates", cfg.replicates, "Number of replicates");
    rp->add_option("--baseline", cfg.baseline, "Constant baseline rate (0 = from n-expected)");
    rp->add_option("--n-expected", cfg.n_expected, "Expected number of points");
    rp->add_option("--sim-grid", cfg.sim_grid, "Simulation grid NX,NY,NT")->delimiter(',');
    rp->callback([&] { cmd_replicate(cfg); });

    for (CLI::App* sub : {sim, st, fi, fg, fl, dg, rp}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> owned;
    owned.reserve(args.size() + 1);
    owned.push_back("stlgcp");
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(owned.size());
    for (const auto& a : owned) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace stlgcp
