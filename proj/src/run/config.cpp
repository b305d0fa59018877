#include "run/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bhchain/errors.hpp"
#include "bhchain/rng.hpp"

namespace bhchain::run {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

[[noreturn]] void bad(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

ExperimentKind parse_kind(const std::string& s) {
    if (s == "orbit") return ExperimentKind::Orbit;
    if (s == "lyapunov") return ExperimentKind::Lyapunov;
    if (s == "ensemble") return ExperimentKind::Ensemble;
    if (s == "sweep") return ExperimentKind::Sweep;
    if (s == "theory") return ExperimentKind::Theory;
    bad("unknown experiment kind '" + s + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T def) {
    if (!j.contains(key)) return def;
    return j.at(key).get<T>();
}

}  // namespace

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Orbit: return "orbit";
        case ExperimentKind::Lyapunov: return "lyapunov";
        case ExperimentKind::Ensemble: return "ensemble";
        case ExperimentKind::Sweep: return "sweep";
        case ExperimentKind::Theory: return "theory";
    }
    return "?";
}

ActionAngleState InitialSpec::build(const ChainParams& params, std::uint64_t seed) const {
    const int L = params.L;
    ActionAngleState s(L);
    switch (kind) {
        case Kind::FilledSites: {
            if (sites.empty()) bad("initial.sites must be non-empty for filled_sites");
            std::vector<double> fill = fillings;
            if (fill.empty()) fill.assign(sites.size(), 1.0);
            if (fill.size() != sites.size())
                bad("initial.fillings must match initial.sites");
            for (std::size_t i = 0; i < sites.size(); ++i) {
                const int n = sites[i];
                if (n < 1 || n > L) bad("initial site index out of range");
                s.I[n - 1] = fill[i];
            }
            break;
        }
        case Kind::Homogeneous:
            std::fill(s.I.begin(), s.I.end(), 1.0);
            break;
        case Kind::Explicit: {
            if (static_cast<int>(I.size()) != L) bad("initial.I must have L entries");
            s.I = I;
            if (!phi.empty()) {
                if (static_cast<int>(phi.size()) != L) bad("initial.phi must have L entries");
                s.phi = phi;
            }
            break;
        }
        case Kind::RandomUniform: {
            SplitMix64 rng = seed_stream(seed, 0x1c0ULL);
            for (int j = 0; j < L; ++j) s.I[j] = rng.uniform();
            break;
        }
    }
    if (random_angles || kind == Kind::RandomUniform) {
        SplitMix64 rng = seed_stream(seed, 0x1c1ULL);
        for (int j = 0; j < L; ++j) s.phi[j] = rng.uniform(0.0, kTwoPi);
    }
    // floor the empty sites, then put the sum exactly on the constraint sphere
    double sum = 0.0;
    for (int j = 0; j < L; ++j) {
        s.I[j] = std::max(s.I[j], action_floor);
        sum += s.I[j];
    }
    if (!(sum > 0.0)) bad("initial actions have no mass");
    const double scale = params.norm / sum;
    for (int j = 0; j < L; ++j) s.I[j] *= scale;
    return s;
}

std::vector<double> SampleSpec::build(double t_end) const {
    switch (kind) {
        case Kind::Log:
            return log_schedule(t_min, t_end, points_per_decade);
        case Kind::Linear: {
            if (!(dt > 0.0)) bad("samples.dt must be > 0 for linear schedule");
            std::vector<double> out;
            for (double t = dt; t < t_end * (1 - 1e-12); t += dt) out.push_back(t);
            out.push_back(t_end);
            return out;
        }
        case Kind::Explicit:
            return times;
    }
    return {};
}

void RunConfig::validate() const {
    chain.validate();
    if (experiment == ExperimentKind::Sweep &&
        (sweep.U_over_J.empty() || sweep.mu_over_J.empty()))
        bad("sweep requires non-empty U_over_J and mu_over_J grids");
    if (out_dir.empty()) bad("out_dir must be set");
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    c.experiment = parse_kind(j.value("experiment", "orbit"));

    if (j.contains("chain")) {
        const auto& jc = j.at("chain");
        c.chain.L = get_or(jc, "L", 2);
        c.chain.J = get_or(jc, "J", 1.0);
        c.chain.U = get_or(jc, "U", 0.0);
        c.chain.mu = get_or(jc, "mu", 0.0);
        c.chain.norm = get_or(jc, "norm", 1.0);
        const std::string b = get_or<std::string>(jc, "boundary", "hard_wall");
        if (b == "hard_wall") c.chain.boundary = Boundary::HardWall;
        else if (b == "periodic") c.chain.boundary = Boundary::Periodic;
        else bad("chain.boundary must be hard_wall or periodic");
    }

    if (j.contains("initial")) {
        const auto& ji = j.at("initial");
        const std::string k = get_or<std::string>(ji, "kind", "filled_sites");
        if (k == "filled_sites") c.initial.kind = InitialSpec::Kind::FilledSites;
        else if (k == "homogeneous") c.initial.kind = InitialSpec::Kind::Homogeneous;
        else if (k == "explicit") c.initial.kind = InitialSpec::Kind::Explicit;
        else if (k == "random_uniform") c.initial.kind = InitialSpec::Kind::RandomUniform;
        else bad("initial.kind unknown: " + k);
        c.initial.sites = get_or(ji, "sites", std::vector<int>{});
        c.initial.fillings = get_or(ji, "fillings", std::vector<double>{});
        c.initial.I = get_or(ji, "I", std::vector<double>{});
        c.initial.phi = get_or(ji, "phi", std::vector<double>{});
        c.initial.random_angles = get_or(ji, "random_angles", false);
        c.initial.action_floor = get_or(ji, "action_floor", 1e-12);
    }

    if (j.contains("integrator")) {
        const auto& jo = j.at("integrator");
        c.integrator.rel_tol = get_or(jo, "rel_tol", IntegratorConfig{}.rel_tol);
        c.integrator.abs_tol = get_or(jo, "abs_tol", IntegratorConfig{}.abs_tol);
        c.integrator.t_end = get_or(jo, "t_end", 0.0);
        c.integrator.constraint_tol = get_or(jo, "constraint_tol", 0.01);
        const std::string m = get_or<std::string>(jo, "mode", "unconstrained");
        if (m == "unconstrained") c.integrator.mode = IntegrationMode::Unconstrained;
        else if (m == "projected") c.integrator.mode = IntegrationMode::Projected;
        else bad("integrator.mode must be unconstrained or projected");
        if (jo.contains("samples")) {
            const auto& js = jo.at("samples");
            const std::string sk = get_or<std::string>(js, "kind", "log");
            if (sk == "log") c.samples.kind = SampleSpec::Kind::Log;
            else if (sk == "linear") c.samples.kind = SampleSpec::Kind::Linear;
            else if (sk == "explicit") c.samples.kind = SampleSpec::Kind::Explicit;
            else bad("samples.kind unknown: " + sk);
            c.samples.t_min = get_or(js, "t_min", 0.1);
            c.samples.points_per_decade = get_or(js, "points_per_decade", 20);
            c.samples.dt = get_or(js, "dt", 0.0);
            c.samples.times = get_or(js, "times", std::vector<double>{});
        }
    }

    if (j.contains("ensemble")) {
        const auto& je = j.at("ensemble");
        c.ensemble.count = get_or(je, "count", 100);
        c.ensemble.width = get_or(je, "width", 1e-3);
        const std::string d = get_or<std::string>(je, "dist", "gaussian");
        if (d == "gaussian") c.ensemble.dist = EnsembleDist::Gaussian;
        else if (d == "uniform") c.ensemble.dist = EnsembleDist::Uniform;
        else bad("ensemble.dist must be gaussian or uniform");
        const std::string a = get_or<std::string>(je, "angle_init", "uniform_random");
        if (a == "uniform_random") c.ensemble.angle_init = AngleInit::UniformRandom;
        else if (a == "fixed_base") c.ensemble.angle_init = AngleInit::FixedBase;
        else bad("ensemble.angle_init must be uniform_random or fixed_base");
        c.ensemble.action_floor = get_or(je, "action_floor", 1e-12);
        c.ensemble.renormalize = get_or(je, "renormalize", false);
    }

    if (j.contains("lyapunov")) {
        const auto& jl = j.at("lyapunov");
        c.lyapunov.t_transient = get_or(jl, "t_transient", 10.0);
        c.lyapunov.t_total = get_or(jl, "t_total", 1000.0);
        c.lyapunov.delta0 = get_or(jl, "delta0", 1e-9);
        c.lyapunov.renorm_interval = get_or(jl, "renorm_interval", 1.0);
        c.lyapunov.rel_tol = get_or(jl, "rel_tol", 1e-10);
        c.lyapunov.abs_tol = get_or(jl, "abs_tol", 1e-10);
        const std::string m = get_or<std::string>(jl, "mode", "per_site");
        if (m == "per_site") c.lyapunov.mode = LyapunovMode::PerSite;
        else if (m == "max_only") c.lyapunov.mode = LyapunovMode::MaxOnly;
        else if (m == "spectrum") c.lyapunov.mode = LyapunovMode::Spectrum;
        else bad("lyapunov.mode unknown: " + m);
    }

    if (j.contains("sweep")) {
        const auto& js = j.at("sweep");
        c.sweep.U_over_J = get_or(js, "U_over_J", std::vector<double>{});
        c.sweep.mu_over_J = get_or(js, "mu_over_J", std::vector<double>{});
        c.sweep.sub = parse_kind(get_or<std::string>(js, "run", "ensemble"));
    }

    if (j.contains("scaling")) {
        const auto& js = j.at("scaling");
        c.scaling.window_lo = get_or(js, "window_lo", 10.0);
        c.scaling.window_hi = get_or(js, "window_hi", 1000.0);
        c.scaling.fill_threshold = get_or(js, "fill_threshold", 0.1);
        c.scaling.detect_crossover = get_or(js, "detect_crossover", false);
        const std::string s = get_or<std::string>(js, "series", "four_m");
        if (s == "four_m") c.scaling.series = ExponentSeries::FourM;
        else if (s == "two_m") c.scaling.series = ExponentSeries::TwoM;
        else bad("scaling.series must be four_m or two_m");
    }

    if (j.contains("theory")) {
        const auto& jt = j.at("theory");
        c.theory.actions = get_or(jt, "actions", std::vector<double>{});
        c.theory.mc_samples = get_or<std::uint64_t>(jt, "mc_samples", 0);
        if (jt.contains("dnse_I0")) c.theory.dnse_I0 = jt.at("dnse_I0").get<double>();
        c.theory.dnse_t_end = get_or(jt, "dnse_t_end", 10.0);
        c.theory.dnse_points = get_or(jt, "dnse_points", 1000);
        c.theory.variance_csv = get_or<std::string>(jt, "variance_csv", "");
        c.theory.fit_window_lo = get_or(jt, "fit_window_lo", 0.0);
        c.theory.fit_window_hi = get_or(jt, "fit_window_hi", 0.0);
    }

    c.out_dir = get_or<std::string>(j, "out", "out");
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    c.workers = get_or(j, "workers", 0);
    return c;
}

json RunConfig::to_json() const {
    json j;
    j["experiment"] = to_string(experiment);
    j["chain"] = {{"L", chain.L}, {"J", chain.J}, {"U", chain.U}, {"mu", chain.mu},
                  {"boundary", bhchain::to_string(chain.boundary)}, {"norm", chain.norm}};
    json ji;
    switch (initial.kind) {
        case InitialSpec::Kind::FilledSites: ji["kind"] = "filled_sites"; break;
        case InitialSpec::Kind::Homogeneous: ji["kind"] = "homogeneous"; break;
        case InitialSpec::Kind::Explicit: ji["kind"] = "explicit"; break;
        case InitialSpec::Kind::RandomUniform: ji["kind"] = "random_uniform"; break;
    }
    if (!initial.sites.empty()) ji["sites"] = initial.sites;
    if (!initial.fillings.empty()) ji["fillings"] = initial.fillings;
    if (!initial.I.empty()) ji["I"] = initial.I;
    if (!initial.phi.empty()) ji["phi"] = initial.phi;
    ji["random_angles"] = initial.random_angles;
    ji["action_floor"] = initial.action_floor;
    j["initial"] = ji;

    json jo;
    jo["rel_tol"] = integrator.rel_tol;
    jo["abs_tol"] = integrator.abs_tol;
    jo["t_end"] = integrator.t_end;
    jo["constraint_tol"] = integrator.constraint_tol;
    jo["mode"] = integrator.mode == IntegrationMode::Projected ? "projected"
                                                               : "unconstrained";
    json js;
    switch (samples.kind) {
        case SampleSpec::Kind::Log: js["kind"] = "log"; break;
        case SampleSpec::Kind::Linear: js["kind"] = "linear"; break;
        case SampleSpec::Kind::Explicit: js["kind"] = "explicit"; break;
    }
    js["t_min"] = samples.t_min;
    js["points_per_decade"] = samples.points_per_decade;
    if (samples.dt > 0.0) js["dt"] = samples.dt;
    if (!samples.times.empty()) js["times"] = samples.times;
    jo["samples"] = js;
    j["integrator"] = jo;

    j["ensemble"] = {
        {"count", ensemble.count},
        {"width", ensemble.width},
        {"dist", ensemble.dist == EnsembleDist::Gaussian ? "gaussian" : "uniform"},
        {"angle_init",
         ensemble.angle_init == AngleInit::UniformRandom ? "uniform_random" : "fixed_base"},
        {"action_floor", ensemble.action_floor},
        {"renormalize", ensemble.renormalize}};

    std::string lmode = "per_site";
    if (lyapunov.mode == LyapunovMode::MaxOnly) lmode = "max_only";
    if (lyapunov.mode == LyapunovMode::Spectrum) lmode = "spectrum";
    j["lyapunov"] = {{"t_transient", lyapunov.t_transient},
                     {"t_total", lyapunov.t_total},
                     {"delta0", lyapunov.delta0},
                     {"renorm_interval", lyapunov.renorm_interval},
                     {"rel_tol", lyapunov.rel_tol},
                     {"abs_tol", lyapunov.abs_tol},
                     {"mode", lmode}};

    if (!sweep.U_over_J.empty() || !sweep.mu_over_J.empty())
        j["sweep"] = {{"U_over_J", sweep.U_over_J},
                      {"mu_over_J", sweep.mu_over_J},
                      {"run", to_string(sweep.sub)}};

    j["scaling"] = {{"window_lo", scaling.window_lo},
                    {"window_hi", scaling.window_hi},
                    {"fill_threshold", scaling.fill_threshold},
                    {"detect_crossover", scaling.detect_crossover},
                    {"series", scaling.series == ExponentSeries::FourM ? "four_m" : "two_m"}};

    json jt;
    if (!theory.actions.empty()) jt["actions"] = theory.actions;
    if (theory.mc_samples > 0) jt["mc_samples"] = theory.mc_samples;
    if (theory.dnse_I0) jt["dnse_I0"] = *theory.dnse_I0;
    jt["dnse_t_end"] = theory.dnse_t_end;
    jt["dnse_points"] = theory.dnse_points;
    if (!theory.variance_csv.empty()) jt["variance_csv"] = theory.variance_csv;
    if (theory.fit_window_hi > 0.0) {
        jt["fit_window_lo"] = theory.fit_window_lo;
        jt["fit_window_hi"] = theory.fit_window_hi;
    }
    j["theory"] = jt;

    j["out"] = out_dir;
    j["seed"] = seed;
    j["workers"] = workers;
    return j;
}

namespace {

json parse_override_value(const std::string& v) {
    // try JSON first (numbers, booleans, arrays), fall back to string
    try {
        return json::parse(v);
    } catch (...) {
        return json(v);
    }
}

void apply_override(json& doc, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        bad("override '" + kv + "' is not of the form key=value");
    std::string path = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    while (!path.empty() && path.front() == '-') path.erase(path.begin());
    std::string ptr = "/";
    for (char ch : path) ptr += (ch == '.') ? '/' : ch;
    doc[json::json_pointer(ptr)] = parse_override_value(value);
}

}  // namespace

RunConfig config_from_json_text(const std::string& text,
                                const std::vector<std::string>& overrides) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        bad(std::string("invalid JSON: ") + e.what());
    }
    for (const auto& kv : overrides) apply_override(doc, kv);
    RunConfig c = RunConfig::from_json(doc);
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) bad("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json_text(ss.str(), overrides);
}

}  // namespace bhchain::run
