#include "run/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bhchain/chaos.hpp"
#include "bhchain/errors.hpp"
#include "bhchain/model.hpp"
#include "bhchain/parallel.hpp"
#include "bhchain/scaling.hpp"
#include "bhchain/theory.hpp"
#include "run/outputs.hpp"

namespace bhchain::run {

namespace fs = std::filesystem;

namespace {

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string status_name(IntegrationStatus s) {
    switch (s) {
        case IntegrationStatus::Completed: return "completed";
        case IntegrationStatus::ConstraintBreach: return "constraint_breach";
        case IntegrationStatus::StepFailure: return "step_failure";
    }
    return "?";
}

std::string class_name(ScalingClass c) {
    switch (c) {
        case ScalingClass::Even: return "even";
        case ScalingClass::Normal: return "normal";
        case ScalingClass::Flat: return "flat";
        case ScalingClass::Unclassified: return "unclassified";
    }
    return "?";
}

IntegratorConfig resolve_integrator(const RunConfig& c) {
    IntegratorConfig cfg = c.integrator;
    cfg.sample_times = c.samples.build(cfg.t_end);
    return cfg;
}

json fits_to_json(const VarianceSeries& vs, const RunConfig& c) {
    json out;
    out["window"] = {c.scaling.window_lo, c.scaling.window_hi};
    out["valid_until"] = vs.valid_until;
    auto arr = json::array();
    for (int site = 1; site <= vs.L; ++site) {
        json f;
        f["site"] = site;
        try {
            const ScalingFit fit =
                fit_exponent(vs, site, c.scaling.window_lo, c.scaling.window_hi);
            f["slope"] = fit.slope;
            f["stderr"] = fit.stderr_;
            f["r2"] = fit.r2;
            f["class"] = class_name(fit.cls);
            if (fit.cls == ScalingClass::Even) f["even_k"] = fit.even_k;
        } catch (const std::exception& e) {
            f["error"] = e.what();
        }
        arr.push_back(f);
    }
    out["fits"] = arr;
    return out;
}

}  // namespace

CommandResult cmd_orbit(const RunConfig& c) {
    RunManifest manifest(c.out_dir, c.to_json());
    manifest.write_running();

    CommandResult res;
    try {
        const ActionAngleState base = c.initial.build(c.chain, c.seed);
        const PQState x0 = action_angle_to_pq(base);
        const IntegratorConfig cfg = resolve_integrator(c);
        const IntegrationOutcome o = integrate_orbit(x0, c.chain, cfg);

        CsvWriter csv;
        csv.comment("t in units of 1/J; I_n are per-site actions, phi_n their angles");
        std::vector<std::string> cols{"t"};
        for (int n = 1; n <= c.chain.L; ++n) cols.push_back("I_" + std::to_string(n));
        for (int n = 1; n <= c.chain.L; ++n) cols.push_back("phi_" + std::to_string(n));
        cols.push_back("energy");
        cols.push_back("constraint");
        csv.header(cols);
        for (std::size_t it = 0; it < o.trajectory.size(); ++it) {
            const ActionAngleState aa = pq_to_action_angle(o.trajectory.states[it]);
            std::vector<double> row{o.trajectory.times[it]};
            row.insert(row.end(), aa.I.begin(), aa.I.end());
            row.insert(row.end(), aa.phi.begin(), aa.phi.end());
            row.push_back(o.trajectory.energy[it]);
            row.push_back(o.trajectory.constraint[it]);
            csv.row(row);
        }
        manifest.write_output("orbit.csv", csv.str());
        manifest.add_task("orbit", o.completed(), status_name(o.status));

        if (!o.completed()) {
            res.exit_code = 2;
            res.message = "integration " + status_name(o.status) + " at t=" +
                          short_num(o.fail_time);
        }
    } catch (const std::exception& e) {
        manifest.add_task("orbit", false, e.what());
        manifest.finish("failed");
        return {2, e.what()};
    }
    manifest.finish(res.exit_code == 0 ? "completed" : "failed");
    return res;
}

CommandResult cmd_lyapunov(const RunConfig& c) {
    RunManifest manifest(c.out_dir, c.to_json());
    manifest.write_running();

    std::vector<std::pair<double, double>> grid;  // (U/J, mu/J)
    if (!c.sweep.U_over_J.empty()) {
        const std::vector<double> mus =
            c.sweep.mu_over_J.empty() ? std::vector<double>{c.chain.mu / c.chain.J}
                                      : c.sweep.mu_over_J;
        for (double u : c.sweep.U_over_J)
            for (double m : mus) grid.emplace_back(u, m);
    } else {
        grid.emplace_back(c.chain.U / c.chain.J, c.chain.mu / c.chain.J);
    }

    struct PointResult {
        LyapunovResult lyap;
        double energy0 = 0.0;
        bool ok = false;
        std::string error;
    };
    std::vector<PointResult> results(grid.size());

    parallel_for_static(static_cast<int>(grid.size()), resolve_workers(c.workers),
                        [&](int i) {
        PointResult& r = results[i];
        try {
            ChainParams p = c.chain;
            p.U = grid[i].first * p.J;
            p.mu = grid[i].second * p.J;
            const ActionAngleState base = c.initial.build(p, c.seed);
            const PQState x0 = action_angle_to_pq(base);
            r.energy0 = hamiltonian_pq(x0, p);
            LyapunovConfig lcfg = c.lyapunov;
            lcfg.seed = c.seed + 1;
            r.lyap = lcfg.mode == LyapunovMode::Spectrum
                         ? lyapunov_spectrum(x0, p, lcfg)
                         : lyapunov_per_site(x0, p, lcfg);
            r.ok = r.lyap.status == IntegrationStatus::Completed;
            if (!r.ok) r.error = status_name(r.lyap.status);
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
    });

    CsvWriter csv;
    csv.comment("lambda in units of J; energy0 is the initial energy of the orbit");
    std::vector<std::string> cols{"U_over_J", "mu_over_J", "energy0", "lambda_max",
                                  "converged"};
    const bool per_site = c.lyapunov.mode != LyapunovMode::MaxOnly &&
                          c.lyapunov.mode != LyapunovMode::Spectrum;
    if (per_site)
        for (int n = 1; n <= c.chain.L; ++n) cols.push_back("lambda_" + std::to_string(n));
    csv.header(cols);

    CsvWriter spec_csv;
    if (c.lyapunov.mode == LyapunovMode::Spectrum) {
        spec_csv.comment("full Lyapunov spectrum, descending, units of J");
        std::vector<std::string> scols{"U_over_J", "mu_over_J"};
        for (int n = 1; n <= 2 * c.chain.L; ++n)
            scols.push_back("lambda_" + std::to_string(n));
        spec_csv.header(scols);
    }

    int n_failed = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const PointResult& r = results[i];
        const std::string task_id =
            "U" + short_num(grid[i].first) + "_mu" + short_num(grid[i].second);
        manifest.add_task(task_id, r.ok, r.error);
        if (!r.ok) {
            ++n_failed;
            continue;
        }
        const double jj = c.chain.J;
        std::vector<double> row{grid[i].first, grid[i].second, r.energy0,
                                r.lyap.lambda_max / jj,
                                r.lyap.converged ? 1.0 : 0.0};
        if (per_site)
            for (double l : r.lyap.lambda_per_site) row.push_back(l / jj);
        csv.row(row);
        if (c.lyapunov.mode == LyapunovMode::Spectrum) {
            std::vector<double> srow{grid[i].first, grid[i].second};
            for (double l : r.lyap.spectrum) srow.push_back(l / jj);
            spec_csv.row(srow);
        }
    }
    manifest.write_output("lyapunov.csv", csv.str());
    if (c.lyapunov.mode == LyapunovMode::Spectrum)
        manifest.write_output("spectrum.csv", spec_csv.str());

    CommandResult res;
    if (n_failed == static_cast<int>(grid.size())) {
        res = {2, "all grid points failed"};
        manifest.finish("failed");
    } else if (n_failed > 0) {
        res = {3, std::to_string(n_failed) + " grid point(s) failed"};
        manifest.finish("partial");
    } else {
        manifest.finish("completed");
    }
    return res;
}

CommandResult cmd_ensemble(const RunConfig& c) {
    RunManifest manifest(c.out_dir, c.to_json());
    manifest.write_running();

    CommandResult res;
    try {
        EnsembleSpec spec = c.ensemble;
        spec.base = c.initial.build(c.chain, c.seed);
        spec.seed = c.seed;
        const std::vector<PQState> members = make_ensemble(spec, c.chain);
        const IntegratorConfig cfg = resolve_integrator(c);
        const VarianceSeries vs = evolve_ensemble(members, c.chain, cfg, c.workers);

        CsvWriter csv;
        csv.comment("t in units of 1/J; var_n and mean_n are the per-site action "
                    "variance and mean over the ensemble");
        std::vector<std::string> cols{"t"};
        for (int n = 1; n <= vs.L; ++n) cols.push_back("var_" + std::to_string(n));
        for (int n = 1; n <= vs.L; ++n) cols.push_back("mean_" + std::to_string(n));
        csv.header(cols);
        for (std::size_t it = 0; it < vs.times.size(); ++it) {
            std::vector<double> row{vs.times[it]};
            for (int n = 0; n < vs.L; ++n) row.push_back(vs.var_at(it, n));
            for (int n = 0; n < vs.L; ++n) row.push_back(vs.mean_at(it, n));
            csv.row(row);
        }
        manifest.write_output("variance.csv", csv.str());

        manifest.write_output("fits.json", fits_to_json(vs, c).dump(2) + "\n");

        const auto preds = predict_exponents(c.chain, spec.base, c.scaling.series,
                                             c.scaling.fill_threshold);
        auto parr = json::array();
        for (const auto& p : preds) {
            json jp;
            jp["site"] = p.site;
            if (p.no_transport) {
                jp["no_transport"] = true;
            } else {
                jp["m"] = p.m;
                jp["zeta"] = p.zeta;
            }
            jp["series"] = p.series == ExponentSeries::FourM ? "four_m" : "two_m";
            parr.push_back(jp);
        }
        manifest.write_output("predictions.json", parr.dump(2) + "\n");

        if (c.scaling.detect_crossover) {
            auto carr = json::array();
            for (int site = 1; site <= vs.L; ++site) {
                try {
                    const auto cr = detect_crossover(vs, site);
                    if (cr) {
                        json jc;
                        jc["site"] = site;
                        jc["t_star"] = cr->t_star;
                        if (cr->t_star2) jc["t_star2"] = *cr->t_star2;
                        carr.push_back(jc);
                    }
                } catch (const std::exception&) {
                    // series too short for this site; skip
                }
            }
            if (!carr.empty())
                manifest.write_output("crossover.json", carr.dump(2) + "\n");
        }

        const bool truncated = vs.valid_until < cfg.t_end * (1 - 1e-9);
        manifest.add_task("ensemble", true,
                          truncated ? "truncated at t=" + short_num(vs.valid_until) : "");
        if (truncated) {
            res.exit_code = 3;
            res.message = "ensemble truncated at t=" + short_num(vs.valid_until);
        }
    } catch (const std::exception& e) {
        manifest.add_task("ensemble", false, e.what());
        manifest.finish("failed");
        return {2, e.what()};
    }
    manifest.finish(res.exit_code == 0 ? "completed" : "partial");
    return res;
}

CommandResult cmd_sweep(const RunConfig& c) {
    RunManifest manifest(c.out_dir, c.to_json());
    manifest.write_running();

    CsvWriter summary;
    summary.comment("one sub-run per grid point; see each directory's run_manifest.json");
    summary.header({"U_over_J", "mu_over_J", "dir", "exit_code"});

    int n_failed = 0, n_total = 0;
    for (double u : c.sweep.U_over_J) {
        for (double m : c.sweep.mu_over_J) {
            ++n_total;
            RunConfig sub = c;
            sub.experiment = c.sweep.sub;
            sub.chain.U = u * c.chain.J;
            sub.chain.mu = m * c.chain.J;
            sub.sweep = SweepSpec{};
            const std::string leaf = "U" + short_num(u) + "_mu" + short_num(m);
            sub.out_dir = (fs::path(c.out_dir) / leaf).string();
            CommandResult r;
            switch (sub.experiment) {
                case ExperimentKind::Orbit: r = cmd_orbit(sub); break;
                case ExperimentKind::Lyapunov: r = cmd_lyapunov(sub); break;
                case ExperimentKind::Ensemble: r = cmd_ensemble(sub); break;
                case ExperimentKind::Theory: r = cmd_theory(sub); break;
                default: r = {1, "sweep cannot nest sweep"}; break;
            }
            if (r.exit_code != 0) ++n_failed;
            manifest.add_task(leaf, r.exit_code == 0, r.message);
            summary.raw_row({format_number(u), format_number(m), leaf,
                             std::to_string(r.exit_code)});
        }
    }
    manifest.write_output("sweep_summary.csv", summary.str());

    CommandResult res;
    if (n_failed == n_total) {
        res = {2, "all sweep points failed"};
        manifest.finish("failed");
    } else if (n_failed > 0) {
        res = {3, std::to_string(n_failed) + " sweep point(s) failed"};
        manifest.finish("partial");
    } else {
        manifest.finish("completed");
    }
    return res;
}

namespace {

json matrix_to_json(const DiffusionMatrix& m) {
    json out;
    out["dim"] = m.dim;
    out["normalization"] = m.normalization;
    auto rows = json::array();
    for (int i = 0; i < m.dim; ++i) {
        auto r = json::array();
        for (int j = 0; j < m.dim; ++j) r.push_back(m.at(i, j));
        rows.push_back(r);
    }
    out["entries"] = rows;
    return out;
}

}  // namespace

CommandResult cmd_theory(const RunConfig& c) {
    RunManifest manifest(c.out_dir, c.to_json());
    manifest.write_running();

    CommandResult res;
    try {
        std::vector<double> I = c.theory.actions;
        if (I.empty()) I = c.initial.build(c.chain, c.seed).I;
        if (static_cast<int>(I.size()) != c.chain.L)
            throw std::invalid_argument("theory.actions must have L entries");
        // exact renormalization onto the constraint sphere
        double s = 0.0;
        for (double v : I) s += v;
        if (!(s > 0.0)) throw std::invalid_argument("theory.actions have no mass");
        for (double& v : I) v *= c.chain.norm / s;

        json out;
        out["actions"] = I;
        out["leading"] = matrix_to_json(diffusion_matrix_leading(I, c.chain));
        out["langevin"] = matrix_to_json(diffusion_matrix_langevin(I, c.chain));
        out["sigma_offdiag"] = langevin_sigma_offdiag(I, c.chain);
        out["variance_rates"] = variance_growth_rates_langevin(I, c.chain);

        if (c.chain.U != 0.0) {
            auto h2 = json::array();
            for (int j = 1; j <= c.chain.L - 1; ++j) {
                try {
                    h2.push_back(perturb_coeff_h2(I, j, c.chain));
                } catch (const ResonanceDivergence&) {
                    h2.push_back(nullptr);
                    manifest.add_task("h2_bond" + std::to_string(j), true,
                                      "resonance divergence");
                }
            }
            out["h2"] = h2;
            auto h2t = json::array();
            for (int j = 2; j <= c.chain.L - 1; ++j) {
                try {
                    h2t.push_back(perturb_coeff_h2tilde(I, j, c.chain));
                } catch (const ResonanceDivergence&) {
                    h2t.push_back(nullptr);
                    manifest.add_task("h2tilde_site" + std::to_string(j), true,
                                      "resonance divergence");
                }
            }
            out["h2tilde"] = h2t;
        }

        if (c.theory.mc_samples > 0) {
            const auto mc = angle_average_mc(I, c.chain, c.theory.mc_samples, c.seed);
            json jm;
            jm["samples"] = mc.samples;
            jm["raw"] = matrix_to_json(mc.raw);
            jm["normalized"] = matrix_to_json(mc.normalized);
            jm["stderr"] = matrix_to_json(mc.stderr_);
            const auto lead = diffusion_matrix_leading(I, c.chain);
            double max_rel = 0.0;
            for (int i = 0; i < lead.dim; ++i)
                for (int j = 0; j < lead.dim; ++j) {
                    const double ref = lead.at(i, j);
                    if (std::abs(ref) > 1e-12)
                        max_rel = std::max(max_rel,
                                           std::abs(mc.normalized.at(i, j) - ref) /
                                               std::abs(ref));
                }
            jm["max_rel_dev_vs_leading"] = max_rel;
            out["mc"] = jm;
        }

        manifest.write_output("theory.json", out.dump(2) + "\n");

        if (c.theory.dnse_I0) {
            std::vector<double> ts;
            const int np = std::max(c.theory.dnse_points, 2);
            for (int i = 0; i < np; ++i)
                ts.push_back(c.theory.dnse_t_end * i / (np - 1));
            const DnseSolution sol = dnse_homogeneous(*c.theory.dnse_I0, c.chain, ts);
            CsvWriter csv;
            csv.comment("homogeneous J=0 lattice-NLS amplitude; action = |f|^2");
            csv.header({"t", "re_f", "im_f", "action"});
            for (std::size_t i = 0; i < ts.size(); ++i)
                csv.row({sol.times[i], sol.f[i].real(), sol.f[i].imag(), sol.action[i]});
            manifest.write_output("dnse.csv", csv.str());
            if (sol.branch_crossing)
                manifest.add_task("dnse", true, "branch crossing detected");
        }

        if (!c.theory.variance_csv.empty()) {
            if (!(c.theory.fit_window_hi > c.theory.fit_window_lo) ||
                !(c.theory.fit_window_lo > 0.0))
                throw std::invalid_argument(
                    "theory.fit_window_lo/hi required with variance_csv");
            const VarianceSeries vs = read_variance_csv(c.theory.variance_csv);
            const auto fits = fit_diffusion_coefficients(vs, c.theory.fit_window_lo,
                                                         c.theory.fit_window_hi);
            // evaluate the prediction at the window-mean action profile
            std::vector<double> Ibar(vs.L, 0.0);
            int nw = 0;
            for (std::size_t it = 0; it < vs.times.size(); ++it) {
                if (vs.times[it] < c.theory.fit_window_lo ||
                    vs.times[it] > c.theory.fit_window_hi)
                    continue;
                ++nw;
                for (int n = 0; n < vs.L; ++n) Ibar[n] += vs.mean_at(it, n);
            }
            if (nw == 0) throw std::invalid_argument("fit window has no samples");
            for (double& v : Ibar) v /= nw;
            ChainParams p = c.chain;
            p.L = vs.L;
            double sb = 0.0;
            for (double v : Ibar) sb += v;
            for (double& v : Ibar) v *= p.norm / sb;
            const auto rates = variance_growth_rates_langevin(Ibar, p);

            CsvWriter csv;
            csv.comment("D_fit: fitted growth rate of sigma^2(I_n); D_pred: Langevin "
                        "prediction 2 I_n D_nn at the window-mean actions");
            csv.header({"site", "D_fit", "slope_loglog", "normal", "D_pred", "log_ratio"});
            for (const auto& f : fits) {
                const double pred = rates[f.site - 1];
                const double lr = (f.D > 0.0 && pred > 0.0) ? std::log(f.D / pred)
                                                            : std::nan("");
                csv.raw_row({std::to_string(f.site), format_number(f.D),
                             format_number(f.slope_loglog),
                             f.normal ? "1" : "0", format_number(pred),
                             format_number(lr)});
            }
            manifest.write_output("dcoeff_table.csv", csv.str());
        }

        manifest.add_task("theory", true, "");
    } catch (const std::exception& e) {
        manifest.add_task("theory", false, e.what());
        manifest.finish("failed");
        return {2, e.what()};
    }
    manifest.finish("completed");
    return res;
}

VarianceSeries read_variance_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::string line;
    VarianceSeries vs;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            int nvar = 0;
            for (const auto& cname : cells)
                if (cname.rfind("var_", 0) == 0) ++nvar;
            if (nvar == 0 || cells.size() != 1 + 2 * static_cast<std::size_t>(nvar))
                throw std::invalid_argument(path + ": not a variance.csv header");
            vs.L = nvar;
            have_header = true;
            continue;
        }
        if (cells.size() != 1 + 2 * static_cast<std::size_t>(vs.L))
            throw std::invalid_argument(path + ": ragged row");
        vs.times.push_back(std::stod(cells[0]));
        for (int n = 0; n < vs.L; ++n) vs.var.push_back(std::stod(cells[1 + n]));
        for (int n = 0; n < vs.L; ++n)
            vs.mean.push_back(std::stod(cells[1 + vs.L + n]));
    }
    if (!have_header) throw std::invalid_argument(path + ": empty file");
    vs.valid_until = vs.times.empty() ? 0.0 : vs.times.back();
    return vs;
}

CommandResult run_experiment(const RunConfig& c) {
    switch (c.experiment) {
        case ExperimentKind::Orbit: return cmd_orbit(c);
        case ExperimentKind::Lyapunov: return cmd_lyapunov(c);
        case ExperimentKind::Ensemble: return cmd_ensemble(c);
        case ExperimentKind::Sweep: return cmd_sweep(c);
        case ExperimentKind::Theory: return cmd_theory(c);
    }
    return {1, "unknown experiment"};
}

}  // namespace bhchain::run
