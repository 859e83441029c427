// jfan_cli: command-line surface over the library. Subcommands generate and
// cache coefficient streams, fit growth scalings, print scaled-value tables,
// report spectra, run continuous ray checks, emit gamma classes, and check
// the Riemann-Liouville identities.
//
// Exit codes: 0 success, 2 validation error, 3 numeric-quality failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <jfan/jfan.hpp>

namespace {

using namespace jfan;

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    for (const std::string& part : jfan::detail::split(s, ','))
        if (!part.empty()) out.push_back(std::stod(part));
    return out;
}

cplx parse_complex(const std::string& s) {
    const std::vector<double> v = parse_list(s);
    if (v.empty() || v.size() > 2)
        throw CLI::ValidationError("expected 're' or 're,im', got '" + s + "'");
    return cplx(v[0], v.size() == 2 ? v[1] : 0.0);
}

std::pair<int, int> parse_window(const std::string& s) {
    const size_t colon = s.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("expected 'm0:m1', got '" + s + "'");
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
}

int functional_index(const std::string& s, const RingPtr& ring) {
    if (s.empty() || s == "top") return ring->n() - 1;
    if (s == "pt") return 0;
    if (s.rfind("idx:", 0) == 0) {
        const int k = std::stoi(s.substr(4));
        if (k < 0 || k >= ring->n())
            throw CLI::ValidationError("functional index out of range");
        return k;
    }
    throw CLI::ValidationError("functional must be pt, top, or idx:<k>");
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + out_path);
    f << text;
}

CoeffStream stream_from_target(const std::vector<std::string>& target, int M) {
    ManifoldSpec spec;
    spec.M = M;
    if (target.empty()) throw CLI::ValidationError("missing generation target");
    const std::string& head = target[0];
    if (head == "X3") {
        spec.kind = "X3";
    } else if (head == "product") {
        if (target.size() != 3)
            throw CLI::ValidationError("usage: gen product <factor> <factor>");
        spec.kind = "product";
        spec.factors = {target[1], target[2]};
    } else if (head == "hypersurface") {
        if (target.size() != 3)
            throw CLI::ValidationError("usage: gen hypersurface <ambient> <degree>");
        spec.kind = "hypersurface";
        spec.ambient = target[1];
        spec.d = std::stoi(target[2]);
    } else if (head == "config") {
        if (target.size() != 2) throw CLI::ValidationError("usage: gen config <path>");
        std::ifstream f(target[1]);
        if (!f) throw CLI::ValidationError("cannot open config " + target[1]);
        std::ostringstream ss;
        ss << f.rdbuf();
        spec = parse_manifold_spec(ss.str());
        if (M > 0) spec.M = M;
        return build_stream(spec);
    } else if (head.size() >= 2 && head[0] == 'P') {
        spec.kind = "projective";
        spec.N = std::stoi(head.substr(1));
    } else {
        throw CLI::ValidationError("unknown target '" + head + "'");
    }
    return build_stream(spec);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cohomology-valued coefficient streams and growth-scaling fits"};
    app.require_subcommand(1);

    // ---- gen
    auto* gen = app.add_subcommand("gen", "generate a coefficient stream cache");
    std::vector<std::string> gen_target;
    int gen_M = 0;
    std::string gen_out;
    gen->add_option("target", gen_target,
                    "P<N> | X3 | product <A> <B> | hypersurface <ambient> <d> | config <path>")
        ->required();
    gen->add_option("--M", gen_M, "truncation order")->required();
    gen->add_option("--out", gen_out, "cache output path")->required();

    // ---- fit
    auto* fit = app.add_subcommand("fit", "fit (T, theta, A) from a cached stream");
    std::string fit_cache, fit_window, fit_functional, fit_out;
    int fit_aitken = 0;
    fit->add_option("--cache", fit_cache, "stream cache path")->required();
    fit->add_option("--window", fit_window, "fit window m0:m1")->required();
    fit->add_option("--functional", fit_functional, "pt | top | idx:<k>");
    fit->add_option("--aitken", fit_aitken, "acceleration passes on the estimates");
    std::string fit_format = "json";
    fit->add_option("--format", fit_format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    fit->add_option("--out", fit_out, "output path (default stdout)");

    // ---- scale
    auto* scale = app.add_subcommand("scale", "print scaled coefficient values");
    std::string sc_cache, sc_mode = "gamma", sc_rows, sc_out;
    double sc_T = 0, sc_theta = 0;
    scale->add_option("--cache", sc_cache)->required();
    scale->add_option("--T", sc_T, "growth scale")->required();
    scale->add_option("--theta", sc_theta, "growth argument");
    scale->add_option("--mode", sc_mode, "gamma | table");
    scale->add_option("--rows", sc_rows, "comma-separated m values (default all)");
    std::string sc_format = "csv";
    scale->add_option("--format", sc_format, "csv | json")
        ->check(CLI::IsMember({"json", "csv"}));
    scale->add_option("--out", sc_out);

    // ---- table-x3
    auto* tab = app.add_subcommand("table-x3", "scaled-value table for the toric bundle");
    std::string tab_cache, tab_rows = "14,15,16,17,30", tab_out;
    bool tab_machine = false;
    tab->add_option("--cache", tab_cache, "X3 stream cache")->required();
    tab->add_option("--rows", tab_rows, "comma-separated m values");
    tab->add_flag("--machine", tab_machine, "17-digit raw values instead of 1e-3 units");
    tab->add_option("--out", tab_out);

    // ---- spectra
    auto* spec = app.add_subcommand("spectra", "spectrum report for a builtin manifold");
    std::string spec_target, spec_out;
    spec->add_option("target", spec_target, "P<N> | X3")->required();
    std::string spec_format = "json";
    spec->add_option("--format", spec_format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    spec->add_option("--out", spec_out);

    // ---- continuous
    auto* cont = app.add_subcommand("continuous", "ray-limit checks of the series");
    std::string cont_cache, cont_window, cont_functional, cont_phi = "0", cont_tgrid, cont_out;
    cont->add_option("--cache", cont_cache)->required();
    cont->add_option("--window", cont_window, "fit window m0:m1")->required();
    cont->add_option("--functional", cont_functional, "pt | top | idx:<k>");
    cont->add_option("--phi", cont_phi, "comma-separated ray angles");
    cont->add_option("--tgrid", cont_tgrid, "comma-separated |t| values");
    cont->add_option("--out", cont_out);

    // ---- gamma-class
    auto* gam = app.add_subcommand("gamma-class", "gamma class of a builtin manifold");
    std::string gam_target, gam_out;
    gam->add_option("target", gam_target, "P<N> | X3")->required();
    gam->add_option("--out", gam_out);

    // ---- rl-check
    auto* rl = app.add_subcommand("rl-check", "Riemann-Liouville identity residuals");
    std::string rl_alpha = "1", rl_beta = "0.5", rl_alpha_nil, rl_beta_nil;
    std::string rl_lambda = "2", rl_tgrid = "5,10,20", rl_out;
    rl->add_option("--alpha0", rl_alpha, "scalar part of alpha: re[,im]");
    rl->add_option("--beta0", rl_beta, "scalar part of beta: re[,im]");
    rl->add_option("--alpha-nil", rl_alpha_nil, "degree-2 part of alpha: re[,im]");
    rl->add_option("--beta-nil", rl_beta_nil, "degree-2 part of beta: re[,im]");
    rl->add_option("--lambda", rl_lambda, "exponential rate: re[,im]");
    rl->add_option("--tgrid", rl_tgrid, "comma-separated t values");
    rl->add_option("--out", rl_out);

    // ---- report
    auto* rep = app.add_subcommand("report", "fit + spectral prediction + verification");
    std::string rep_cache, rep_window, rep_functional, rep_out;
    int rep_aitken = 0;
    rep->add_option("--cache", rep_cache)->required();
    rep->add_option("--window", rep_window, "fit window m0:m1")->required();
    rep->add_option("--functional", rep_functional, "pt | top | idx:<k>");
    rep->add_option("--aitken", rep_aitken, "acceleration passes");
    rep->add_option("--out", rep_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const CoeffStream s = stream_from_target(gen_target, gen_M);
            save_stream(gen_out, s);
            std::printf("wrote %s: %d coefficients, r=%d, ring %s\n", gen_out.c_str(),
                        static_cast<int>(s.coeffs.size()), s.r, s.ring->name.c_str());
            return 0;
        }
        if (fit->parsed()) {
            const CoeffStream s = load_stream(fit_cache);
            const auto [m0, m1] = parse_window(fit_window);
            FitOptions opt;
            opt.component = functional_index(fit_functional, s.ring);
            opt.aitken_passes = fit_aitken;
            const AmlScaling sc = fit_scaling(s, m0, m1, opt);
            emit(scaling_to_json(sc).dump(2), fit_out);
            const size_t half = sc.residuals.size() / 2;
            if (!sc.residuals.empty() && sc.residuals.back() > sc.residuals[half])
                std::cerr << "warning: residuals not decreasing over the window tail\n";
            return 0;
        }
        if (scale->parsed()) {
            const CoeffStream s = load_stream(sc_cache);
            std::vector<int> rows;
            if (sc_rows.empty())
                for (int m = 0; m <= s.M(); ++m) rows.push_back(m);
            else
                for (double v : parse_list(sc_rows)) rows.push_back(static_cast<int>(v));
            if (sc_mode != "gamma" && sc_mode != "table")
                throw CLI::ValidationError("mode must be gamma or table");
            // reuse the table emitter for both modes at machine precision
            if (sc_mode == "table") {
                emit(table_csv(s, sc_T, sc_theta, rows, false), sc_out);
            } else {
                const std::vector<ClassValue> vals =
                    scale_coefficients(s, sc_T, sc_theta, ScaleMode::gamma);
                std::string out = "m";
                for (const std::string& b : s.ring->basis) out += "," + b + "_re," + b + "_im";
                out += "\n";
                for (int m : rows) {
                    out += std::to_string(m);
                    for (const cplx& z : vals.at(m).c)
                        out += "," + jfan::detail::fmt_sci(z.real(), 17) + "," +
                               jfan::detail::fmt_sci(z.imag(), 17);
                    out += "\n";
                }
                emit(out, sc_out);
            }
            return 0;
        }
        if (tab->parsed()) {
            const CoeffStream s = load_stream(tab_cache);
            if (s.ring->name != "X3")
                throw CLI::ValidationError("table-x3 expects a stream on the X3 ring");
            const double T = x3_growth_scale();  // throws on presentation mismatch
            std::vector<int> rows;
            for (double v : parse_list(tab_rows)) rows.push_back(static_cast<int>(v));
            emit(table_csv(s, T, M_PI, rows, !tab_machine), tab_out);
            return 0;
        }
        if (spec->parsed()) {
            SpectrumReport r;
            if (spec_target == "X3")
                r = x3_spectrum();
            else if (spec_target.size() >= 2 && spec_target[0] == 'P')
                r = pn_spectrum(std::stoi(spec_target.substr(1)));
            else
                throw CLI::ValidationError("spectra target must be P<N> or X3");
            emit(spectrum_to_json(r).dump(2), spec_out);
            return 0;
        }
        if (cont->parsed()) {
            const CoeffStream s = load_stream(cont_cache);
            const auto [m0, m1] = parse_window(cont_window);
            FitOptions opt;
            opt.component = functional_index(cont_functional, s.ring);
            opt.aitken_passes = 1;
            const AmlScaling sc = fit_scaling(s, m0, m1, opt);
            std::vector<double> phis = parse_list(cont_phi);
            std::vector<double> tgrid =
                cont_tgrid.empty() ? std::vector<double>{10, 20, 40, 80} : parse_list(cont_tgrid);
            // cap the grid so the truncation precondition holds
            std::vector<double> usable;
            for (double t : tgrid)
                if (sc.T * t <= 0.8 * s.r * s.M()) usable.push_back(t);
            if (usable.empty()) throw CLI::ValidationError("t grid beyond truncation");
            const ContinuousReport r = continuous_check(s, sc, phis, usable);
            emit(continuous_to_csv(r), cont_out);
            for (const ContinuousRow& row : r.rows)
                if (row.aligned && row.deviation > 0.5) {
                    std::cerr << "numeric-quality failure: deviation " << row.deviation
                              << " at phi=" << row.phi << " t=" << row.t << "\n";
                    return 3;
                }
            return 0;
        }
        if (gam->parsed()) {
            nlohmann::json j;
            if (gam_target == "X3") {
                const RingPtr ring = x3_classical_ring();
                const ToricData data = x3_toric_data(ring);
                std::vector<ClassValue> divisors;
                for (const auto& [cls, mult] : data.divisors)
                    for (int k = 0; k < mult; ++k) divisors.push_back(cls);
                j["gamma_hat"] = class_to_json(gamma_hat(divisors, ring));
                j["target_class"] = class_to_json(x3_target_class(ring));
            } else if (gam_target.size() >= 2 && gam_target[0] == 'P') {
                const int N = std::stoi(gam_target.substr(1));
                const RingPtr ring = projective_ring(N);
                ClassValue delta(ring);
                delta.c[1] = 1.0;
                j["gamma_hat"] = class_to_json(
                    gamma_hat(std::vector<ClassValue>(N + 1, delta), ring));
            } else {
                throw CLI::ValidationError("gamma-class target must be P<N> or X3");
            }
            emit(j.dump(2), gam_out);
            return 0;
        }
        if (rl->parsed()) {
            const RingPtr ring = projective_ring(1);
            ClassValue alpha = scalar_class(ring, parse_complex(rl_alpha));
            ClassValue beta = scalar_class(ring, parse_complex(rl_beta));
            if (!rl_alpha_nil.empty()) alpha.c[1] = parse_complex(rl_alpha_nil);
            if (!rl_beta_nil.empty()) beta.c[1] = parse_complex(rl_beta_nil);
            const RlReport r =
                rl_property_check(alpha, beta, parse_complex(rl_lambda), parse_list(rl_tgrid));
            emit(rl_report_to_json(r).dump(2), rl_out);
            for (double res : r.semigroup_residuals)
                if (res > 1e-6) {
                    std::cerr << "numeric-quality failure: semigroup residual " << res << "\n";
                    return 3;
                }
            return 0;
        }
        if (rep->parsed()) {
            const CoeffStream s = load_stream(rep_cache);
            const auto [m0, m1] = parse_window(rep_window);
            FitOptions opt;
            opt.component = functional_index(rep_functional, s.ring);
            opt.aitken_passes = rep_aitken;
            const AmlScaling sc = fit_scaling(s, m0, m1, opt);
            const VerifyReport vr = verify_aml(s, sc, m0, m1);
            nlohmann::json j;
            j["provenance"] = s.provenance;
            j["scaling"] = scaling_to_json(sc);
            j["verify"] = {{"rel_residuals_first", vr.rel_residuals.front()},
                           {"rel_residuals_last", vr.rel_residuals.back()},
                           {"decreasing_trend", vr.decreasing_trend},
                           {"rate_c", vr.rate_c}};
            if (s.ring->name == "X3") j["spectral_T"] = x3_growth_scale();
            if (s.ring->name.size() >= 2 && s.ring->name[0] == 'P' &&
                s.ring->name.find('x') == std::string::npos &&
                s.ring->name.find("_deg") == std::string::npos)
                j["spectral_T"] = static_cast<double>(s.ring->fano_index);
            emit(j.dump(2), rep_out);
            if (!vr.decreasing_trend && vr.rel_residuals.back() > vr.rel_residuals.front()) {
                std::cerr << "numeric-quality failure: residuals diverge over the window\n";
                return 3;
            }
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric-quality failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
