#include "floorline/absorption.hpp"
#include "floorline/decoder.hpp"
#include "floorline/density_evolution.hpp"
#include "floorline/importance_sampling.hpp"
#include "floorline/manifest.hpp"
#include "floorline/parity_check.hpp"
#include "floorline/set_dynamics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using nlohmann::json;
using namespace floorline;

namespace {

std::vector<double> parse_snr(const std::string& spec) {
    // "a:b:step" or a single value
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
    if (parts.size() == 1) return parts;
    if (parts.size() != 3 || parts[2] <= 0 || parts[1] < parts[0])
        throw CLI::ValidationError("--snr expects a:b:step");
    std::vector<double> out;
    for (double s = parts[0]; s <= parts[1] + 1e-9; s += parts[2]) out.push_back(s);
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<std::vector<int>> load_shift_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open shift file " + path);
    std::vector<std::vector<int>> rows;
    std::string line;
    while (std::getline(f, line)) {
        std::stringstream ss(line);
        std::vector<int> row;
        int v;
        while (ss >> v) row.push_back(v);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty shift table in " + path);
    return rows;
}

double actual_rate(const SparseParityCheck& h) {
    return 1.0 - static_cast<double>(gf2_rank(h)) / static_cast<double>(h.cols());
}

// --set accepts "3,17,42,..." (0-based columns) or a topology JSON path
SetTopology resolve_set(const std::string& spec, const SparseParityCheck* h,
                        std::vector<int>* vars_out = nullptr) {
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
        std::ifstream f(spec);
        if (!f) throw std::runtime_error("cannot open topology " + spec);
        json j;
        f >> j;
        return topology_from_json(j);
    }
    if (!h) throw std::runtime_error("a variable-list set needs --code");
    auto vars = parse_int_list(spec);
    auto res = classify_set(*h, vars);
    if (!res.accepted) throw std::runtime_error("not an absorption set: " + res.reason);
    if (vars_out) *vars_out = res.set.variables;
    return induced_topology(*h, res.set);
}

std::ostream& output_stream(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open " + path + " for writing");
    return file;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"floorline: absorption-set error-floor workbench for LDPC codes"};
    app.require_subcommand(1);

    // ---- code build / info ----
    auto* code = app.add_subcommand("code", "construct and inspect parity-check matrices");
    code->require_subcommand(1);

    std::string shifts_path, build_out = "code.alist";
    std::size_t qc_p = 0;
    auto* build = code->add_subcommand("build", "build a QC matrix from a shift table");
    build->add_option("--shifts", shifts_path, "text file, d_v rows of d_c shifts")->required();
    build->add_option("--p", qc_p, "circulant size")->required();
    build->add_option("--out", build_out, "output alist path");

    std::string info_alist;
    auto* info = code->add_subcommand("info", "print n, m, rank, girth, degree profile");
    info->add_option("alist", info_alist, "alist file")->required();

    // ---- decode ----
    std::string dec_code, dec_algo = "sp", dec_llr_file, dec_trace_out, dec_trace_vars;
    double dec_clip = 10.0;
    int dec_iters = 50, dec_bits = 0;
    auto* dec = app.add_subcommand("decode", "run the message-passing decoder on an LLR vector");
    dec->add_option("--code", dec_code, "alist file")->required();
    dec->add_option("--algo", dec_algo, "sp or cms")->check(CLI::IsMember({"sp", "cms"}));
    dec->add_option("--clip", dec_clip, "LLR clipping threshold");
    dec->add_option("--iters", dec_iters, "max iterations");
    dec->add_option("--bits", dec_bits, "fixed-point width (omit for float)");
    dec->add_option("--llr-file", dec_llr_file, "whitespace-separated channel LLRs")->required();
    dec->add_option("--trace-vars", dec_trace_vars, "comma list of 0-based variables to trace");
    dec->add_option("--trace-out", dec_trace_out, "trace CSV path");

    // ---- sets enumerate / check ----
    auto* sets = app.add_subcommand("sets", "absorption-set search and verification");
    sets->require_subcommand(1);

    std::string enum_code, enum_out;
    int enum_amax = 8, enum_bmax = 5;
    std::size_t enum_qc = 0;
    auto* senum = sets->add_subcommand("enumerate", "exhaustive census up to (amax, bmax)");
    senum->add_option("--code", enum_code, "alist file")->required();
    senum->add_option("--amax", enum_amax);
    senum->add_option("--bmax", enum_bmax);
    senum->add_option("--qc", enum_qc, "exploit the cyclic QC automorphism of order p");
    senum->add_option("--out", enum_out, "JSONL output (one set per line); default stdout");

    std::string check_code, check_vars;
    auto* scheck = sets->add_subcommand("check", "classify one variable set");
    scheck->add_option("--code", check_code, "alist file")->required();
    scheck->add_option("--vars", check_vars, "comma list of 0-based variables")->required();

    // ---- analyze ----
    std::string an_code, an_set, an_snr = "2:6:0.5", an_formula = "refined", an_out;
    std::string an_gain = "independent";
    double an_clip = 10.0, an_rate = 0.0, an_mult = 1.0;
    int an_iters = 50, an_bins = 4096, an_dv = 0, an_dc = 0;
    std::size_t an_n = 0;
    auto* an = app.add_subcommand("analyze", "evaluate the failure-probability formulas");
    an->add_option("--code", an_code, "alist file (source of dv, dc, rate, n)");
    an->add_option("--set", an_set, "comma variable list or topology .json")->required();
    an->add_option("--iters", an_iters);
    an->add_option("--clip", an_clip);
    an->add_option("--snr", an_snr, "Eb/N0 grid a:b:step");
    an->add_option("--formula", an_formula)->check(CLI::IsMember({"basic", "refined", "matrix", "all"}));
    an->add_option("--de-bins", an_bins, "density evolution grid bins");
    an->add_option("--gain", an_gain)->check(CLI::IsMember({"independent", "meanfield"}));
    an->add_option("--multiplicity", an_mult, "set multiplicity for the BER estimate");
    an->add_option("--dv", an_dv, "ensemble dv (when no --code)");
    an->add_option("--dc", an_dc, "ensemble dc (when no --code)");
    an->add_option("--rate", an_rate, "code rate (when no --code)");
    an->add_option("--n", an_n, "code length (when no --code)");
    an->add_option("--out", an_out, "CSV path; default stdout");

    std::string eig_set, eig_code;
    auto* aneig = an->add_subcommand("eigen", "dominant eigenpair and coefficients of a set");
    aneig->add_option("--set", eig_set, "comma variable list or topology .json")->required();
    aneig->add_option("--code", eig_code, "alist file (needed for variable lists)");

    // ---- de ----
    int de_dv = 3, de_dc = 5, de_iters = 20, de_bins = 4096;
    double de_snr = 4.0, de_clip = 10.0, de_rate = 0.0;
    std::string de_out;
    auto* de = app.add_subcommand("de", "density evolution for a regular ensemble");
    de->add_option("--dv", de_dv);
    de->add_option("--dc", de_dc);
    de->add_option("--snr", de_snr, "Eb/N0 in dB");
    de->add_option("--clip", de_clip);
    de->add_option("--iters", de_iters);
    de->add_option("--bins", de_bins);
    de->add_option("--rate", de_rate, "rate for sigma^2 (default 1 - dv/dc)");
    de->add_option("--out", de_out, "CSV path; default stdout");

    // ---- is ----
    std::string is_code, is_algo = "cms", is_sets, is_snr = "4:6:1", is_out;
    double is_clip = 10.0, is_shift = 0.0, is_rate = 0.0;
    int is_iters = 50, is_bits = 0;
    long long is_samples = 100000;
    std::uint64_t is_seed = 1;
    auto* is = app.add_subcommand("is", "importance-sampling BER/FER campaign");
    is->add_option("--code", is_code, "alist file")->required();
    is->add_option("--algo", is_algo)->check(CLI::IsMember({"sp", "cms"}));
    is->add_option("--clip", is_clip);
    is->add_option("--iters", is_iters);
    is->add_option("--bits", is_bits, "fixed-point width (omit for float)");
    is->add_option("--sets", is_sets, "bias sets: JSONL/JSON file of {variables:[...]}")->required();
    is->add_option("--shift", is_shift, "mean shift toward -1 on target bits");
    is->add_option("--snr", is_snr, "Eb/N0 grid a:b:step");
    is->add_option("--samples", is_samples);
    is->add_option("--seed", is_seed);
    is->add_option("--rate", is_rate, "override rate for sigma^2");
    is->add_option("--out", is_out, "CSV path; default stdout");

    // ---- run ----
    std::string run_path;
    auto* run = app.add_subcommand("run", "execute an experiment manifest");
    run->add_option("manifest", run_path, "manifest JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            auto h = build_qc_matrix(load_shift_table(shifts_path), qc_p);
            save_alist(h, build_out);
            std::cout << "wrote " << h.rows() << "x" << h.cols() << " matrix to " << build_out << "\n";
        } else if (info->parsed()) {
            auto h = load_alist(info_alist);
            std::cout << "n: " << h.cols() << "\nm: " << h.rows() << "\nrank: " << gf2_rank(h)
                      << "\nrate: " << actual_rate(h) << "\n";
            auto g = girth(h);
            std::cout << "girth: ";
            if (g == kGirthInfinite) std::cout << "inf\n";
            else std::cout << g << "\n";
            std::map<std::size_t, std::size_t> colp, rowp;
            for (std::size_t c = 0; c < h.cols(); ++c) ++colp[h.col(c).size()];
            for (std::size_t r = 0; r < h.rows(); ++r) ++rowp[h.row(r).size()];
            std::cout << "column degrees:";
            for (auto [d, k] : colp) std::cout << " " << d << "x" << k;
            std::cout << "\nrow degrees:";
            for (auto [d, k] : rowp) std::cout << " " << d << "x" << k;
            std::cout << "\n";
        } else if (dec->parsed()) {
            auto h = load_alist(dec_code);
            TannerGraph graph(h);
            std::ifstream lf(dec_llr_file);
            if (!lf) throw std::runtime_error("cannot open " + dec_llr_file);
            std::vector<double> llrs;
            double x;
            while (lf >> x) llrs.push_back(x);
            DecoderConfig cfg;
            cfg.algorithm = dec_algo == "sp" ? Algorithm::SumProduct : Algorithm::CorrectedMinSum;
            cfg.clip = dec_clip;
            cfg.max_iters = dec_iters;
            cfg.bits = dec_bits;
            if (!dec_trace_vars.empty()) cfg.trace_vars = parse_int_list(dec_trace_vars);
            auto outcome = decode(graph, llrs, cfg);
            json j;
            j["converged"] = outcome.converged;
            j["iterations"] = outcome.iterations_used;
            j["hard_decisions"] = outcome.word;
            std::cout << j.dump(2) << "\n";
            if (!dec_trace_out.empty() && !cfg.trace_vars.empty()) {
                std::ofstream tf(dec_trace_out);
                tf << "# iteration,variable,accumulated_llr\n";
                for (std::size_t it = 0; it < outcome.trace.size(); ++it)
                    for (std::size_t k = 0; k < cfg.trace_vars.size(); ++k)
                        tf << (it + 1) << "," << cfg.trace_vars[k] << "," << outcome.trace[it][k] << "\n";
            }
        } else if (senum->parsed()) {
            auto h = load_alist(enum_code);
            EnumerationOptions opt;
            opt.a_max = enum_amax;
            opt.b_max = enum_bmax;
            opt.qc_p = enum_qc;
            auto census = enumerate_sets(h, opt);
            std::ofstream file;
            auto& out = output_stream(enum_out, file);
            for (const auto& [sig, list] : census.by_signature)
                for (const auto& s : list) {
                    json line{{"a", s.a()}, {"b", s.b()}, {"variables", s.variables}};
                    out << line.dump() << "\n";
                }
            std::cerr << "a,b,exists,multiplicity\n";
            for (int a = 1; a <= opt.a_max; ++a)
                for (int b = 0; b <= opt.b_max; ++b) {
                    auto mult = census.multiplicity(a, b);
                    if (mult || b <= a) std::cerr << a << "," << b << "," << (mult ? "yes" : "no") << "," << mult << "\n";
                }
        } else if (scheck->parsed()) {
            auto h = load_alist(check_code);
            auto res = classify_set(h, parse_int_list(check_vars));
            json j;
            j["accepted"] = res.accepted;
            if (res.accepted) {
                j["a"] = res.set.a();
                j["b"] = res.set.b();
                j["unsatisfied_checks"] = res.set.unsatisfied_checks;
                j["satisfied_checks"] = res.set.satisfied_checks;
            } else {
                j["reason"] = res.reason;
            }
            std::cout << j.dump(2) << "\n";
            return res.accepted ? 0 : 1;
        } else if (aneig->parsed()) {
            std::optional<SparseParityCheck> h;
            if (!eig_code.empty()) h = load_alist(eig_code);
            auto topo = resolve_set(eig_set, h ? &*h : nullptr);
            auto model = build_model(topo);
            dominant_eigen(model);
            auto c = topology_coefficients(model);
            json j;
            j["dim"] = model.dim;
            j["mu_max"] = model.mu_max;
            j["v_max"] = model.v_max;
            j["coefficients"] = {{"A", c.A}, {"B", c.B}, {"C", c.C}, {"D", c.D}};
            std::cout << j.dump(2) << "\n";
        } else if (an->parsed()) {
            std::optional<SparseParityCheck> h;
            if (!an_code.empty()) h = load_alist(an_code);
            auto topo = resolve_set(an_set, h ? &*h : nullptr);
            auto model = build_model(topo);
            dominant_eigen(model);
            auto coeffs = topology_coefficients(model);
            int dv = an_dv, dc = an_dc;
            double rate = an_rate;
            std::size_t n = an_n;
            if (h) {
                dv = static_cast<int>(h->col(0).size());
                dc = static_cast<int>(h->row(0).size());
                if (rate == 0.0) rate = actual_rate(*h);
                if (n == 0) n = h->cols();
            }
            if (dv < 2 || dc < 2 || rate <= 0 || n == 0)
                throw std::runtime_error("need --code or all of --dv --dc --rate --n");
            std::vector<std::string> formulas =
                an_formula == "all" ? std::vector<std::string>{"basic", "refined", "matrix"}
                                    : std::vector<std::string>{an_formula};
            std::ofstream file;
            auto& out = output_stream(an_out, file);
            out << "# EbN0_dB";
            for (auto& fm : formulas) out << ",P_AS_" << fm << ",BER_" << fm;
            out << "\n";
            for (double db : parse_snr(an_snr)) {
                const double sigma2 = 1.0 / (2.0 * rate * std::pow(10.0, db / 10.0));
                auto dm = evolve(dv, dc, sigma2, an_clip, an_bins, an_iters,
                                 an_gain == "meanfield" ? GainMode::MeanField
                                                        : GainMode::IndependentDraws);
                ErrorFloorInputs in;
                in.m_lambda = 2.0 / sigma2;
                in.m_ext = dm.m_ext;
                in.gain = dm.gain;
                in.iters = an_iters;
                in.tau = an_clip;
                out << db;
                for (auto& fm : formulas) {
                    double p = fm == "basic"    ? p_as_basic(coeffs, model.mu_max, in)
                               : fm == "refined" ? p_as_refined(coeffs, model.mu_max, in)
                                                 : p_as_matrix(model, in);
                    out << "," << p << "," << ber_estimate({{topo.num_vars, an_mult, p}}, n);
                }
                out << "\n";
            }
        } else if (de->parsed()) {
            const double rate = de_rate > 0 ? de_rate : 1.0 - static_cast<double>(de_dv) / de_dc;
            const double sigma2 = 1.0 / (2.0 * rate * std::pow(10.0, de_snr / 10.0));
            auto dm = evolve(de_dv, de_dc, sigma2, de_clip, de_bins, de_iters);
            std::ofstream file;
            auto& out = output_stream(de_out, file);
            out << "# iteration,m_ext,g\n";
            for (int i = 0; i <= de_iters; ++i)
                out << i << "," << dm.m_ext[i] << "," << dm.gain[i] << "\n";
        } else if (is->parsed()) {
            auto h = load_alist(is_code);
            TannerGraph graph(h);
            CampaignConfig cfg;
            cfg.decoder.algorithm = is_algo == "sp" ? Algorithm::SumProduct : Algorithm::CorrectedMinSum;
            cfg.decoder.clip = is_clip;
            cfg.decoder.max_iters = is_iters;
            cfg.decoder.bits = is_bits;
            cfg.snrs_db = parse_snr(is_snr);
            cfg.rate = is_rate > 0 ? is_rate : actual_rate(h);
            cfg.samples = is_samples;
            cfg.seed = is_seed;
            cfg.bias.shift = is_shift;
            {
                std::ifstream sf(is_sets);
                if (!sf) throw std::runtime_error("cannot open " + is_sets);
                std::string line;
                while (std::getline(sf, line)) {
                    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
                    json j = json::parse(line);
                    cfg.bias.target_sets.push_back(j.at("variables").get<std::vector<int>>());
                }
            }
            auto estimates = run_campaign(graph, cfg);
            std::ofstream file;
            auto& out = output_stream(is_out, file);
            out << "# EbN0_dB,BER,FER,BER_se,FER_se,rel_halfwidth,raw_errors,samples,no_events\n";
            for (const auto& e : estimates)
                out << e.snr_db << "," << e.ber << "," << e.fer << "," << e.ber_se << ","
                    << e.fer_se << "," << e.rel_halfwidth << "," << e.raw_frame_errors << ","
                    << e.samples << "," << (e.no_events ? 1 : 0) << "\n";
            if (!is_out.empty() && is_out != "-") {
                json echo{{"code", is_code},     {"algo", is_algo},     {"clip", is_clip},
                          {"iters", is_iters},   {"bits", is_bits},     {"shift", is_shift},
                          {"snr", is_snr},       {"samples", is_samples}, {"seed", is_seed},
                          {"sets", is_sets},     {"rate", cfg.rate},
                          {"version", kVersion}};
                std::ofstream mf(is_out + ".manifest.json");
                mf << echo.dump(2) << "\n";
            }
        } else if (run->parsed()) {
            try {
                auto summary = run_manifest(run_path);
                std::cout << "ok: " << summary["name"] << " (" << summary["stages"].size()
                          << " stages)\n";
            } catch (const ManifestValidationError& e) {
                std::cerr << "validation error: " << e.what() << "\n";
                return 2;
            } catch (const StageError& e) {
                std::cerr << "stage error: " << e.what() << "\n";
                return 3;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
