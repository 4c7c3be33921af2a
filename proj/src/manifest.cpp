#include "floorline/manifest.hpp"
#include "floorline/decoder.hpp"
#include "floorline/density_evolution.hpp"
#include "floorline/importance_sampling.hpp"
#include "floorline/set_dynamics.hpp"

#include <cmath>
#include <fstream>
#include <optional>

namespace floorline {

using nlohmann::json;

SetTopology topology_from_json(const json& j) {
    if (!j.contains("variables") || !j.contains("internal_checks") || !j.contains("ext_degree"))
        throw ManifestValidationError("topology JSON needs variables, internal_checks, ext_degree");
    std::vector<std::pair<int, int>> checks;
    for (const auto& pr : j.at("internal_checks"))
        checks.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
    return make_topology(j.at("variables").get<int>(), checks,
                         j.at("ext_degree").get<std::vector<int>>());
}

json topology_to_json(const SetTopology& topo) {
    json j;
    j["variables"] = topo.num_vars;
    json checks = json::array();
    for (auto [u, v] : topo.internal_checks) checks.push_back({u, v});
    j["internal_checks"] = checks;
    j["ext_degree"] = topo.ext_degree;
    return j;
}

namespace {

struct RunState {
    std::filesystem::path base;
    std::filesystem::path out_dir;
    std::optional<SparseParityCheck> code;
    std::optional<SetCensus> census;
    json summary;
};

std::filesystem::path resolve(const RunState& st, const std::string& rel) {
    std::filesystem::path p(rel);
    return p.is_absolute() ? p : st.base / p;
}

std::ofstream open_out(const RunState& st, const std::string& name) {
    std::filesystem::create_directories(st.out_dir);
    std::ofstream f(st.out_dir / name);
    if (!f) throw std::runtime_error("cannot write " + (st.out_dir / name).string());
    return f;
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw ManifestValidationError(msg);
}

const SparseParityCheck& code_of(const RunState& st) {
    require(st.code.has_value(), "stage needs a code but the manifest has none");
    return *st.code;
}

// (dv, dc) of a regular code, for ensemble density evolution
std::pair<int, int> regular_degrees(const SparseParityCheck& h) {
    const int dv = static_cast<int>(h.col(0).size());
    const int dc = static_cast<int>(h.row(0).size());
    for (std::size_t c = 0; c < h.cols(); ++c)
        if (static_cast<int>(h.col(c).size()) != dv)
            throw std::runtime_error("code is not variable-regular");
    for (std::size_t r = 0; r < h.rows(); ++r)
        if (static_cast<int>(h.row(r).size()) != dc)
            throw std::runtime_error("code is not check-regular");
    return {dv, dc};
}

double actual_rate(const SparseParityCheck& h) {
    return 1.0 - static_cast<double>(gf2_rank(h)) / static_cast<double>(h.cols());
}

std::vector<double> parse_snr_grid(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    require(j.contains("from") && j.contains("to"), "snr grid needs from/to");
    const double from = j.at("from").get<double>();
    const double to = j.at("to").get<double>();
    const double step = j.value("step", 1.0);
    require(step > 0 && to >= from, "bad snr grid");
    std::vector<double> out;
    for (double s = from; s <= to + 1e-9; s += step) out.push_back(s);
    return out;
}

// A "set" reference: explicit variables, a topology fixture file, or a
// signature lookup into this run's census.
SetTopology resolve_topology(RunState& st, const json& j, std::vector<int>* variables_out = nullptr) {
    if (j.contains("topology")) {
        std::ifstream f(resolve(st, j.at("topology").get<std::string>()));
        require(f.good(), "cannot open topology file");
        json t;
        f >> t;
        return topology_from_json(t);
    }
    if (j.contains("variables")) {
        auto vars = j.at("variables").get<std::vector<int>>();
        auto res = classify_set(code_of(st), vars);
        if (!res.accepted) throw std::runtime_error("not an absorption set: " + res.reason);
        if (variables_out) *variables_out = res.set.variables;
        return induced_topology(code_of(st), res.set);
    }
    if (j.contains("from_census")) {
        require(st.census.has_value(), "from_census used before a census stage");
        const auto sig = j.at("from_census").get<std::vector<int>>();
        require(sig.size() == 2, "from_census expects [a, b]");
        auto it = st.census->by_signature.find({sig[0], sig[1]});
        require(it != st.census->by_signature.end() && !it->second.empty(),
                "census has no such signature");
        const std::size_t idx = j.value("index", 0);
        require(idx < it->second.size(), "census set index out of range");
        if (variables_out) *variables_out = it->second[idx].variables;
        return induced_topology(code_of(st), it->second[idx]);
    }
    throw ManifestValidationError("set reference needs variables, topology, or from_census");
}

ErrorFloorInputs de_inputs(const SparseParityCheck& h, double ebn0_db, double rate, double tau,
                           int iters, int bins, GainMode mode) {
    auto [dv, dc] = regular_degrees(h);
    const double sigma2 = 1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0));
    auto dm = evolve(dv, dc, sigma2, tau, bins, iters, mode);
    ErrorFloorInputs in;
    in.m_lambda = 2.0 / sigma2;
    in.m_ext = dm.m_ext;
    in.gain = dm.gain;
    in.iters = iters;
    in.tau = tau;
    in.validate();
    return in;
}

DecoderConfig decoder_from_json(const json& j) {
    DecoderConfig cfg;
    const std::string algo = j.value("algo", "sp");
    require(algo == "sp" || algo == "cms", "algo must be sp or cms");
    cfg.algorithm = algo == "sp" ? Algorithm::SumProduct : Algorithm::CorrectedMinSum;
    cfg.clip = j.value("clip", 10.0);
    cfg.max_iters = j.value("iters", 50);
    cfg.bits = j.value("bits", 0);
    return cfg;
}

void stage_info(RunState& st, const json& stage) {
    const auto& h = code_of(st);
    json info;
    info["n"] = h.cols();
    info["m"] = h.rows();
    info["rank"] = gf2_rank(h);
    info["rate"] = actual_rate(h);
    const std::size_t g = girth(h);
    if (g == kGirthInfinite)
        info["girth"] = "inf";
    else
        info["girth"] = g;
    std::map<std::size_t, std::size_t> col_profile, row_profile;
    for (std::size_t c = 0; c < h.cols(); ++c) ++col_profile[h.col(c).size()];
    for (std::size_t r = 0; r < h.rows(); ++r) ++row_profile[h.row(r).size()];
    for (auto [d, cnt] : col_profile) info["column_degrees"][std::to_string(d)] = cnt;
    for (auto [d, cnt] : row_profile) info["row_degrees"][std::to_string(d)] = cnt;
    auto f = open_out(st, stage.value("out", "code_info.json"));
    f << info.dump(2) << "\n";
    st.summary["stages"].back()["info"] = info;
}

void stage_hplot(RunState& st, const json& stage) {
    const auto& h = code_of(st);
    auto f = open_out(st, stage.value("out", "h_dots.csv"));
    f << "# row,col of each nonzero entry of H\n";
    for (std::size_t r = 0; r < h.rows(); ++r)
        for (int c : h.row(r)) f << r << "," << c << "\n";
}

void stage_census(RunState& st, const json& stage) {
    const auto& h = code_of(st);
    EnumerationOptions opt;
    opt.a_max = stage.value("a_max", 8);
    opt.b_max = stage.value("b_max", 5);
    opt.stop_after = stage.value("stop_after", 0);
    if (stage.value("qc", true) && h.qc) opt.qc_p = h.qc->p;
    st.census = enumerate_sets(h, opt);

    auto table = open_out(st, stage.value("out_table", "census.csv"));
    table << "# a,b,exists,multiplicity\n";
    json counts = json::array();
    for (int a = 1; a <= opt.a_max; ++a) {
        for (int b = 0; b <= std::min(opt.b_max, a * static_cast<int>(h.col(0).size())); ++b) {
            const std::size_t mult = st.census->multiplicity(a, b);
            table << a << "," << b << "," << (mult ? "yes" : "no") << "," << mult << "\n";
            if (mult) counts.push_back({{"a", a}, {"b", b}, {"multiplicity", mult}});
        }
    }
    if (stage.contains("out_sets")) {
        auto sets = open_out(st, stage.at("out_sets").get<std::string>());
        for (const auto& [sig, list] : st.census->by_signature)
            for (const auto& s : list) {
                json line{{"a", s.a()}, {"b", s.b()}, {"variables", s.variables}};
                sets << line.dump() << "\n";
            }
    }
    st.summary["stages"].back()["census"] = counts;
}

void stage_eigen(RunState& st, const json& stage) {
    auto topo = resolve_topology(st, stage.at("set"));
    auto model = build_model(topo);
    dominant_eigen(model);
    auto coeffs = topology_coefficients(model);
    json out;
    out["dim"] = model.dim;
    out["mu_max"] = model.mu_max;
    out["v_max"] = model.v_max;
    out["coefficients"] = {{"A", coeffs.A}, {"B", coeffs.B}, {"C", coeffs.C}, {"D", coeffs.D}};
    auto f = open_out(st, stage.value("out", "eigen.json"));
    f << out.dump(2) << "\n";
    st.summary["stages"].back()["mu_max"] = model.mu_max;
}

void stage_formula(RunState& st, const json& stage) {
    const auto& h = code_of(st);
    auto topo = resolve_topology(st, stage.at("set"));
    auto model = build_model(topo);
    dominant_eigen(model);
    auto coeffs = topology_coefficients(model);

    const double tau = stage.value("clip", 10.0);
    const int iters = stage.value("iters", 50);
    const int bins = stage.value("de_bins", 4096);
    const double rate = stage.value("rate", actual_rate(h));
    const double mult = stage.value("multiplicity", 1.0);
    const GainMode mode = stage.value("gain_mode", std::string("independent")) == "meanfield"
                              ? GainMode::MeanField
                              : GainMode::IndependentDraws;
    auto formulas = stage.value("formulas", std::vector<std::string>{"refined"});
    auto snrs = parse_snr_grid(stage.at("snr"));

    auto f = open_out(st, stage.value("out", "formula.csv"));
    f << "# EbN0_dB";
    for (const auto& name : formulas) f << ",P_AS_" << name << ",BER_" << name;
    f << "\n";
    for (double db : snrs) {
        auto in = de_inputs(h, db, rate, tau, iters, bins, mode);
        f << db;
        for (const auto& name : formulas) {
            double p;
            if (name == "basic")
                p = p_as_basic(coeffs, model.mu_max, in);
            else if (name == "refined")
                p = p_as_refined(coeffs, model.mu_max, in);
            else if (name == "matrix")
                p = p_as_matrix(model, in);
            else
                throw ManifestValidationError("unknown formula " + name);
            const double ber = ber_estimate({{topo.num_vars, mult, p}}, h.cols());
            f << "," << p << "," << ber;
        }
        f << "\n";
    }
}

void stage_trace(RunState& st, const json& stage) {
    const auto& h = code_of(st);
    std::vector<int> vars;
    resolve_topology(st, stage.at("set"), &vars);
    require(!vars.empty(), "trace stage needs a set with concrete code variables");
    TannerGraph graph(h);
    DecoderConfig cfg = decoder_from_json(stage);
    cfg.trace_vars = vars;
    cfg.early_stop = stage.value("early_stop", false);
    const double m_lambda = stage.value("m_lambda", 4.0);
    std::vector<double> llr(h.cols(), m_lambda);
    for (int v : vars) llr[v] = -m_lambda;
    auto outcome = decode(graph, llr, cfg);
    auto f = open_out(st, stage.value("out", "trace.csv"));
    f << "# iteration,variable,accumulated_llr\n";
    for (std::size_t it = 0; it < outcome.trace.size(); ++it)
        for (std::size_t k = 0; k < vars.size(); ++k)
            f << (it + 1) << "," << vars[k] << "," << outcome.trace[it][k] << "\n";
    st.summary["stages"].back()["converged"] = outcome.converged;
    st.summary["stages"].back()["iterations"] = outcome.iterations_used;
}

void stage_is(RunState& st, const json& stage) {
    const auto& h = code_of(st);
    TannerGraph graph(h);
    CampaignConfig cfg;
    cfg.decoder = decoder_from_json(stage);
    cfg.snrs_db = parse_snr_grid(stage.at("snr"));
    cfg.rate = stage.value("rate", actual_rate(h));
    cfg.samples = stage.value("samples", 100000);
    cfg.seed = stage.value("seed", st.summary.value("seed", 1));
    cfg.bias.shift = stage.value("shift", 0.0);
    if (stage.contains("sets")) {
        for (const auto& ref : stage.at("sets")) {
            std::vector<int> vars;
            resolve_topology(st, ref, &vars);
            require(!vars.empty(), "is stage bias sets need concrete code variables");
            cfg.bias.target_sets.push_back(vars);
        }
    }
    auto estimates = run_campaign(graph, cfg);
    auto f = open_out(st, stage.value("out", "is.csv"));
    f << "# EbN0_dB,BER,FER,BER_se,FER_se,rel_halfwidth,raw_errors,samples,no_events\n";
    for (const auto& e : estimates)
        f << e.snr_db << "," << e.ber << "," << e.fer << "," << e.ber_se << "," << e.fer_se << ","
          << e.rel_halfwidth << "," << e.raw_frame_errors << "," << e.samples << ","
          << (e.no_events ? 1 : 0) << "\n";
    // campaign manifest persisted for reproducibility
    json echo = stage;
    echo["resolved_bias_sets"] = cfg.bias.target_sets;
    echo["seed"] = cfg.seed;
    auto mf = open_out(st, stage.value("out", std::string("is.csv")) + ".manifest.json");
    mf << echo.dump(2) << "\n";
}

void stage_de(RunState& st, const json& stage) {
    const int dv = stage.value("dv", 3);
    const int dc = stage.value("dc", 5);
    const double rate = stage.value("rate", 1.0 - static_cast<double>(dv) / dc);
    const double tau = stage.value("clip", 10.0);
    const int iters = stage.value("iters", 20);
    const int bins = stage.value("bins", 4096);
    const double db = stage.at("snr").get<double>();
    const double sigma2 = 1.0 / (2.0 * rate * std::pow(10.0, db / 10.0));
    auto dm = evolve(dv, dc, sigma2, tau, bins, iters);
    auto f = open_out(st, stage.value("out", "de.csv"));
    f << "# iteration,m_ext,g\n";
    for (int i = 0; i <= iters; ++i) f << i << "," << dm.m_ext[i] << "," << dm.gain[i] << "\n";
}

} // namespace

json run_manifest_json(const json& manifest, const std::filesystem::path& base_dir) {
    RunState st;
    st.base = base_dir;
    require(manifest.is_object(), "manifest must be a JSON object");
    std::vector<std::string> missing;
    for (const char* field : {"name", "stages", "output_dir"})
        if (!manifest.contains(field)) missing.emplace_back(field);
    if (!missing.empty()) {
        std::string msg = "manifest missing required fields:";
        for (const auto& f : missing) msg += " " + f;
        throw ManifestValidationError(msg);
    }
    require(manifest.at("stages").is_array() && !manifest.at("stages").empty(),
            "stages must be a non-empty array");
    st.out_dir = resolve(st, manifest.at("output_dir").get<std::string>());

    st.summary["name"] = manifest.at("name");
    st.summary["version"] = kVersion;
    st.summary["seed"] = manifest.value("seed", 1);
    st.summary["config"] = manifest;
    st.summary["stages"] = json::array();

    if (manifest.contains("code")) {
        const auto& c = manifest.at("code");
        if (c.contains("alist")) {
            st.code = load_alist(resolve(st, c.at("alist").get<std::string>()).string());
        } else if (c.contains("shifts")) {
            require(c.contains("p"), "QC code needs p");
            st.code = build_qc_matrix(c.at("shifts").get<std::vector<std::vector<int>>>(),
                                      c.at("p").get<std::size_t>());
        } else {
            throw ManifestValidationError("code needs either alist or shifts+p");
        }
    }

    for (const auto& stage : manifest.at("stages")) {
        require(stage.contains("type"), "every stage needs a type");
        const std::string type = stage.at("type").get<std::string>();
        st.summary["stages"].push_back({{"type", type}});
        try {
            if (type == "info") stage_info(st, stage);
            else if (type == "hplot") stage_hplot(st, stage);
            else if (type == "census") stage_census(st, stage);
            else if (type == "eigen") stage_eigen(st, stage);
            else if (type == "formula") stage_formula(st, stage);
            else if (type == "trace") stage_trace(st, stage);
            else if (type == "is") stage_is(st, stage);
            else if (type == "de") stage_de(st, stage);
            else throw ManifestValidationError("unknown stage type " + type);
        } catch (const ManifestValidationError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(type, e.what());
        }
    }

    std::filesystem::create_directories(st.out_dir);
    std::ofstream sf(st.out_dir / "summary.json");
    sf << st.summary.dump(2) << "\n";
    return st.summary;
}

json run_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f) throw ManifestValidationError("cannot open manifest " + manifest_path.string());
    json manifest;
    try {
        f >> manifest;
    } catch (const std::exception& e) {
        throw ManifestValidationError(std::string("manifest parse error: ") + e.what());
    }
    return run_manifest_json(manifest, manifest_path.parent_path());
}

} // namespace floorline
