// Copyright 2026 The detpower Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command implementations behind the detpower executable.
//
// Every command prints one JSON report:
//   {"command": ..., "inputs_digest": <sha256 hex>, "results": {...}, "diagnostics": {...}}
// Each result is {"value": v, "units": u}; non-finite values are written as
// the strings "inf" / "-inf". Exit codes: 0 ok, 1 usage, 2 unparsable input,
// 3 invalid input (non-POVM, bad state, incomplete strategy, unsupported
// detector), 4 a size cap was hit.

#ifndef DETPOWER_TOOLS_CLI_HPP
#define DETPOWER_TOOLS_CLI_HPP

#include <openssl/evp.h>

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "detpower/detpower.hpp"

namespace detpower::cli {

using Json = io::Json;

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kInvalid = 3, kCap = 4 };

inline std::string sha256_hex(const std::string &bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; i++) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

inline Json number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

/// Accumulates one command's report. The digest covers the command name,
/// the normalized parameters and the raw bytes of every input file, in order.
class Report {
   public:
    explicit Report(std::string command) : command_(std::move(command)) {}

    void add_input(const std::string &bytes) { inputs_.push_back(bytes); }
    void add_param(const std::string &key, Json value) { params_[key] = std::move(value); }
    void set_bits(bool bits) { bits_ = bits; }

    /// An exponent in nats, or bits under --bits.
    void exponent(const std::string &name, double nats) {
        results_[name] = {{"value", number(bits_ ? nats / std::numbers::ln2 : nats)}, {"units", bits_ ? "bits" : "nats"}};
    }
    void probability(const std::string &name, double p) { results_[name] = {{"value", number(p)}, {"units", "probability"}}; }
    void scalar(const std::string &name, double v, const std::string &units) {
        results_[name] = {{"value", number(v)}, {"units", units}};
    }
    void result(const std::string &name, Json value) { results_[name] = std::move(value); }
    Json &diagnostics() { return diagnostics_; }

    Json to_json() const {
        std::string material = command_ + '\n' + params_.dump() + '\n';
        for (const auto &in : inputs_) {
            material += std::to_string(in.size()) + '\n' + in;
        }
        return {{"command", command_},
                {"inputs_digest", sha256_hex(material)},
                {"parameters", params_},
                {"results", results_},
                {"diagnostics", diagnostics_}};
    }

   private:
    std::string command_;
    std::vector<std::string> inputs_;
    Json params_ = Json::object();
    Json results_ = Json::object();
    Json diagnostics_ = Json::object();
    bool bits_ = false;
};

struct SearchFlags {
    int restarts = 64;
    std::uint64_t seed = 0;
    bool mixed = false;
    double tol = 1e-10;
    bool bits = false;

    SearchOptions options() const {
        SearchOptions o;
        o.restarts = restarts;
        o.seed = seed;
        o.mixed = mixed;
        o.tol = tol;
        return o;
    }

    void record(Report &rep) const {
        rep.add_param("restarts", restarts);
        rep.add_param("seed", seed);
        rep.add_param("mixed", mixed);
        rep.add_param("tol", tol);
        rep.add_param("bits", bits);
        rep.set_bits(bits);
    }
};

inline void add_search_flags(CLI::App *app, SearchFlags &f) {
    app->add_option("--restarts", f.restarts, "Random restarts of the state search")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", f.seed, "Seed for the random restarts");
    app->add_flag("--mixed", f.mixed, "Also refine over mixed states");
    app->add_option("--tol", f.tol, "Local refinement stopping tolerance")->check(CLI::PositiveNumber);
    app->add_flag("--bits", f.bits, "Report exponents in bits instead of nats");
}

struct Loaded {
    Povm povm;
    std::string bytes;
};

inline Loaded load_povm(const std::string &path) {
    auto bytes = io::read_file(path);
    return {io::povm_from_json(io::parse_json(bytes, path)), bytes};
}

inline Json pair_json(const StatePair &pair) {
    return {{"rho", io::matrix_to_json(pair.rho.matrix())}, {"sigma", io::matrix_to_json(pair.sigma.matrix())}};
}

inline Json grouping_json(const GroupingMask &g) {
    Json out = Json::array();
    for (std::size_t k = 0; k < g.accept.size(); k++) {
        if (g.accept[k]) {
            out.push_back(k + 1);
        }
    }
    return out;
}

/// Default candidate states: the optimal single-shot pair of the detector.
inline std::vector<DensityMatrix> default_candidates(const Povm &p) {
    auto best = single_shot_power(p);
    return {best.optimizer.rho, best.optimizer.sigma};
}

inline Json validation_json(const ValidationReport &v) {
    Json els = Json::array();
    for (const auto &e : v.elements) {
        els.push_back({{"hermiticity_deviation", number(e.hermiticity_deviation)},
                       {"min_eigenvalue", number(e.min_eigenvalue)},
                       {"zero", e.is_zero},
                       {"ok", e.ok}});
    }
    return {{"valid", v.valid},
            {"completeness_residual", number(v.completeness_residual)},
            {"elements", els},
            {"problems", v.problems},
            {"warnings", v.warnings}};
}

inline int cmd_validate(const std::string &file, std::ostream &out) {
    auto in = load_povm(file);
    Report rep("validate");
    rep.add_input(in.bytes);
    auto v = validate_povm(in.povm);
    rep.result("valid", v.valid);
    rep.scalar("completeness_residual", v.completeness_residual, "operator max-norm");
    rep.scalar("outcomes", static_cast<double>(in.povm.size()), "count");
    rep.scalar("dimension", static_cast<double>(in.povm.dim()), "count");
    rep.diagnostics()["validation"] = validation_json(v);
    out << rep.to_json().dump(2) << '\n';
    return v.valid ? kOk : kInvalid;
}

inline int cmd_exponent(const std::string &file, const std::string &kind, std::optional<double> rate,
                        const SearchFlags &flags, std::ostream &out) {
    auto in = load_povm(file);
    require_valid(in.povm);
    Objective obj = kind == "chernoff" ? Objective::chernoff()
                    : kind == "stein"  ? Objective::stein()
                                       : Objective::hoeffding(*rate);
    Report rep("exponent");
    rep.add_input(in.bytes);
    rep.add_param("kind", kind);
    if (rate) {
        rep.add_param("rate", *rate);
    }
    flags.record(rep);
    auto res = optimize_state_pair(obj, in.povm, flags.options());
    rep.exponent("zeta_" + kind, res.value);
    if (res.restricted_value) {
        rep.exponent("zeta_" + kind + "_orthogonal_eigenpairs", *res.restricted_value);
    }
    if (res.s_star) {
        rep.scalar("s_star", *res.s_star, "dimensionless");
    }
    rep.result("optimizer", pair_json(res.optimizer));
    auto &d = rep.diagnostics();
    d["restarts_used"] = res.restarts_used;
    d["seed"] = flags.seed;
    d["mixed_refinement"] = flags.mixed;
    d["threads"] = resolve_threads();
    if (res.grouping) {
        d["seed_grouping"] = grouping_json(*res.grouping);
    }
    out << rep.to_json().dump(2) << '\n';
    return kOk;
}

struct FiniteFlags {
    std::size_t n = 3;
    std::string mode = "ml";
    bool csv = false;
    std::size_t points = 0;
    std::string candidates;
    std::string rho_pattern;
    std::string sigma_pattern;
};

inline std::vector<std::size_t> parse_pattern(const std::string &s, std::size_t n, std::size_t candidates) {
    if (s.size() != n) {
        throw DomainError("pattern \"" + s + "\" must have length n = " + std::to_string(n));
    }
    std::vector<std::size_t> out;
    for (char c : s) {
        if (c < '0' || c > '9' || static_cast<std::size_t>(c - '0') >= candidates) {
            throw DomainError("pattern \"" + s + "\" refers to a missing candidate");
        }
        out.push_back(static_cast<std::size_t>(c - '0'));
    }
    return out;
}

/// `points` evenly spaced indices of 0..n, endpoints included; all when points is 0 or > n.
inline std::vector<std::size_t> sample_indices(std::size_t n, std::size_t points) {
    std::vector<std::size_t> out;
    if (points == 0 || points > n) {
        for (std::size_t m = 0; m <= n; m++) {
            out.push_back(m);
        }
        return out;
    }
    if (points == 1) {
        return {0};
    }
    for (std::size_t i = 0; i < points; i++) {
        std::size_t m = (i * n + (points - 1) / 2) / (points - 1);
        if (out.empty() || out.back() != m) {
            out.push_back(m);
        }
    }
    return out;
}

inline int cmd_finite(const std::string &file, const FiniteFlags &f, std::ostream &out) {
    auto in = load_povm(file);
    require_valid(in.povm);
    Report rep("finite");
    rep.add_input(in.bytes);
    rep.add_param("n", f.n);
    rep.add_param("mode", f.mode);
    if (f.n == 0) {
        throw DomainError("n must be at least 1");
    }

    if (f.mode == "sweep") {
        rep.add_param("points", f.points);
        auto curve = sweep_x(in.povm, f.n);
        auto idx = sample_indices(f.n, f.points);
        if (f.csv) {
            out << "m,x,p_err,log_p_err,rate\n";
            out << std::setprecision(17);
            for (auto m : idx) {
                const auto &pt = curve[m];
                out << pt.m << ',' << pt.x << ',' << pt.p_err << ',' << pt.log_p_err << ',' << pt.rate << '\n';
            }
            return kOk;
        }
        Json pts = Json::array();
        for (auto m : idx) {
            const auto &pt = curve[m];
            pts.push_back({{"m", pt.m},
                           {"x", pt.x},
                           {"p_err", number(pt.p_err)},
                           {"log_p_err", number(pt.log_p_err)},
                           {"rate", number(pt.rate)}});
        }
        rep.result("curve", {{"value", pts}, {"units", "probability vs fraction x"}});
        std::size_t best = 0;
        for (std::size_t m = 1; m < curve.size(); m++) {
            if (curve[m].log_p_err < curve[best].log_p_err) {
                best = m;
            }
        }
        rep.probability("min_p_err", curve[best].p_err);
        rep.scalar("argmin_x", curve[best].x, "fraction");
        out << rep.to_json().dump(2) << '\n';
        return kOk;
    }

    std::vector<DensityMatrix> cands;
    if (f.candidates.empty()) {
        cands = default_candidates(in.povm);
        rep.diagnostics()["candidates"] = "optimal single-shot pair";
    } else {
        auto bytes = io::read_file(f.candidates);
        rep.add_input(bytes);
        cands = io::candidates_from_json(io::parse_json(bytes, f.candidates));
    }

    if (f.mode == "pattern") {
        auto best = best_product_pair(in.povm, f.n, cands);
        rep.probability("p_err", best.p_err);
        rep.result("rho_pattern", pattern_label(best.rho_pattern));
        rep.result("sigma_pattern", pattern_label(best.sigma_pattern));
        rep.diagnostics()["complement_mode"] = best.complement;
        bool commuting = true;
        for (std::size_t a = 0; a < in.povm.size(); a++) {
            for (std::size_t b = a + 1; b < in.povm.size(); b++) {
                commuting = commuting && (in.povm[a] * in.povm[b] - in.povm[b] * in.povm[a]).max_abs() <= tol::herm;
            }
        }
        rep.diagnostics()["optimality"] = commuting ? "exhaustive over candidate patterns"
                                                    : "heuristic: non-commuting POVM, candidate set may "
                                                      "exclude the optimal inputs";
        out << rep.to_json().dump(2) << '\n';
        return kOk;
    }
    if (f.mode != "ml" && f.mode != "brute") {
        throw DomainError("unknown finite mode " + f.mode);
    }
    if (cands.size() < 2 && (f.rho_pattern.empty() || f.sigma_pattern.empty())) {
        throw DomainError("ml and brute modes need two candidates or explicit patterns");
    }
    std::vector<std::size_t> rp(f.n, 0), sp(f.n, 1);
    if (!f.rho_pattern.empty()) {
        rp = parse_pattern(f.rho_pattern, f.n, cands.size());
    }
    if (!f.sigma_pattern.empty()) {
        sp = parse_pattern(f.sigma_pattern, f.n, cands.size());
    }
    rep.add_param("rho_pattern", pattern_label(rp));
    rep.add_param("sigma_pattern", pattern_label(sp));
    if (f.mode == "brute") {
        // Refuse before building distributions: 2^(m^n) partitions.
        sequence_count(in.povm.size(), f.n, kBruteForceCap, "brute_force_cap");
    }
    auto h0 = sequence_distribution(in.povm, ProductInput::from_pattern(cands, rp));
    auto h1 = sequence_distribution(in.povm, ProductInput::from_pattern(cands, sp));
    auto res = f.mode == "ml" ? ml_error_probability(h0, h1) : brute_force_grouping(h0, h1);
    rep.probability("p_err", res.p_err);
    Json accepted = Json::array();
    for (std::size_t i = 0; i < h0.size(); i++) {
        if (res.grouping.accept[i]) {
            accepted.push_back(sequence_label(h0.sequence(i)));
        }
    }
    rep.result("accept_h0", accepted);
    out << rep.to_json().dump(2) << '\n';
    return kOk;
}

inline int cmd_adaptive(const std::string &file, std::size_t n, const std::string &candidates_file,
                        const std::string &strategy_file, std::ostream &out) {
    auto in = load_povm(file);
    require_valid(in.povm);
    Report rep("adaptive");
    rep.add_input(in.bytes);
    rep.add_param("n", n);
    std::vector<DensityMatrix> cands;
    if (candidates_file.empty()) {
        cands = default_candidates(in.povm);
        rep.diagnostics()["candidates"] = "optimal single-shot pair";
    } else {
        auto bytes = io::read_file(candidates_file);
        rep.add_input(bytes);
        cands = io::candidates_from_json(io::parse_json(bytes, candidates_file));
    }
    if (!strategy_file.empty()) {
        auto bytes = io::read_file(strategy_file);
        rep.add_input(bytes);
        auto strat = io::strategy_from_json(io::parse_json(bytes, strategy_file), in.povm.size());
        if (n != 0 && strat.depth() != n) {
            throw StructuralError("strategy depth " + std::to_string(strat.depth()) + " differs from --n " +
                                  std::to_string(n));
        }
        auto eval = evaluate_strategy(in.povm, cands, strat);
        rep.probability("p_err", eval.p_err);
        rep.result("grouping", strat.grouping() ? "explicit" : "maximum likelihood");
        rep.result("strategy", io::strategy_to_json(strat));
        out << rep.to_json().dump(2) << '\n';
        return kOk;
    }
    if (n == 0) {
        throw DomainError("search mode needs --n >= 1");
    }
    auto best = optimal_adaptive(in.povm, cands, n);
    rep.probability("p_err", best.p_err);
    rep.result("strategy", io::strategy_to_json(best.strategy));
    rep.diagnostics()["search"] = "exhaustive over candidate pairs at every history";
    out << rep.to_json().dump(2) << '\n';
    return kOk;
}

inline int cmd_benchmarks(const SearchFlags &flags, std::ostream &out) {
    Report rep("benchmarks");
    flags.record(rep);
    const double ln4pi = std::log(4 / std::numbers::pi);
    const std::size_t m_cov = 10000;

    rep.exponent("covariant_ln_4_over_pi", ln4pi);
    rep.exponent("covariant_numeric_M10000", covariant_zeta_numeric(CovariantDiscretization::fibonacci(m_cov)));
    rep.scalar("covariant_c_half", covariant_c_s(0.5), "dimensionless");

    Json sg = Json::array();
    for (int i = 1; i <= 9; i++) {
        double r = i / 10.0;
        double pipeline = zeta_chernoff(noisy_stern_gerlach(r), flags.options()).value;
        double analytic = noisy_sg_zeta(r);
        double scale = flags.bits ? 1 / std::numbers::ln2 : 1.0;
        sg.push_back({{"r", r}, {"analytic", number(analytic * scale)}, {"pipeline", number(pipeline * scale)}});
    }
    rep.result("noisy_sg_curve", {{"value", sg}, {"units", flags.bits ? "bits" : "nats"}});
    rep.exponent("noisy_sg_r0.62", noisy_sg_zeta(0.62));
    rep.scalar("equivalent_sg_purity_of_covariant", equivalent_sg_purity(ln4pi), "purity");

    const double p = 0.4, q = 0.2;
    const double pp[] = {p, 1 - p};
    const double qq[] = {q, 1 - q};
    auto diag = Povm::diagonal({{p, q}, {1 - p, 1 - q}});
    rep.scalar("commuting_gamma_0.4_0.2", commuting_gamma(p, q), "probability");
    rep.exponent("commuting_zeta_0.4_0.2", commuting_zeta(p, q));
    rep.exponent("commuting_chernoff_0.4_0.2", chernoff_exponent(pp, qq).value);
    rep.exponent("commuting_stein_0.4_0.2", relative_entropy(pp, qq));
    rep.exponent("commuting_empirical_rate_n5000", empirical_rate(diag, 5000));

    std::vector<DensityMatrix> basis{DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1)};
    auto iid0 = sequence_distribution(diag, ProductInput::iid(basis[0], 3));
    auto iid1 = sequence_distribution(diag, ProductInput::iid(basis[1], 3));
    rep.probability("finite_n3_iid", ml_error_probability(iid0, iid1).p_err);
    rep.probability("finite_n3_best_product", best_product_pair(diag, 3, basis).p_err);
    rep.probability("finite_n3_best_adaptive", optimal_adaptive(diag, basis, 3).p_err);

    auto g = Povm::diagonal({{0.3, 0.1}, {0.7, 0.9}});
    double ze = diagonal_exponent(diag, Objective::chernoff());
    double zg = diagonal_exponent(g, Objective::chernoff());
    double se = diagonal_exponent(diag, Objective::stein());
    double sgs = diagonal_exponent(g, Objective::stein());
    Json spots = Json::array();
    for (double w : {0.25, 0.5, 0.75}) {
        auto mixed = mix_povms(diag, g, w);
        auto cb = mixing_bounds(std::exp(-ze), std::exp(-zg), ze, zg, w);
        auto st = stein_mixing_bounds(se, sgs, w);
        spots.push_back({{"p", w},
                         {"chernoff_lower", number(cb.lower)},
                         {"chernoff_exact", number(diagonal_exponent(mixed, Objective::chernoff()))},
                         {"chernoff_upper", number(cb.upper)},
                         {"stein_lower", number(st.lower)},
                         {"stein_exact", number(diagonal_exponent(mixed, Objective::stein()))},
                         {"stein_upper", number(st.upper)}});
    }
    rep.result("mixing_spot_checks", {{"value", spots}, {"units", "nats"}});
    rep.diagnostics()["covariant_M"] = m_cov;
    out << rep.to_json().dump(2) << '\n';
    return kOk;
}

/// Parses argv and runs one command. Errors go to `err` as one line.
inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Discrimination power of quantum measurement devices"};
    app.require_subcommand(1);

    std::string file;
    SearchFlags search;

    auto *validate = app.add_subcommand("validate", "Check that a file describes a valid POVM");
    validate->add_option("file", file, "POVM JSON file")->required();

    std::string kind = "chernoff";
    std::optional<double> rate;
    auto *exponent = app.add_subcommand("exponent", "Asymptotic exponent maximized over input states");
    exponent->add_option("file", file, "POVM JSON file")->required();
    exponent->add_option("--kind", kind, "chernoff, stein or hoeffding")
        ->check(CLI::IsMember({"chernoff", "stein", "hoeffding"}));
    exponent->add_option("--rate", rate, "Type-I rate r for the Hoeffding exponent")->check(CLI::NonNegativeNumber);
    add_search_flags(exponent, search);

    FiniteFlags fin;
    auto *finite = app.add_subcommand("finite", "Exact error probability for n uses");
    finite->add_option("file", file, "POVM JSON file")->required();
    finite->add_option("--n", fin.n, "Number of uses")->check(CLI::PositiveNumber);
    finite->add_option("--mode", fin.mode, "ml, brute, sweep or pattern")
        ->check(CLI::IsMember({"ml", "brute", "sweep", "pattern"}));
    finite->add_flag("--csv", fin.csv, "Print the sweep curve as CSV");
    finite->add_option("--points", fin.points, "Number of evenly spaced sweep points (0 = all)");
    finite->add_option("--candidates", fin.candidates, "Candidate states JSON file");
    finite->add_option("--rho-pattern", fin.rho_pattern, "H0 candidate per slot, e.g. 001");
    finite->add_option("--sigma-pattern", fin.sigma_pattern, "H1 candidate per slot, e.g. 110");

    std::size_t adaptive_n = 0;
    std::string cand_file, strategy_file;
    auto *adaptive = app.add_subcommand("adaptive", "Evaluate or search feedback strategies");
    adaptive->add_option("file", file, "POVM JSON file")->required();
    adaptive->add_option("--n", adaptive_n, "Number of uses");
    adaptive->add_option("--candidates", cand_file, "Candidate states JSON file");
    adaptive->add_option("--strategy", strategy_file, "Strategy JSON file to evaluate");

    auto *bench = app.add_subcommand("benchmarks", "Table of analytic benchmark values");
    add_search_flags(bench, search);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*validate) {
            return cmd_validate(file, out);
        }
        if (*exponent) {
            if (kind == "hoeffding" && !rate) {
                err << "usage error: --rate is required for the hoeffding exponent\n";
                return kUsage;
            }
            if (kind != "hoeffding" && rate) {
                err << "usage error: --rate only applies to the hoeffding exponent\n";
                return kUsage;
            }
            return cmd_exponent(file, kind, rate, search, out);
        }
        if (*finite) {
            return cmd_finite(file, fin, out);
        }
        if (*adaptive) {
            return cmd_adaptive(file, adaptive_n, cand_file, strategy_file, out);
        }
        if (*bench) {
            return cmd_benchmarks(search, out);
        }
    } catch (const ParseError &e) {
        err << "parse error: " << e.what() << '\n';
        return kParse;
    } catch (const ResourceError &e) {
        err << "cap exceeded (" << e.cap << "): " << e.what() << '\n';
        return kCap;
    } catch (const StructuralError &e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const UnsupportedError &e) {
        err << "unsupported: " << e.what() << '\n';
        return kInvalid;
    } catch (const DomainError &e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalid;
    }
    return kUsage;
}

}  // namespace detpower::cli

#endif
