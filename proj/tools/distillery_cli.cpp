// Copyright 2026 The Distillery Authors
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

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "distillery/enumerate.hpp"
#include "distillery/inner.hpp"
#include "distillery/outer.hpp"
#include "distillery/protocol.hpp"
#include "distillery/simulate.hpp"

using namespace distillery;
using nlohmann::ordered_json;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Exit code 1: a verification or certification failed.
struct VerificationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool file_exists(const std::string &path) {
    std::ifstream f(path);
    return f.good();
}

CssCode resolve_code(const std::string &ref) {
    if (file_exists(ref)) return load_code_file(ref);
    return library_code(ref);
}

OuterCode resolve_outer(const std::string &ref) {
    if (ref == "m4") return outer_m4();
    if (ref == "ring6") return outer_ring6();
    if (ref == "petersen") return outer_petersen();
    if (file_exists(ref)) return load_outer_file(ref);
    throw UsageError("unknown outer code: " + ref);
}

Protocol resolve_protocol(const std::string &ref) {
    if (file_exists(ref)) return load_protocol_file(ref);
    return preset(ref);
}

ordered_json count_json(u128 v) {
    if (v <= static_cast<u128>(UINT64_MAX)) return static_cast<uint64_t>(v);
    return static_cast<double>(v);
}

std::string bits(const BitVector &v) { return v.str(); }

// Density-DP entries carry rounding residue of order 1e-15; print the nearby
// integer when one is that close.
double snap(double v) {
    double r = std::round(v);
    return (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(v)) ? r : v) + 0.0;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void emit(const ordered_json &j) { std::cout << j.dump(2) << '\n'; }

ordered_json code_json(const CssCode &c) {
    ordered_json j;
    j["name"] = c.name;
    j["n"] = c.n_inner;
    j["k"] = c.k_inner;
    j["d"] = c.distance;
    j["kind"] = kind_name(c.kind);
    j["p"] = c.magic.p;
    j["q"] = c.magic.q;
    ordered_json rows = ordered_json::array();
    for (const auto &r : c.stabilizers.rows()) rows.push_back(bits(r));
    j["stabilizers"] = rows;
    return j;
}

int cmd_codes_list(bool json) {
    ordered_json arr = ordered_json::array();
    for (const auto &name : library_names()) {
        const CssCode &c = library_code(name);
        if (json) {
            arr.push_back({{"name", c.name}, {"n", c.n_inner}, {"k", c.k_inner}, {"d", c.distance}, {"kind", kind_name(c.kind)}});
        } else {
            std::cout << name << "  [[" << c.n_inner << ',' << c.k_inner << ',' << c.distance << "]]  " << kind_name(c.kind)
                      << '\n';
        }
    }
    if (json) emit(arr);
    return 0;
}

int cmd_codes_verify(const std::string &ref, bool json) {
    CssCode c = resolve_code(ref);
    VerificationReport rep = verify_code(c);
    if (json) {
        ordered_json j;
        j["name"] = c.name;
        j["self_orthogonal"] = rep.self_orthogonal;
        j["commutation"] = rep.commutation;
        j["hadamard_action"] = rep.hadamard_action;
        j["distance_ok"] = rep.distance_ok;
        j["certified_distance"] = rep.certified_distance;
        j["failures"] = rep.failures;
        j["ok"] = rep.ok();
        emit(j);
    } else {
        std::cout << c.name << ": self_orthogonal=" << rep.self_orthogonal << " commutation=" << rep.commutation
                  << " hadamard_action=" << rep.hadamard_action << " distance=" << rep.certified_distance << '\n';
        for (const auto &f : rep.failures) std::cout << "FAIL " << f << '\n';
        std::cout << (rep.ok() ? "all checks passed" : "verification failed") << '\n';
    }
    return rep.ok() ? 0 : 1;
}

int cmd_codes_show(const std::string &ref, bool json) {
    CssCode c = resolve_code(ref);
    if (json) {
        ordered_json j = code_json(c);
        ordered_json lx = ordered_json::array(), lz = ordered_json::array();
        for (size_t i = 0; i < c.k_inner; i++) {
            lx.push_back({{"x", bits(c.logical_x[i].x)}, {"z", bits(c.logical_x[i].z)}});
            lz.push_back({{"x", bits(c.logical_z[i].x)}, {"z", bits(c.logical_z[i].z)}});
        }
        j["logical_x"] = lx;
        j["logical_z"] = lz;
        emit(j);
        return 0;
    }
    std::cout << format_code_file(c);
    std::cout << "# magic basis: p=" << c.magic.p << " q=" << c.magic.q << '\n';
    for (const auto &v : c.magic.all()) std::cout << "# " << bits(v) << '\n';
    return 0;
}

int cmd_outer_sensitivity(const std::string &ref, size_t d_tilde, size_t order, bool json) {
    OuterCode m = resolve_outer(ref);
    SensitivityReport rep = sensitivity(m, d_tilde);
    ordered_json j;
    j["m"] = m.m();
    j["n_outer"] = m.n_outer();
    j["parity"] = parity_name(m.parity);
    j["d_tilde"] = d_tilde;
    j["s"] = rep.s;
    j["s_witness"] = bits(rep.s_witness);
    j["min_2Mv_plus_v"] = rep.min_2Mv_plus_v;
    j["witness"] = bits(rep.witness);
    bool holds = true;
    if (order) {
        holds = rep.min_2Mv_plus_v >= order;
        j["order"] = order;
        j["condition_holds"] = holds;
    }
    if (json) {
        emit(j);
    } else {
        for (auto it = j.begin(); it != j.end(); ++it) std::cout << it.key() << ": " << it.value().dump() << '\n';
    }
    return holds ? 0 : 1;
}

int cmd_outer_petersen(bool json) {
    Graph g = petersen_graph();
    OuterCode m = outer_petersen();
    SensitivityReport rep = sensitivity(m, 4);
    if (json) {
        ordered_json j;
        j["girth"] = girth(g);
        j["m"] = m.m();
        j["n_outer"] = m.n_outer();
        j["row_weights"] = m.row_weights;
        j["s"] = rep.s;
        j["min_2Mv_plus_v"] = rep.min_2Mv_plus_v;
        ordered_json rows = ordered_json::array();
        for (const auto &r : m.M.rows()) rows.push_back(bits(r));
        j["rows"] = rows;
        emit(j);
    } else {
        std::cout << "# Petersen graph: girth " << girth(g) << ", (4,2)-sensitive: s=" << rep.s
                  << ", min 2|Mv|+|v| = " << rep.min_2Mv_plus_v << '\n';
        std::cout << format_outer_file(m);
    }
    return 0;
}

int cmd_outer_transpose(const std::string &path, bool json) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open classical basis file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    BitMatrix basis = BitMatrix::parse(ss.str());
    OuterCode m = from_classical_transpose(basis);
    if (json) {
        ordered_json rows = ordered_json::array();
        for (const auto &r : m.M.rows()) rows.push_back(bits(r));
        emit({{"m", m.m()}, {"n_outer", m.n_outer()}, {"rows", rows}});
    } else {
        std::cout << format_outer_file(m);
    }
    return 0;
}

ordered_json protocol_json(const Protocol &p) {
    ResourceReport r = resources(p);
    ordered_json j;
    j["name"] = p.name;
    j["d"] = r.d;
    j["nT"] = r.n_T;
    j["nOuter"] = r.n_outer;
    if (r.ratio_den == 1) {
        j["ratio"] = r.ratio_num;
    } else {
        j["ratio"] = r.ratio();
    }
    j["qubits"] = r.qubit_estimate;
    j["ancillas"] = r.ancillas;
    j["gamma"] = r.gamma();
    ordered_json stages = ordered_json::array();
    for (const auto &s : p.stages) {
        ordered_json st = ordered_json::array();
        for (const auto &c : s) {
            ordered_json cj;
            cj["code"] = c.inner->name;
            cj["slots"] = c.slot_qubit;
            if (c.hyperbolic()) {
                cj["hadamard"] = c.hadamard_slots;
                cj["mid"] = c.syndrome_between_passes;
            }
            st.push_back(cj);
        }
        stages.push_back(st);
    }
    j["stages"] = stages;
    return j;
}

int cmd_protocol_info(const std::string &ref, bool json) {
    Protocol p = resolve_protocol(ref);
    ordered_json j = protocol_json(p);
    if (json) {
        emit(j);
    } else {
        std::cout << "protocol " << p.name << ": d=" << j["d"] << " n_T=" << j["nT"] << " n_outer=" << j["nOuter"]
                  << " ratio=" << j["ratio"].dump() << " qubits=" << j["qubits"] << " (+1 ancilla) gamma=" << fmt(resources(p).gamma())
                  << '\n';
        std::cout << format_protocol(p);
    }
    return 0;
}

int cmd_enumerate(const std::string &ref, size_t w_max, const std::string &method_name, bool json) {
    Protocol p = resolve_protocol(ref);
    DpMethod method = DpMethod::Auto;
    if (method_name == "flags") method = DpMethod::Flags;
    if (method_name == "density") method = DpMethod::Density;
    WeightTally t = error_polynomial(p, w_max, method);
    ordered_json j;
    j["preset"] = p.name;
    j["locations"] = t.locations;
    j["exact"] = t.exact;
    ordered_json weights = ordered_json::array(), bad = ordered_json::array(), good = ordered_json::array(),
                 rej = ordered_json::array();
    for (size_t w = 0; w <= w_max; w++) {
        weights.push_back(w);
        if (t.exact) {
            bad.push_back(count_json(t.accepted_bad_exact[w]));
            good.push_back(count_json(t.accepted_good_exact[w]));
            rej.push_back(count_json(t.rejected_exact[w]));
        } else {
            bad.push_back(snap(t.accepted_bad[w]));
            good.push_back(snap(t.accepted_good[w]));
            rej.push_back(snap(t.rejected[w]));
        }
    }
    j["weights"] = weights;
    j["accepted_bad"] = bad;
    j["accepted_good"] = good;
    j["rejected"] = rej;
    if (json) {
        emit(j);
        return 0;
    }
    std::cout << "# protocol " << p.name << ", " << t.locations << " locations, " << (t.exact ? "exact" : "density") << '\n';
    std::cout << "weight,accepted_bad,accepted_good,rejected\n";
    for (size_t w = 0; w <= w_max; w++) {
        std::cout << w << ',' << bad[w].dump() << ',' << good[w].dump() << ',' << rej[w].dump() << '\n';
    }
    return 0;
}

std::vector<double> parse_list(const std::vector<std::string> &items) {
    std::vector<double> out;
    for (const auto &item : items) {
        std::stringstream ss(item);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception &) {
                throw UsageError("not a number: " + tok);
            }
        }
    }
    return out;
}

int cmd_simulate(const std::string &ref, const std::vector<std::string> &thetas_in,
                 const std::vector<std::string> &eps_in, uint64_t runs, uint64_t seed, size_t threads,
                 const std::string &out_path, bool json) {
    Protocol p = resolve_protocol(ref);
    std::vector<double> thetas = parse_list(thetas_in);
    for (double e : parse_list(eps_in)) thetas.push_back(theta_of_epsilon(e));
    if (thetas.empty()) throw UsageError("simulate needs at least one --theta or --eps-in value");
    if (runs == 0) throw UsageError("--runs must be positive");
    std::vector<RunStats> stats;
    for (size_t i = 0; i < thetas.size(); i++) {
        SimConfig cfg;
        cfg.theta = thetas[i];
        cfg.runs = runs;
        cfg.seed = seed + i;
        cfg.threads = threads;
        stats.push_back(run(p, cfg));
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto &s : stats) {
        if (s.eps_in > 0 && s.mean_infidelity > 0) pts.push_back({s.eps_in, s.mean_infidelity});
    }
    bool have_fit = false;
    PowerLaw fit;
    try {
        fit = fit_power_law(pts);
        have_fit = true;
    } catch (const DegenerateInput &) {
    }
    std::ostringstream out;
    if (json) {
        ordered_json j;
        j["preset"] = p.name;
        j["runs"] = runs;
        j["seed"] = seed;
        ordered_json arr = ordered_json::array();
        for (const auto &s : stats) {
            arr.push_back({{"theta", s.theta},
                           {"eps_in", s.eps_in},
                           {"attempted", s.attempted},
                           {"accepted", s.accepted},
                           {"eps_out", s.mean_infidelity},
                           {"stderr", s.stderr_infidelity}});
        }
        j["points"] = arr;
        j["fit"] = have_fit ? ordered_json{{"C", fit.C}, {"d", fit.d}} : ordered_json(nullptr);
        out << j.dump(2) << '\n';
    } else {
        out << "preset,theta,eps_in,attempted,accepted,eps_out,stderr\n";
        for (const auto &s : stats) {
            out << p.name << ',' << fmt(s.theta) << ',' << fmt(s.eps_in) << ',' << s.attempted << ',' << s.accepted << ','
                << fmt(s.mean_infidelity) << ',' << fmt(s.stderr_infidelity) << '\n';
        }
        if (have_fit) out << "# fit,C=" << fmt(fit.C) << ",d=" << fmt(fit.d) << '\n';
    }
    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(out_path);
        if (!f) throw UsageError("cannot write " + out_path);
        f << out.str();
    }
    return 0;
}

int cmd_search_inner(size_t n, size_t c, size_t d, uint64_t trials, uint64_t seed, bool json) {
    if (trials == 0) throw UsageError("--trials must be positive");
    size_t best_k = 0;
    bool found = false;
    uint64_t hits = 0;
    CssCode best;
    for (uint64_t t = 0; t < trials; t++) {
        BitMatrix rows = sample_random_inner(n, c, seed + t);
        CssCode code = from_self_orthogonal(rows, "search");
        if (code.k_inner == 0 || code.distance < d) continue;
        VerificationReport rep = verify_code(code);
        if (!rep.ok()) continue;
        hits++;
        if (!found || code.k_inner > best_k) {
            best_k = code.k_inner;
            best = code;
            found = true;
        }
    }
    ordered_json j;
    j["n"] = n;
    j["c"] = c;
    j["d"] = d;
    j["trials"] = trials;
    j["seed"] = seed;
    j["hits"] = hits;
    j["bound"] = ncd_bound(n, c, d);
    if (found) {
        best.name = std::to_string(best.n_inner) + "_" + std::to_string(best.k_inner) + "_" + std::to_string(best.distance);
        j["best"] = code_json(best);
    } else {
        j["best"] = nullptr;
    }
    if (json) {
        emit(j);
    } else {
        std::cout << "# " << hits << " of " << trials << " samples reach distance >= " << d << '\n';
        if (found) {
            std::cout << "# best k = " << best_k << '\n' << format_code_file(best);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Magic-state distillation toolkit"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "Emit JSON");

    auto *codes = app.add_subcommand("codes", "Inner code library");
    codes->require_subcommand(1);
    codes->add_subcommand("list", "List library codes");
    std::string code_ref;
    auto *verify = codes->add_subcommand("verify", "Verify a library code or code file");
    verify->add_option("code", code_ref, "Library name or file")->required();
    auto *show = codes->add_subcommand("show", "Print a code");
    show->add_option("code", code_ref, "Library name or file")->required();
    for (auto *s : {codes, verify, show, codes->get_subcommand("list")}) s->add_flag("--json", json, "Emit JSON");

    auto *outer = app.add_subcommand("outer", "Outer codes");
    outer->require_subcommand(1);
    std::string outer_ref;
    size_t d_tilde = 0, order = 0;
    auto *sens = outer->add_subcommand("sensitivity", "Sensitivity and distillation condition");
    sens->add_option("outer", outer_ref, "m4, ring6, petersen, or a matrix file")->required();
    sens->add_option("--dtilde,--d-tilde", d_tilde, "Weight bound for s")->default_val(0);
    sens->add_option("--order", order, "Check 2|Mv|+|v| >= order");
    auto *pet = outer->add_subcommand("petersen", "Petersen-graph outer code");
    std::string basis_path;
    auto *tr = outer->add_subcommand("transpose", "Outer code from a classical codeword basis");
    tr->add_option("basis", basis_path, "File with one codeword per row")->required();
    for (auto *s : {outer, sens, pet, tr}) s->add_flag("--json", json, "Emit JSON");

    auto *proto = app.add_subcommand("protocol", "Protocols");
    proto->require_subcommand(1);
    std::string proto_ref;
    auto *info = proto->add_subcommand("info", "Resource report");
    info->add_option("protocol", proto_ref, "Preset name or protocol file")->required();
    for (auto *s : {proto, info}) s->add_flag("--json", json, "Emit JSON");

    auto *en = app.add_subcommand("enumerate", "Exact error polynomial");
    std::string preset_ref;
    size_t max_weight = 0;
    std::string method = "auto";
    en->add_option("--preset", preset_ref, "Preset name or protocol file")->required();
    en->add_option("--max-weight", max_weight, "Largest fault weight")->required();
    en->add_option("--method", method, "auto, flags, or density")->check(CLI::IsMember({"auto", "flags", "density"}));
    en->add_flag("--json", json, "Emit JSON");

    auto *sim = app.add_subcommand("simulate", "Monte Carlo sweep");
    std::vector<std::string> thetas, eps;
    uint64_t runs = 1000, seed = 0;
    size_t threads = 0;
    std::string out_path;
    sim->add_option("--preset", preset_ref, "Preset name or protocol file")->required();
    sim->add_option("--theta", thetas, "Over-rotation half-widths (comma separated)");
    sim->add_option("--eps-in", eps, "Input error rates (comma separated)");
    sim->add_option("--runs", runs, "Runs per point");
    sim->add_option("--seed", seed, "Seed");
    sim->add_option("--threads", threads, "Worker threads (0 = all cores)");
    sim->add_option("--out", out_path, "Output file");
    sim->add_flag("--json", json, "Emit JSON");

    auto *search = app.add_subcommand("search", "Random code search");
    search->require_subcommand(1);
    auto *search_inner = search->add_subcommand("inner", "Random weakly self-dual inner codes");
    size_t sn = 0, sc = 0, sd = 0;
    uint64_t trials = 100;
    search_inner->add_option("--n", sn, "Length")->required();
    search_inner->add_option("--c", sc, "Rows")->required();
    search_inner->add_option("--d", sd, "Target distance")->required();
    search_inner->add_option("--trials", trials, "Samples");
    search_inner->add_option("--seed", seed, "Seed");
    for (auto *s : {search, search_inner}) s->add_flag("--json", json, "Emit JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    }

    try {
        if (codes->parsed()) {
            if (verify->parsed()) return cmd_codes_verify(code_ref, json);
            if (show->parsed()) return cmd_codes_show(code_ref, json);
            return cmd_codes_list(json);
        }
        if (outer->parsed()) {
            if (sens->parsed()) return cmd_outer_sensitivity(outer_ref, d_tilde, order, json);
            if (pet->parsed()) return cmd_outer_petersen(json);
            return cmd_outer_transpose(basis_path, json);
        }
        if (info->parsed()) return cmd_protocol_info(proto_ref, json);
        if (en->parsed()) return cmd_enumerate(preset_ref, max_weight, method, json);
        if (sim->parsed()) return cmd_simulate(preset_ref, thetas, eps, runs, seed, threads, out_path, json);
        if (search_inner->parsed()) return cmd_search_inner(sn, sc, sd, trials, seed, json);
    } catch (const VerificationFailed &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
