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

#include "distillery/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace distillery {

std::vector<size_t> CheckJob::target_slots() const {
    std::vector<size_t> out;
    if (!hyperbolic()) {
        for (size_t i = 0; i < slot_qubit.size(); i++) {
            if (slot_qubit[i] != kFiller) out.push_back(i);
        }
        return out;
    }
    std::vector<size_t> hs = hadamard_slots;
    std::sort(hs.begin(), hs.end());
    for (size_t h : hs) {
        size_t first = h & ~size_t{1};
        out.push_back(first);
        out.push_back(first + 1);
    }
    return out;
}

std::vector<size_t> CheckJob::targets() const {
    std::vector<size_t> out;
    for (size_t s : target_slots()) out.push_back(static_cast<size_t>(slot_qubit[s]));
    return out;
}

std::vector<size_t> CheckJob::passengers() const {
    std::vector<size_t> out;
    if (!hyperbolic()) return out;
    std::vector<size_t> ts = target_slots();
    for (size_t i = 0; i < slot_qubit.size(); i++) {
        if (slot_qubit[i] != kFiller && std::find(ts.begin(), ts.end(), i) == ts.end()) {
            out.push_back(static_cast<size_t>(slot_qubit[i]));
        }
    }
    return out;
}

size_t CheckJob::filler_pairs() const {
    return static_cast<size_t>(std::count(slot_qubit.begin(), slot_qubit.end(), kFiller)) / 2;
}

std::vector<size_t> CheckJob::encoded_qubits() const {
    std::vector<size_t> out;
    for (int q : slot_qubit) {
        if (q != kFiller) out.push_back(static_cast<size_t>(q));
    }
    return out;
}

void validate_job(const CheckJob &job, size_t n_outer) {
    if (!job.inner) throw InvalidJob("check has no inner code");
    const CssCode &c = *job.inner;
    if (job.slot_qubit.size() != c.k_inner) throw InvalidJob("slot count differs from k_inner of " + c.name);
    std::set<int> seen;
    for (int q : job.slot_qubit) {
        if (q == kFiller) continue;
        if (q < 0 || static_cast<size_t>(q) >= n_outer) throw InvalidJob("slot refers to a missing outer qubit");
        if (!seen.insert(q).second) throw InvalidJob("outer qubit appears twice in one check");
    }
    if (!job.hyperbolic()) {
        if (!job.hadamard_slots.empty()) throw InvalidJob("normal checks do not take hadamard slots");
        size_t fill = static_cast<size_t>(std::count(job.slot_qubit.begin(), job.slot_qubit.end(), kFiller));
        if (fill % 2) throw ParityMismatch("k_inner minus row weight must be even");
        if (seen.empty()) throw InvalidJob("check has no targets");
        return;
    }
    if (job.hadamard_slots.empty()) throw InvalidJob("hyperbolic check needs at least one hadamard slot");
    std::set<size_t> pairs;
    for (size_t h : job.hadamard_slots) {
        if (h >= c.k_inner) throw InvalidJob("hadamard slot out of range");
        if (job.slot_qubit[h] == kFiller) throw InvalidJob("hadamard slot holds a filler");
        if (!pairs.insert(h / 2).second) throw InvalidJob("two hadamard slots in one pair");
    }
    for (size_t j = 0; j + 1 < c.k_inner; j += 2) {
        bool f0 = job.slot_qubit[j] == kFiller;
        bool f1 = job.slot_qubit[j + 1] == kFiller;
        if (f0 != f1) throw InvalidJob("a hyperbolic pair mixes a filler with an outer qubit");
    }
}

CheckJob normal_check(std::shared_ptr<const CssCode> code, const std::vector<size_t> &targets) {
    if (code->kind != CodeKind::Normal) throw ParityMismatch("normal_check needs a normal inner code");
    if (targets.size() > code->k_inner) throw RowTooWide("row weight exceeds k_inner of " + code->name);
    if ((code->k_inner - targets.size()) % 2) throw ParityMismatch("k_inner minus row weight must be even");
    CheckJob j;
    j.inner = std::move(code);
    j.slot_qubit.assign(j.inner->k_inner, kFiller);
    for (size_t i = 0; i < targets.size(); i++) j.slot_qubit[i] = static_cast<int>(targets[i]);
    return j;
}

CheckJob hyperbolic_check(std::shared_ptr<const CssCode> code, const std::vector<size_t> &targets,
                          bool syndrome_between_passes) {
    if (code->kind != CodeKind::Hyperbolic) throw ParityMismatch("hyperbolic_check needs a hyperbolic inner code");
    if (targets.size() > code->k_inner) throw RowTooWide("row weight exceeds k_inner of " + code->name);
    if (targets.size() % 2) throw ParityMismatch("hyperbolic inner codes measure even-weight rows only");
    CheckJob j;
    j.inner = std::move(code);
    j.slot_qubit.assign(j.inner->k_inner, kFiller);
    for (size_t i = 0; i < targets.size(); i++) j.slot_qubit[i] = static_cast<int>(targets[i]);
    for (size_t i = 0; i < targets.size(); i += 2) j.hadamard_slots.push_back(i);
    j.syndrome_between_passes = syndrome_between_passes;
    return j;
}

std::vector<const CheckJob *> Protocol::checks() const {
    std::vector<const CheckJob *> out;
    for (const auto &s : stages) {
        for (const auto &j : s) out.push_back(&j);
    }
    return out;
}

std::vector<Location> Protocol::locations() const {
    std::vector<Location> out;
    for (size_t q = 0; q < n_outer; q++) out.push_back({LocationKind::Input, q, 0, 0});
    auto cs = checks();
    for (size_t c = 0; c < cs.size(); c++) {
        size_t n = cs[c]->inner->n_inner;
        for (size_t p = 0; p < cs[c]->passes(); p++) {
            for (size_t q = 0; q < n; q++) out.push_back({LocationKind::TDagger, q, c, p});
            for (size_t q = 0; q < n; q++) out.push_back({LocationKind::T, q, c, p});
        }
    }
    return out;
}

size_t Protocol::n_locations() const {
    size_t n = n_outer;
    for (const auto *c : checks()) n += c->t_gates();
    return n;
}

std::vector<size_t> Protocol::check_offsets() const {
    std::vector<size_t> out;
    size_t at = n_outer;
    for (const auto *c : checks()) {
        out.push_back(at);
        at += c->t_gates();
    }
    return out;
}

Protocol pipeline(size_t n_outer, std::vector<Stage> stages, size_t claimed_order, const std::string &name) {
    Protocol p;
    p.name = name;
    p.n_outer = n_outer;
    p.claimed_order = claimed_order;
    for (const auto &s : stages) {
        std::set<size_t> used;
        for (const auto &j : s) {
            validate_job(j, n_outer);
            for (size_t q : j.encoded_qubits()) {
                if (!used.insert(q).second) throw InvalidJob("checks within one stage share an outer qubit");
            }
        }
    }
    p.stages = std::move(stages);
    return p;
}

Protocol assemble(std::shared_ptr<const CssCode> inner, const OuterCode &m, size_t order, const std::string &name) {
    if (order == 0) order = inner->distance;
    for (size_t r = 0; r < m.m(); r++) {
        if (m.row_weights[r] > inner->k_inner) throw RowTooWide("row " + std::to_string(r) + " is wider than k_inner");
        bool ok = inner->kind == CodeKind::Hyperbolic ? m.row_weights[r] % 2 == 0
                                                       : (inner->k_inner - m.row_weights[r]) % 2 == 0;
        if (!ok) throw ParityMismatch("row " + std::to_string(r) + " parity is incompatible with " + inner->name);
    }
    if (order > inner->distance) throw ConditionFails("requested order exceeds the inner distance", BitVector(m.n_outer()));
    ConditionResult cond = distillation_condition(m, order);
    if (!cond.holds) {
        throw ConditionFails("2|Mv|+|v| = " + std::to_string(cond.value) + " < " + std::to_string(order), cond.witness);
    }
    // A row runs one stage after the latest earlier row it shares a qubit with.
    std::vector<Stage> stages;
    std::vector<size_t> last_stage(m.n_outer(), 0);
    std::vector<bool> touched(m.n_outer(), false);
    for (size_t r = 0; r < m.m(); r++) {
        std::vector<size_t> targets = m.M.row(r).support();
        CheckJob job = inner->kind == CodeKind::Normal ? normal_check(inner, targets)
                                                       : hyperbolic_check(inner, targets, inner->distance > 2);
        size_t s = 0;
        for (size_t q : targets) {
            if (touched[q]) s = std::max(s, last_stage[q] + 1);
        }
        if (s >= stages.size()) stages.resize(s + 1);
        stages[s].push_back(std::move(job));
        for (size_t q : targets) {
            touched[q] = true;
            last_stage[q] = s;
        }
    }
    return pipeline(m.n_outer(), std::move(stages), order, name);
}

double ResourceReport::gamma(size_t order) const {
    if (order < 2) return 0;
    return std::log(ratio()) / std::log(static_cast<double>(order));
}

ResourceReport resources(const Protocol &p) {
    ResourceReport r;
    r.n_outer = p.n_outer;
    r.n_T = p.n_locations();
    uint64_t g = std::gcd(r.n_T, static_cast<uint64_t>(std::max<size_t>(p.n_outer, 1)));
    r.ratio_num = r.n_T / g;
    r.ratio_den = std::max<size_t>(p.n_outer, 1) / g;
    r.d = p.claimed_order;
    r.qubit_estimate = p.n_outer;
    for (const auto *c : p.checks()) {
        size_t q = c->inner->n_inner + p.n_outer - c->encoded_qubits().size();
        r.qubit_estimate = std::max(r.qubit_estimate, q);
    }
    return r;
}

double closed_form_n_T_per_output(size_t d, size_t n_inner, size_t k_inner) {
    return static_cast<double>(d) +
           static_cast<double>(d - 1) * (static_cast<double>(n_inner) / static_cast<double>(k_inner) - 1.0);
}

std::shared_ptr<const CssCode> shared_library_code(const std::string &name) {
    static std::map<std::string, std::shared_ptr<const CssCode>> cache;
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    auto ptr = std::make_shared<const CssCode>(library_code(name));
    cache.emplace(name, ptr);
    return ptr;
}

std::vector<std::string> preset_names() { return {"4", "7", "16", "17", "20", "21", "22", "23"}; }

namespace {

CheckJob explicit_check(const std::string &code, std::vector<int> slots, std::vector<size_t> hadamard, bool mid) {
    CheckJob j;
    j.inner = shared_library_code(code);
    j.slot_qubit = std::move(slots);
    j.hadamard_slots = std::move(hadamard);
    j.syndrome_between_passes = mid;
    return j;
}

}  // namespace

Protocol preset(const std::string &name) {
    auto steane = shared_library_code("7_1_3");
    if (name == "4") {
        return pipeline(2, {{explicit_check("4_2_2", {0, 1}, {0}, false)}}, 2, "4");
    }
    if (name == "7") {
        return pipeline(1, {{normal_check(steane, {0})}}, 3, "7");
    }
    if (name == "17") {
        return pipeline(1, {{normal_check(steane, {0})}, {normal_check(shared_library_code("17_1_5"), {0})}}, 5, "17");
    }
    if (name == "23") {
        return pipeline(1,
                        {{normal_check(steane, {0})},
                         {normal_check(shared_library_code("17_1_5"), {0})},
                         {normal_check(shared_library_code("23_1_7"), {0})}},
                        7, "23");
    }
    if (name == "21") {
        auto c21 = shared_library_code("21_3_5");
        return pipeline(3,
                        {{normal_check(steane, {0}), normal_check(steane, {1}), normal_check(steane, {2})},
                         {normal_check(c21, {0, 1, 2})}},
                        5, "21");
    }
    if (name == "22") {
        return assemble(shared_library_code("21_3_5"), outer_m4(), 5, "22");
    }
    if (name == "16" || name == "20") {
        Stage first;
        for (int a : {0, 2, 4}) first.push_back(explicit_check("4_2_2", {a, a + 1}, {0}, false));
        Stage second;
        if (name == "16") {
            for (size_t h : {0, 2, 4}) second.push_back(explicit_check("16_6_4", {1, 2, 3, 4, 5, 0}, {h}, true));
            // All three checks hold every outer qubit, so each runs in its own stage.
            return pipeline(6, {first, {second[0]}, {second[1]}, {second[2]}}, 4, "16");
        }
        for (auto [a, b] : {std::pair{1, 2}, std::pair{3, 4}, std::pair{5, 0}}) {
            second.push_back(explicit_check("16_2_4", {a, b}, {0}, true));
        }
        return pipeline(6, {first, second}, 4, "20");
    }
    if (name == "petersen") {
        return assemble(shared_library_code("21_3_5"), outer_petersen(), 5, "petersen");
    }
    if (name == "ring6") {
        return assemble(shared_library_code("16_6_4"), outer_ring6(), 4, "ring6");
    }
    throw UnknownPreset("unknown preset: " + name);
}

namespace {

std::shared_ptr<const CssCode> resolve_code(const std::string &ref, const std::string &base_dir) {
    if (ref.rfind("file:", 0) == 0) {
        std::string path = ref.substr(5);
        if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
        return std::make_shared<const CssCode>(load_code_file(path));
    }
    return shared_library_code(ref);
}

}  // namespace

Protocol parse_protocol(const std::string &text, const std::string &base_dir) {
    std::istringstream in(text);
    std::string line;
    std::string name;
    size_t n_outer = 0;
    size_t order = 0;
    std::vector<Stage> stages;
    size_t line_no = 0;
    auto fail = [&](const std::string &msg) {
        throw ParseError("protocol line " + std::to_string(line_no) + ": " + msg);
    };
    auto index = [&](const std::string &tok) -> size_t {
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) fail("bad index '" + tok + "'");
        return static_cast<size_t>(std::stoul(tok));
    };
    while (std::getline(in, line)) {
        line_no++;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "name") {
            ls >> name;
        } else if (key == "n_outer") {
            if (!(ls >> n_outer)) fail("n_outer needs an integer");
        } else if (key == "order") {
            if (!(ls >> order)) fail("order needs an integer");
        } else if (key == "stage") {
            stages.emplace_back();
        } else if (key == "assemble") {
            std::string code, outer_path;
            if (!(ls >> code >> outer_path)) fail("assemble needs CODE OUTER_FILE");
            if (!outer_path.empty() && outer_path[0] != '/') outer_path = base_dir + "/" + outer_path;
            Protocol p = assemble(resolve_code(code, base_dir), load_outer_file(outer_path), order, name);
            return p;
        } else if (key == "check") {
            if (stages.empty()) fail("check before any stage");
            CheckJob j;
            std::string code;
            if (!(ls >> code)) fail("check needs a code name");
            j.inner = resolve_code(code, base_dir);
            std::string tok;
            std::string mode;
            while (ls >> tok) {
                if (tok == "slots" || tok == "hadamard") {
                    mode = tok;
                } else if (tok == "mid") {
                    std::string v;
                    ls >> v;
                    if (v != "on" && v != "off") fail("mid takes on or off");
                    j.syndrome_between_passes = v == "on";
                    mode.clear();
                } else if (mode == "slots") {
                    j.slot_qubit.push_back(tok == "-" ? kFiller : static_cast<int>(index(tok)));
                } else if (mode == "hadamard") {
                    j.hadamard_slots.push_back(index(tok));
                } else {
                    fail("unexpected token '" + tok + "'");
                }
            }
            stages.back().push_back(std::move(j));
        } else {
            fail("unknown directive '" + key + "'");
        }
    }
    if (n_outer == 0) fail("missing n_outer");
    return pipeline(n_outer, std::move(stages), order, name);
}

Protocol load_protocol_file(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open protocol file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    std::string dir = path.find('/') == std::string::npos ? "." : path.substr(0, path.find_last_of('/'));
    return parse_protocol(ss.str(), dir);
}

std::string format_protocol(const Protocol &p) {
    std::ostringstream out;
    if (!p.name.empty()) out << "name " << p.name << '\n';
    out << "n_outer " << p.n_outer << '\n';
    out << "order " << p.claimed_order << '\n';
    for (const auto &s : p.stages) {
        out << "stage\n";
        for (const auto &j : s) {
            out << "check " << j.inner->name << " slots";
            for (int q : j.slot_qubit) {
                if (q == kFiller) {
                    out << " -";
                } else {
                    out << ' ' << q;
                }
            }
            if (j.hyperbolic()) {
                out << " hadamard";
                for (size_t h : j.hadamard_slots) out << ' ' << h;
                out << " mid " << (j.syndrome_between_passes ? "on" : "off");
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace distillery
