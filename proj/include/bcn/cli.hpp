#pragma once

#include <algorithm>
#include <chrono>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcn/decomposition.hpp"
#include "bcn/model_io.hpp"
#include "bcn/observability.hpp"

// Command-line front end.  Reports are deterministic: identical inputs
// produce byte-identical output (timing appears only in human output and
// only behind --timing).  Exit codes: 0 = analysis completed (including
// "undecomposable" and failed verifications), 1 = input/validation error,
// 2 = broken internal invariant.

namespace bcn::cli {

constexpr int kSchemaVersion = 1;

namespace detail {

struct Common {
    std::string model_path;
    bool json = false;
    bool quiet = false;
    bool timing = false;
    int max_n = 20;
};

inline void add_common(CLI::App* sub, Common& c) {
    sub->add_option("model", c.model_path, "model file (equations or matrix form JSON)")
        ->required();
    sub->add_flag("--json", c.json, "machine-readable report");
    sub->add_flag("--quiet", c.quiet, "omit informational lines from human output");
    sub->add_flag("--timing", c.timing, "append elapsed time to human output");
    sub->add_option("--max-n", c.max_n, "cap on state variable count (default 20)");
}

inline std::vector<int> parse_index_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ValidationError(what + ": '" + item + "' is not an integer");
        }
    }
    if (out.empty())
        throw ValidationError(what + ": empty list");
    return out;
}

inline LogicalMatrix permutation_from_arg(const std::string& text, int size,
                                          const std::string& what) {
    const std::vector<int> delta = parse_index_list(text, what);
    if (static_cast<int>(delta.size()) != size)
        throw ValidationError(what + ": expected " + std::to_string(size) + " entries, got " +
                              std::to_string(delta.size()));
    LogicalMatrix t(size, delta);
    if (!t.is_permutation())
        throw ValidationError(what + ": not a permutation of 1.." + std::to_string(size));
    return t;
}

inline std::string word_str(const std::vector<int>& word, int alphabet) {
    std::string s;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i && alphabet > 9) s += ".";
        s += std::to_string(word[i]);
    }
    return s;
}

inline std::string bits_str(int k, int n) {
    std::string s = "(";
    const std::vector<bool> bits = index_to_state(k, n);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (i) s += ",";
        s += bits[i] ? "1" : "0";
    }
    return s + ")";
}

inline std::string rational_str(const RationalMatrix& m) {
    const RationalMatrix r = m.normalized();
    std::string s;
    if (r.denominator() != 1) s += "1/" + std::to_string(r.denominator()) + " * ";
    s += "[";
    for (int i = 1; i <= r.rows(); ++i) {
        if (i > 1) s += ",";
        s += "[";
        for (int j = 1; j <= r.cols(); ++j) {
            if (j > 1) s += ",";
            s += std::to_string(r.at(i, j));
        }
        s += "]";
    }
    return s + "]";
}

inline nlohmann::json rational_json(const RationalMatrix& m) {
    const RationalMatrix r = m.normalized();
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 1; i <= r.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 1; j <= r.cols(); ++j) row.push_back(r.at(i, j));
        rows.push_back(std::move(row));
    }
    return {{"denominator", r.denominator()}, {"numerators", std::move(rows)}};
}

inline nlohmann::json partition_json(const Partition& p) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& blk : p.blocks()) out.push_back(blk);
    return out;
}

inline nlohmann::json report_base(const char* command, const BCN& b) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    j["model"] = matrix_model_json(b);
    return j;
}

inline void echo_model(const Common& c, const BCN& b, std::ostream& out) {
    if (!c.quiet)
        out << "model: n = " << b.n << "  m = " << b.m << "  p = " << b.p << "\n";
}

constexpr const char* kObservabilityNote =
    "the distinct-columns test characterizes observability only for globally "
    "controllable networks; controllability is not checked here";

/// Decompiled equations of the transformed system, in canonical names
/// (z1..zn, u/u1..um, y/y1..yp) so reports do not depend on the source
/// model's naming.
inline EquationSystem canonical_equations(const BCN& b, const LogicalMatrix& t) {
    BCN moved = transform(b, t);
    moved.state_names = default_names("z", moved.n);
    moved.input_names = default_names("u", moved.m, true);
    moved.output_names = default_names("y", moved.p, true);
    return decompile(moved);
}

// ---------------------------------------------------------------------- //

inline void cmd_convert(const Common& c, const BCN& b, std::ostream& out) {
    if (c.json) {
        nlohmann::json j = matrix_model_json(b);
        j["schema_version"] = kSchemaVersion;
        j["command"] = "convert";
        out << j.dump(2) << "\n";
        return;
    }
    out << "n = " << b.n << "  m = " << b.m << "  p = " << b.p << "\n";
    const auto ljs = blocks(b);
    for (std::size_t j = 0; j < ljs.size(); ++j)
        out << "L_" << j + 1 << " = " << delta_str(ljs[j]) << "\n";
    out << "H = " << delta_str(b.H) << "\n";
}

inline void cmd_obsmat(const Common& c, const BCN& b, std::ostream& out) {
    const ObservabilityMatrix o = obs_rows(b);
    const Partition part = obs_partition(b);
    const bool observable = part.block_count() == static_cast<std::size_t>(part.universe_size());
    const bool parity_blocked = undecomposable_by_parity(part);

    if (c.json) {
        nlohmann::json j = report_base("obsmat", b);
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : o.rows) rows.push_back({{"word", r.word}, {"row", r.row}});
        j["rows"] = std::move(rows);
        j["closure_depth"] = o.closure_depth;
        j["partition"] = partition_json(part);
        j["observable_columns"] = observable;
        j["observability_note"] = kObservabilityNote;
        j["odd_block_undecomposable"] = parity_blocked;
        out << j.dump(2) << "\n";
        return;
    }
    echo_model(c, b, out);
    out << "observability rows: " << o.rows.size() << " (closure depth " << o.closure_depth
        << ")\n";
    for (std::size_t i = 0; i < o.rows.size(); ++i)
        out << "O[" << i + 1 << "] word \"" << word_str(o.rows[i].word, b.num_inputs())
            << "\": " << delta_str(o.rows[i].row, o.row_range) << "\n";
    out << "C = " << part.to_string() << "\n";
    out << "observable (distinct columns): " << (observable ? "yes" : "no") << "\n";
    if (!c.quiet) out << "note: " << kObservabilityNote << "\n";
    out << "odd-size class rules out decomposition: " << (parity_blocked ? "yes" : "no") << "\n";
}

inline void print_decomposition(const Common& c, const BCN& b, const DecompositionResult& res,
                                bool list_all, int requested_order, std::ostream& out) {
    if (c.json) {
        nlohmann::json j = report_base("decompose", b);
        if (requested_order > 0) j["requested_order"] = requested_order;
        j["order"] = res.order;
        j["decomposable"] = res.order > 0;
        if (res.order > 0) {
            j["s"] = b.n - res.order;
            j["partition"] = partition_json(*res.partition);
            j["alternatives"] = res.all_partitions.size() - 1;
            if (list_all) {
                nlohmann::json all = nlohmann::json::array();
                for (const auto& p : res.all_partitions) all.push_back(partition_json(p));
                j["all_partitions"] = std::move(all);
            }
            j["Q"] = res.q->delta();
            j["T"] = res.t->delta();
            nlohmann::json g1 = nlohmann::json::array();
            for (const auto& g : res.decomposed->g1_blocks) g1.push_back(g.delta());
            j["G1"] = std::move(g1);
            j["G2"] = res.decomposed->g2.delta();
            j["M"] = res.decomposed->output_matrix.delta();
            j["equations"] = equations_model_json(canonical_equations(b, *res.t));
        }
        out << j.dump(2) << "\n";
        return;
    }
    echo_model(c, b, out);
    out << "order = " << res.order;
    if (res.order > 0) out << " (retained coordinates s = " << b.n - res.order << ")";
    out << "\n";
    if (res.order == 0) {
        out << "undecomposable with respect to outputs\n";
        return;
    }
    out << "decomposable with respect to outputs\n";
    out << "partition = " << res.partition->to_string() << "\n";
    out << "alternatives at this order: " << res.all_partitions.size() - 1 << "\n";
    if (list_all)
        for (std::size_t i = 0; i < res.all_partitions.size(); ++i)
            out << "partition[" << i + 1 << "] = " << res.all_partitions[i].to_string() << "\n";
    out << "Q = " << delta_str(*res.q) << "\n";
    out << "T = " << delta_str(*res.t) << "\n";
    for (std::size_t j = 0; j < res.decomposed->g1_blocks.size(); ++j)
        out << "G1_" << j + 1 << " = " << delta_str(res.decomposed->g1_blocks[j]) << "\n";
    out << "G2 = " << delta_str(res.decomposed->g2) << "\n";
    out << "M = " << delta_str(res.decomposed->output_matrix) << "\n";
    const EquationSystem eq = canonical_equations(b, *res.t);
    for (const auto& [name, e] : eq.updates) out << name << "' = " << to_string(e) << "\n";
    for (const auto& [name, e] : eq.output_map) out << name << " = " << to_string(e) << "\n";
}

inline void cmd_decompose(const Common& c, const BCN& b, int fixed_order, bool list_all,
                          std::ostream& out) {
    if (fixed_order > 0) {
        std::vector<Partition> all = search_congruent_partitions(b, fixed_order, SearchMode::All);
        DecompositionResult res;
        if (!all.empty()) {
            res.order = fixed_order;
            res.partition = all.front();
            res.q = q_from_partition(all.front());
            res.t = t_from_q(*res.q);
            res.decomposed = extract_subsystems(b, *res.t, b.n - fixed_order);
            res.all_partitions = std::move(all);
        }
        if (c.json) {
            if (res.order == 0) {
                nlohmann::json j = report_base("decompose", b);
                j["requested_order"] = fixed_order;
                j["order"] = 0;
                j["decomposable"] = false;
                out << j.dump(2) << "\n";
            } else {
                print_decomposition(c, b, res, list_all, fixed_order, out);
            }
            return;
        }
        if (res.order == 0) {
            echo_model(c, b, out);
            out << "no decomposition of order " << fixed_order << " exists\n";
            return;
        }
        print_decomposition(c, b, res, list_all, fixed_order, out);
        return;
    }
    print_decomposition(c, b, max_decomposition(b), list_all, 0, out);
}

inline void cmd_verify(const Common& c, const BCN& b, const LogicalMatrix& t, int s,
                       std::ostream& out) {
    const VerifyReport rep = verify_decomposition(b, t, s);
    if (c.json) {
        nlohmann::json j = report_base("verify", b);
        j["T"] = t.delta();
        j["s"] = s;
        j["order"] = b.n - s;
        j["ok"] = rep.ok;
        nlohmann::json failures = nlohmann::json::array();
        for (const auto& f : rep.failures)
            failures.push_back({{"matrix", f.matrix},
                                {"class", f.class_index},
                                {"state_a", f.vertex_a},
                                {"image_a", f.image_a},
                                {"state_b", f.vertex_b},
                                {"image_b", f.image_b}});
        j["failures"] = std::move(failures);
        out << j.dump(2) << "\n";
        return;
    }
    echo_model(c, b, out);
    out << "T = " << delta_str(t) << "  s = " << s << "  order = " << b.n - s << "\n";
    out << "verification: " << (rep.ok ? "PASS" : "FAIL") << "\n";
    for (const auto& f : rep.failures) out << "  " << f.describe() << "\n";
}

inline void cmd_simulate(const Common& c, const BCN& b, int x0, const std::vector<int>& inputs,
                         bool bits, std::ostream& out) {
    const Trajectory tr = simulate(b, x0, inputs);
    if (c.json) {
        nlohmann::json j = report_base("simulate", b);
        j["x0"] = x0;
        j["inputs"] = inputs;
        j["states"] = tr.states;
        j["outputs"] = tr.outputs;
        nlohmann::json sb = nlohmann::json::array(), ob = nlohmann::json::array();
        for (int k : tr.states) {
            nlohmann::json v = nlohmann::json::array();
            for (bool bit : index_to_state(k, b.n)) v.push_back(bit ? 1 : 0);
            sb.push_back(std::move(v));
        }
        for (int k : tr.outputs) {
            nlohmann::json v = nlohmann::json::array();
            for (bool bit : index_to_state(k, b.p)) v.push_back(bit ? 1 : 0);
            ob.push_back(std::move(v));
        }
        j["state_bits"] = std::move(sb);
        j["output_bits"] = std::move(ob);
        out << j.dump(2) << "\n";
        return;
    }
    echo_model(c, b, out);
    out << "states: ";
    for (std::size_t i = 0; i < tr.states.size(); ++i) out << (i ? " " : "") << tr.states[i];
    out << "\noutputs:";
    for (int y : tr.outputs) out << " " << y;
    out << "\n";
    if (bits) {
        out << "state bits: ";
        for (std::size_t i = 0; i < tr.states.size(); ++i)
            out << (i ? " " : "") << bits_str(tr.states[i], b.n);
        out << "\noutput bits:";
        for (int y : tr.outputs) out << " " << bits_str(y, b.p);
        out << "\n";
    }
}

inline void cmd_regularity(const Common& c, const BCN& b, const LogicalMatrix& t1,
                           const LogicalMatrix& t2, int s, std::ostream& out) {
    if (!verify_decomposition(b, t1, s))
        throw ValidationError("--t1 does not realize a decomposition with s = " +
                              std::to_string(s));
    if (!verify_decomposition(b, t2, s))
        throw ValidationError("--t2 does not realize a decomposition with s = " +
                              std::to_string(s));
    const RegularityReport rep = regularity_test(t1, t2, s);
    if (c.json) {
        nlohmann::json j = report_base("regularity", b);
        j["T1"] = t1.delta();
        j["T2"] = t2.delta();
        j["s"] = s;
        j["R"] = rational_json(rep.r);
        j["r_is_logical"] = rep.r_is_logical;
        j["verdict"] =
            rep.verdict == RegularityVerdict::NotRegular ? "not_regular" : "inconclusive";
        out << j.dump(2) << "\n";
        return;
    }
    echo_model(c, b, out);
    out << "s = " << s << "  order = " << b.n - s << "\n";
    out << "R = " << rational_str(rep.r) << "\n";
    out << "R is logical: " << (rep.r_is_logical ? "yes" : "no") << "\n";
    if (rep.verdict == RegularityVerdict::NotRegular)
        out << "verdict: NotRegular (the largest unobservable subspace is not a regular "
               "subspace)\n";
    else
        out << "verdict: Inconclusive (a logical R proves nothing either way)\n";
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact conversion, observability analysis and maximum output decomposition "
                 "of Boolean control networks"};
    app.name("bcnkit");
    app.require_subcommand(1);

    detail::Common common;
    int fixed_order = 0;
    bool list_all = false;
    std::string t_arg, t1_arg, t2_arg;
    int s_arg = -1;
    int x0 = 0;
    std::string inputs_arg;
    int steps = -1;
    bool bits = false;

    CLI::App* convert = app.add_subcommand("convert", "compile equations to matrix form");
    detail::add_common(convert, common);

    CLI::App* obsmat = app.add_subcommand("obsmat", "observability rows and state partition");
    detail::add_common(obsmat, common);

    CLI::App* decompose = app.add_subcommand("decompose", "maximum decomposition with respect to outputs");
    detail::add_common(decompose, common);
    decompose->add_option("--order", fixed_order, "search a fixed order instead of the maximum");
    decompose->add_flag("--all", list_all, "list every partition at the winning order");

    CLI::App* verify = app.add_subcommand("verify", "check a coordinate transformation");
    detail::add_common(verify, common);
    verify->add_option("--t", t_arg, "permutation T as comma-separated delta indices")->required();
    verify->add_option("--s", s_arg, "retained coordinate count")->required();

    CLI::App* simulate = app.add_subcommand("simulate", "run a trajectory");
    detail::add_common(simulate, common);
    simulate->add_option("--x0", x0, "initial state (1-based delta index)")->required();
    simulate->add_option("--inputs", inputs_arg, "comma-separated input indices");
    simulate->add_option("--steps", steps, "step count (systems without inputs)");
    simulate->add_flag("--bits", bits, "also print Boolean tuples");

    CLI::App* regularity = app.add_subcommand("regularity", "compare two decompositions");
    detail::add_common(regularity, common);
    regularity->add_option("--t1", t1_arg, "first transformation")->required();
    regularity->add_option("--t2", t2_arg, "second transformation")->required();
    regularity->add_option("--s", s_arg, "retained coordinate count")->required();

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    const auto started = std::chrono::steady_clock::now();
    try {
        const nlohmann::json model_doc = load_json_file(common.model_path);
        const bool equations_form = is_equations_form(model_doc);
        const BCN b = model_from_json(model_doc, common.max_n);
        if (convert->parsed()) {
            if (!equations_form)
                throw ValidationError("convert expects an equations-form model file");
            detail::cmd_convert(common, b, out);
        } else if (obsmat->parsed()) {
            detail::cmd_obsmat(common, b, out);
        } else if (decompose->parsed()) {
            if (decompose->count("--order") && fixed_order < 1)
                throw ValidationError("--order must be >= 1");
            detail::cmd_decompose(common, b, decompose->count("--order") ? fixed_order : 0,
                                  list_all, out);
        } else if (verify->parsed()) {
            if (s_arg < 0 || s_arg > b.n)
                throw ValidationError("--s must be between 0 and n");
            detail::cmd_verify(common, b,
                               detail::permutation_from_arg(t_arg, b.num_states(), "--t"), s_arg,
                               out);
        } else if (simulate->parsed()) {
            std::vector<int> inputs;
            if (simulate->count("--inputs") && simulate->count("--steps"))
                throw ValidationError("give either --inputs or --steps, not both");
            if (simulate->count("--inputs")) {
                inputs = detail::parse_index_list(inputs_arg, "--inputs");
            } else if (simulate->count("--steps")) {
                if (steps < 0) throw ValidationError("--steps must be >= 0");
                if (b.m != 0)
                    throw ValidationError("--steps is only for systems without inputs; "
                                          "give --inputs");
                inputs.assign(static_cast<std::size_t>(steps), 1);
            } else {
                throw ValidationError("give --inputs or --steps");
            }
            detail::cmd_simulate(common, b, x0, inputs, bits, out);
        } else if (regularity->parsed()) {
            if (s_arg < 0 || s_arg > b.n)
                throw ValidationError("--s must be between 0 and n");
            detail::cmd_regularity(common, b,
                                   detail::permutation_from_arg(t1_arg, b.num_states(), "--t1"),
                                   detail::permutation_from_arg(t2_arg, b.num_states(), "--t2"),
                                   s_arg, out);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
    if (common.timing && !common.json) {
        const auto elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - started);
        out << "elapsed: " << elapsed.count() / 1000.0 << " ms\n";
    }
    return 0;
}

}  // namespace bcn::cli
