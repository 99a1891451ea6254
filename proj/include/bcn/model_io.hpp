#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcn/errors.hpp"
#include "bcn/model.hpp"

// Model files are JSON, in one of two forms (never both in one file):
//
//   equations form: {"inputs": [...], "states": [...], "outputs": [...],
//                    "update": {state: expr-string, ...},
//                    "output_map": {output: expr-string, ...}}
//
//   matrix form:    {"n": .., "m": .., "p": ..,
//                    "L": [2^m arrays of 2^n 1-based delta indices],
//                    "H": [2^n 1-based delta indices]}
//
// Unknown keys are ignored, so a machine report that embeds a matrix model
// can be fed straight back in.

namespace bcn {

inline std::string delta_str(const std::vector<int>& delta, int rows) {
    std::string out = "delta_" + std::to_string(rows) + "[";
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(delta[i]);
    }
    return out + "]";
}

inline std::string delta_str(const LogicalMatrix& m) { return delta_str(m.delta(), m.rows()); }

namespace detail {

inline std::vector<std::string> name_list(const nlohmann::json& j, const std::string& key,
                                          bool required) {
    if (!j.contains(key)) {
        if (required)
            throw ValidationError("model file: missing \"" + key + "\" list");
        return {};
    }
    if (!j.at(key).is_array())
        throw ValidationError("model file: \"" + key + "\" must be an array of names");
    std::vector<std::string> names;
    for (const auto& item : j.at(key)) {
        if (!item.is_string())
            throw ValidationError("model file: \"" + key + "\" must contain strings");
        const std::string name = item.get<std::string>();
        if (name.empty() || !detail::ident_start(name[0]))
            throw ValidationError("model file: '" + name + "' is not a valid identifier");
        for (char ch : name)
            if (!detail::ident_char(ch))
                throw ValidationError("model file: '" + name + "' is not a valid identifier");
        names.push_back(name);
    }
    return names;
}

inline std::vector<std::pair<std::string, ExprPtr>> equation_map(const nlohmann::json& j,
                                                                 const std::string& key) {
    if (!j.contains(key))
        throw ValidationError("model file: missing \"" + key + "\" object");
    if (!j.at(key).is_object())
        throw ValidationError("model file: \"" + key + "\" must map names to expression strings");
    std::vector<std::pair<std::string, ExprPtr>> eqs;
    for (const auto& [name, text] : j.at(key).items()) {
        if (!text.is_string())
            throw ValidationError("model file: " + key + "." + name + " must be a string");
        try {
            eqs.emplace_back(name, parse(text.get<std::string>()));
        } catch (const ParseError& e) {
            throw ValidationError(key + "." + name + ": " + e.what());
        }
    }
    return eqs;
}

inline std::vector<int> delta_list(const nlohmann::json& j, const std::string& where,
                                   std::size_t want_len, int range) {
    if (!j.is_array() || j.size() != want_len)
        throw ValidationError("model file: " + where + " must be an array of length " +
                              std::to_string(want_len));
    std::vector<int> out;
    out.reserve(want_len);
    for (const auto& item : j) {
        if (!item.is_number_integer())
            throw ValidationError("model file: " + where + " must contain integers");
        const int v = item.get<int>();
        if (v < 1 || v > range)
            throw ValidationError("model file: " + where + " entry " + std::to_string(v) +
                                  " out of range 1.." + std::to_string(range));
        out.push_back(v);
    }
    return out;
}

}  // namespace detail

/// True for equations form, false for matrix form.
inline bool is_equations_form(const nlohmann::json& j) {
    if (!j.is_object())
        throw ValidationError("model file: top level must be an object");
    const bool eq_form = j.contains("update") || j.contains("output_map");
    const bool mat_form = j.contains("L") || j.contains("H");
    if (eq_form && mat_form)
        throw ValidationError("model file: mixes equations form and matrix form");
    if (!eq_form && !mat_form)
        throw ValidationError("model file: expected equations form (states/update/output_map) "
                              "or matrix form (n/m/p/L/H)");
    return eq_form;
}

inline BCN model_from_json(const nlohmann::json& j, int max_n = 20) {
    const bool eq_form = is_equations_form(j);

    if (eq_form) {
        const auto states = detail::name_list(j, "states", true);
        const auto inputs = detail::name_list(j, "inputs", false);
        const auto outputs = detail::name_list(j, "outputs", true);
        if (static_cast<int>(states.size()) > max_n)
            throw ValidationError("model has n = " + std::to_string(states.size()) +
                                  " state variables; the cap is " + std::to_string(max_n) +
                                  " (raise it with --max-n)");
        return assemble(states, inputs, outputs, detail::equation_map(j, "update"),
                        detail::equation_map(j, "output_map"));
    }

    for (const char* key : {"n", "m", "p"})
        if (!j.contains(key) || !j.at(key).is_number_integer())
            throw ValidationError(std::string("model file: matrix form needs integer \"") + key +
                                  "\"");
    const int n = j.at("n").get<int>();
    const int m = j.at("m").get<int>();
    const int p = j.at("p").get<int>();
    if (n < 1 || m < 0 || p < 1)
        throw ValidationError("model file: need n >= 1, m >= 0, p >= 1");
    if (n > max_n || m > max_n || p > max_n)
        throw ValidationError("model dimensions exceed the cap of " + std::to_string(max_n) +
                              " (raise it with --max-n)");
    if (!j.contains("L") || !j.at("L").is_array() || j.at("L").size() != (std::size_t{1} << m))
        throw ValidationError("model file: \"L\" must be an array of 2^m delta rows");
    const std::size_t ns = std::size_t{1} << n;
    std::vector<int> l_delta;
    l_delta.reserve((std::size_t{1} << m) * ns);
    for (std::size_t jdx = 0; jdx < j.at("L").size(); ++jdx) {
        const auto block = detail::delta_list(j.at("L")[jdx], "L[" + std::to_string(jdx + 1) + "]",
                                              ns, 1 << n);
        l_delta.insert(l_delta.end(), block.begin(), block.end());
    }
    std::vector<int> h_delta =
        j.contains("H") ? detail::delta_list(j.at("H"), "H", ns, 1 << p)
                        : throw ValidationError("model file: missing \"H\"");
    BCN b{n, m, p, LogicalMatrix(1 << n, std::move(l_delta)),
          LogicalMatrix(1 << p, std::move(h_delta)),
          detail::name_list(j, "states", false), detail::name_list(j, "inputs", false),
          detail::name_list(j, "outputs", false)};
    if (!b.state_names.empty() && static_cast<int>(b.state_names.size()) != n)
        throw ValidationError("model file: \"states\" must list n names");
    detail::check_bcn_shape(b);
    return b;
}

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open model file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("model file '" + path + "': " + e.what());
    }
}

inline BCN load_model_file(const std::string& path, int max_n = 20) {
    return model_from_json(load_json_file(path), max_n);
}

/// Matrix-form document for a model; feeding this back in reproduces the
/// same analyses.
inline nlohmann::json matrix_model_json(const BCN& b) {
    nlohmann::json j;
    j["n"] = b.n;
    j["m"] = b.m;
    j["p"] = b.p;
    auto ljs = blocks(b);
    nlohmann::json l = nlohmann::json::array();
    for (const auto& lj : ljs) l.push_back(lj.delta());
    j["L"] = std::move(l);
    j["H"] = b.H.delta();
    return j;
}

inline nlohmann::json equations_model_json(const EquationSystem& eq) {
    nlohmann::json j;
    j["states"] = eq.states;
    j["inputs"] = eq.inputs;
    j["outputs"] = eq.outputs;
    nlohmann::json update = nlohmann::json::object();
    for (const auto& [name, e] : eq.updates) update[name] = to_string(e);
    j["update"] = std::move(update);
    nlohmann::json output_map = nlohmann::json::object();
    for (const auto& [name, e] : eq.output_map) output_map[name] = to_string(e);
    j["output_map"] = std::move(output_map);
    return j;
}

/// Equations-form document reconstructed from the matrices; reparsing and
/// assembling it reproduces (L, H) exactly.
inline std::string to_equations(const BCN& b) {
    return equations_model_json(decompile(b)).dump(2) + "\n";
}

}  // namespace bcn
