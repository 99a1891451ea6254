#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bcn/errors.hpp"
#include "bcn/expr.hpp"
#include "bcn/logical_matrix.hpp"

// A Boolean control network in algebraic form: packed state x in 1..2^n,
// packed input u in 1..2^m, packed output y in 1..2^p, with
//   x(t+1) = L u(t) x(t),   y(t) = H x(t),
// where L is 2^n x 2^(m+n) and H is 2^p x 2^n, both logical.  Column
// (j-1)*2^n + q of L is the successor of state q under input j.

namespace bcn {

struct BCN {
    int n = 0;  // state variables
    int m = 0;  // input variables (0 allowed)
    int p = 0;  // output variables
    LogicalMatrix L;
    LogicalMatrix H;
    std::vector<std::string> state_names, input_names, output_names;

    int num_states() const { return 1 << n; }
    int num_inputs() const { return 1 << m; }
    int num_outputs() const { return 1 << p; }
};

/// Default names used whenever a model does not carry its own: z1..zn for
/// transformed states, u/u1..um, y/y1..yp.
inline std::vector<std::string> default_names(const std::string& stem, int count,
                                              bool bare_singleton = false) {
    std::vector<std::string> names;
    if (count == 1 && bare_singleton) {
        names.push_back(stem);
        return names;
    }
    for (int i = 1; i <= count; ++i) names.push_back(stem + std::to_string(i));
    return names;
}

namespace detail {

inline void check_bcn_shape(const BCN& b) {
    if (b.n < 1 || b.m < 0 || b.p < 1)
        throw ValidationError("model needs n >= 1, m >= 0, p >= 1");
    if (b.L.rows() != b.num_states() || b.L.cols() != b.num_inputs() * b.num_states())
        throw ValidationError("transition matrix must be 2^n x 2^(m+n)");
    if (b.H.rows() != b.num_outputs() || b.H.cols() != b.num_states())
        throw ValidationError("output matrix must be 2^p x 2^n");
}

}  // namespace detail

/// Build the algebraic form from one update expression per state variable
/// and one expression per output variable, by evaluating every update over
/// all 2^(m+n) input/state combinations.
inline BCN assemble(const std::vector<std::string>& state_names,
                    const std::vector<std::string>& input_names,
                    const std::vector<std::string>& output_names,
                    const std::vector<std::pair<std::string, ExprPtr>>& updates,
                    const std::vector<std::pair<std::string, ExprPtr>>& outputs) {
    const int n = static_cast<int>(state_names.size());
    const int m = static_cast<int>(input_names.size());
    const int p = static_cast<int>(output_names.size());
    if (n < 1) throw ValidationError("at least one state variable is required");
    if (p < 1) throw ValidationError("at least one output variable is required");
    if (n > 30 || m > 30 || n + m > 30)
        throw ValidationError("model too large to enumerate");

    std::set<std::string> declared;
    for (const auto& v : state_names)
        if (!declared.insert(v).second)
            throw ValidationError("duplicate variable name '" + v + "'");
    for (const auto& v : input_names)
        if (!declared.insert(v).second)
            throw ValidationError("duplicate variable name '" + v + "'");
    for (const auto& v : output_names)
        if (!declared.insert(v).second)
            throw ValidationError("output name '" + v + "' clashes with another name");

    auto pick = [](const std::vector<std::pair<std::string, ExprPtr>>& eqs,
                   const std::vector<std::string>& wanted, const char* what) {
        std::vector<ExprPtr> ordered(wanted.size());
        std::vector<char> used(eqs.size(), 0);
        for (std::size_t i = 0; i < wanted.size(); ++i) {
            for (std::size_t k = 0; k < eqs.size(); ++k) {
                if (eqs[k].first != wanted[i]) continue;
                if (ordered[i])
                    throw ValidationError(std::string("duplicate ") + what + " equation for '" +
                                          wanted[i] + "'");
                ordered[i] = eqs[k].second;
                used[k] = 1;
            }
            if (!ordered[i])
                throw ValidationError(std::string("missing ") + what + " equation for '" +
                                      wanted[i] + "'");
        }
        for (std::size_t k = 0; k < eqs.size(); ++k)
            if (!used[k])
                throw ValidationError(std::string(what) + " equation for unknown variable '" +
                                      eqs[k].first + "'");
        return ordered;
    };

    const std::vector<ExprPtr> f = pick(updates, state_names, "update");
    const std::vector<ExprPtr> h = pick(outputs, output_names, "output");

    std::set<std::string> update_scope(state_names.begin(), state_names.end());
    update_scope.insert(input_names.begin(), input_names.end());
    const std::set<std::string> output_scope(state_names.begin(), state_names.end());
    for (int i = 0; i < n; ++i)
        for (const auto& v : free_vars(f[static_cast<std::size_t>(i)]))
            if (!update_scope.count(v))
                throw ValidationError("update equation for '" + state_names[static_cast<std::size_t>(i)] +
                                      "' uses unknown variable '" + v + "'");
    for (int i = 0; i < p; ++i)
        for (const auto& v : free_vars(h[static_cast<std::size_t>(i)]))
            if (!output_scope.count(v))
                throw ValidationError("output equation for '" + output_names[static_cast<std::size_t>(i)] +
                                      "' uses non-state variable '" + v + "'");

    const int ns = 1 << n, ni = 1 << m;
    std::vector<int> l_delta(static_cast<std::size_t>(ni) * static_cast<std::size_t>(ns));
    std::vector<int> h_delta(static_cast<std::size_t>(ns));
    Assignment env;
    std::vector<bool> next(static_cast<std::size_t>(n));
    std::vector<bool> out(static_cast<std::size_t>(p));
    for (int q = 1; q <= ns; ++q) {
        for (int i = 1; i <= n; ++i)
            env[state_names[static_cast<std::size_t>(i - 1)]] = state_bit(q, n, i);
        for (int i = 0; i < p; ++i) out[static_cast<std::size_t>(i)] = eval(h[static_cast<std::size_t>(i)], env);
        h_delta[static_cast<std::size_t>(q - 1)] = state_to_index(out);
        for (int j = 1; j <= ni; ++j) {
            for (int i = 1; i <= m; ++i)
                env[input_names[static_cast<std::size_t>(i - 1)]] = state_bit(j, m, i);
            for (int i = 0; i < n; ++i)
                next[static_cast<std::size_t>(i)] = eval(f[static_cast<std::size_t>(i)], env);
            l_delta[static_cast<std::size_t>(j - 1) * static_cast<std::size_t>(ns) +
                    static_cast<std::size_t>(q - 1)] = state_to_index(next);
        }
    }

    BCN b{n, m, p, LogicalMatrix(ns, std::move(l_delta)), LogicalMatrix(1 << p, std::move(h_delta)),
          state_names, input_names, output_names};
    detail::check_bcn_shape(b);
    return b;
}

/// The 2^m square blocks L_1..L_{2^m} of L, in input order.
inline std::vector<LogicalMatrix> blocks(const BCN& b) {
    const int ns = b.num_states();
    std::vector<LogicalMatrix> out;
    out.reserve(static_cast<std::size_t>(b.num_inputs()));
    for (int j = 0; j < b.num_inputs(); ++j) {
        std::vector<int> d(b.L.delta().begin() + static_cast<std::ptrdiff_t>(j) * ns,
                           b.L.delta().begin() + static_cast<std::ptrdiff_t>(j + 1) * ns);
        out.emplace_back(ns, std::move(d));
    }
    return out;
}

/// One step of the dynamics.  The output is y(t), emitted at the current
/// state before the transition.
inline std::pair<int, int> step(const BCN& b, int x, int u) {
    if (x < 1 || x > b.num_states())
        throw ValidationError("state index " + std::to_string(x) + " out of range");
    if (u < 1 || u > b.num_inputs())
        throw ValidationError("input index " + std::to_string(u) + " out of range");
    const int next = b.L.col((u - 1) * b.num_states() + x);
    const int out = b.H.col(x);
    return {next, out};
}

struct Trajectory {
    std::vector<int> states;   // length = |inputs| + 1
    std::vector<int> outputs;  // one entry per visited state
};

inline Trajectory simulate(const BCN& b, int x0, const std::vector<int>& inputs) {
    Trajectory t;
    t.states.push_back(x0);
    if (x0 < 1 || x0 > b.num_states())
        throw ValidationError("state index " + std::to_string(x0) + " out of range");
    t.outputs.push_back(b.H.col(x0));
    for (int u : inputs) {
        auto [next, out] = step(b, t.states.back(), u);
        (void)out;
        t.states.push_back(next);
        t.outputs.push_back(b.H.col(next));
    }
    return t;
}

/// Coordinate change z = T x: the new dynamics are T L (I_{2^m} (x) T')
/// and H T', computed blockwise on the delta forms.  State names become
/// z1..zn; trajectories map under T with identical outputs.
inline BCN transform(const BCN& b, const LogicalMatrix& t) {
    if (t.rows() != b.num_states() || !t.is_permutation())
        throw ValidationError("coordinate transformation must be a 2^n x 2^n permutation");
    const LogicalMatrix tinv = transpose_permutation(t);
    const int ns = b.num_states();
    std::vector<int> l_delta(b.L.delta().size());
    for (int j = 0; j < b.num_inputs(); ++j)
        for (int k = 1; k <= ns; ++k) {
            const int x = tinv.col(k);
            const int next = b.L.col(j * ns + x);
            l_delta[static_cast<std::size_t>(j) * static_cast<std::size_t>(ns) +
                    static_cast<std::size_t>(k - 1)] = t.col(next);
        }
    std::vector<int> h_delta(static_cast<std::size_t>(ns));
    for (int k = 1; k <= ns; ++k)
        h_delta[static_cast<std::size_t>(k - 1)] = b.H.col(tinv.col(k));
    return BCN{b.n, b.m, b.p, LogicalMatrix(ns, std::move(l_delta)),
               LogicalMatrix(b.num_outputs(), std::move(h_delta)),
               default_names("z", b.n), b.input_names, b.output_names};
}

/// The decomposed system: z[1] (first s coordinates) evolves on its own as
/// z[1](t+1) = G1 u z[1] with G1 = [g1_blocks...], the tail follows
/// z[2](t+1) = G2 u z, and y = M z[1].
struct DecomposedBCN {
    int s = 0;
    std::vector<LogicalMatrix> g1_blocks;  // 2^m matrices, 2^s x 2^s
    LogicalMatrix g2;                      // 2^(n-s) x 2^(m+n)
    LogicalMatrix output_matrix;           // M, 2^p x 2^s
};

struct EquationSystem {
    std::vector<std::string> inputs, states, outputs;
    std::vector<std::pair<std::string, ExprPtr>> updates;      // per state bit
    std::vector<std::pair<std::string, ExprPtr>> output_map;   // per output bit
};

namespace detail {

/// DNF of one bit of a delta vector, as a function of `vars` (packed in the
/// same order).  Variables the bit does not depend on are dropped before
/// synthesizing minterms.
inline ExprPtr bit_to_expr(const std::vector<int>& delta, int bit_count, int bit_index,
                           const std::vector<std::string>& vars) {
    const int k = static_cast<int>(vars.size());
    std::vector<bool> full(delta.size());
    for (std::size_t c = 0; c < delta.size(); ++c)
        full[c] = state_bit(delta[c], bit_count, bit_index);

    // support: variable i matters iff flipping it changes the value somewhere
    std::vector<int> support;
    for (int i = 1; i <= k; ++i) {
        const std::size_t stride = std::size_t{1} << (k - i);
        bool depends = false;
        for (std::size_t c = 0; c < full.size() && !depends; ++c)
            if ((c & stride) == 0 && full[c] != full[c + stride]) depends = true;
        if (depends) support.push_back(i);
    }

    TruthTable t;
    for (int i : support) t.vars.push_back(vars[static_cast<std::size_t>(i - 1)]);
    t.values.resize(std::size_t{1} << support.size());
    for (std::size_t r = 0; r < t.values.size(); ++r) {
        // expand the support row back to a full index (others set to true = bit 0)
        std::size_t c = 0;
        for (std::size_t si = 0; si < support.size(); ++si) {
            const int i = support[si];
            const std::size_t bit = (r >> (support.size() - 1 - si)) & 1;
            c |= bit << (k - i);
        }
        t.values[r] = full[c];
    }
    return table_to_dnf(t);
}

}  // namespace detail

/// Reconstruct one DNF equation per state bit and per output bit from the
/// matrices.  Assembling the result reproduces (L, H) exactly.
inline EquationSystem decompile(const BCN& b) {
    EquationSystem eq;
    eq.states = b.state_names.empty() ? default_names("x", b.n) : b.state_names;
    eq.inputs = b.input_names.empty() ? default_names("u", b.m, true) : b.input_names;
    eq.outputs = b.output_names.empty() ? default_names("y", b.p, true) : b.output_names;

    std::vector<std::string> update_vars = eq.inputs;
    update_vars.insert(update_vars.end(), eq.states.begin(), eq.states.end());
    for (int i = 1; i <= b.n; ++i)
        eq.updates.emplace_back(eq.states[static_cast<std::size_t>(i - 1)],
                                detail::bit_to_expr(b.L.delta(), b.n, i, update_vars));
    for (int i = 1; i <= b.p; ++i)
        eq.output_map.emplace_back(eq.outputs[static_cast<std::size_t>(i - 1)],
                                   detail::bit_to_expr(b.H.delta(), b.p, i, eq.states));
    return eq;
}

}  // namespace bcn
