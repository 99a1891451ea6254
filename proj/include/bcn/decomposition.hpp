#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcn/model.hpp"
#include "bcn/observability.hpp"
#include "bcn/partition.hpp"

// Maximum decomposition with respect to outputs.  A decomposition of order
// n-s is a permutation z = T x after which the first s coordinates evolve
// on their own and determine the output.  T exists for order n-s exactly
// when the state graph has an equal partition into 2^s blocks of size
// 2^(n-s) that is forward-closed under every input and output-uniform;
// the search below finds all such partitions of a given block size.

namespace bcn {

struct DecompositionResult {
    int order = 0;  // n - s; 0 means undecomposable
    std::optional<Partition> partition;        // chosen partition (order >= 1)
    std::optional<LogicalMatrix> q;            // 2^s x 2^n
    std::optional<LogicalMatrix> t;            // permutation, 2^n x 2^n
    std::optional<DecomposedBCN> decomposed;
    std::vector<Partition> all_partitions;     // every partition at the winning order
};

/// Largest d such that 2^d divides every block of the indistinguishability
/// partition; any decomposition order is at most this (0 iff some block
/// has odd size).
inline int max_feasible_order(const Partition& c) {
    int g = 0;
    for (const auto& blk : c.blocks()) g = std::gcd(g, static_cast<int>(blk.size()));
    int d = 0;
    while (g % 2 == 0) {
        g /= 2;
        ++d;
    }
    return d;
}

enum class SearchMode { First, All };

namespace detail {

// Backtracking search over congruence closures.  Classes are grown with a
// union-find; merging a,b forces merges of (succ_j(a), succ_j(b)) for every
// input j, a merge is rejected when it would join different
// indistinguishability classes or exceed the block size, and branching
// always extends the class of the smallest unfinished vertex.  Every
// qualifying partition is reachable this way because each forced merge is
// implied by forward closure, so the enumeration is complete; results are
// deduplicated and canonically ordered.
class CongruenceSearch {
public:
    CongruenceSearch(const std::vector<LogicalMatrix>& ljs, const Partition& c, int block_size)
        : num_vertices_(c.universe_size()), num_graphs_(static_cast<int>(ljs.size())),
          block_size_(block_size) {
        succ_.resize(static_cast<std::size_t>(num_graphs_) * static_cast<std::size_t>(num_vertices_));
        for (int j = 0; j < num_graphs_; ++j)
            for (int v = 0; v < num_vertices_; ++v)
                succ_[index(j, v)] = ljs[static_cast<std::size_t>(j)].col(v + 1) - 1;
        cblock_.resize(static_cast<std::size_t>(num_vertices_));
        for (int v = 0; v < num_vertices_; ++v)
            cblock_[static_cast<std::size_t>(v)] = c.block_of(v + 1);
    }

    std::vector<Partition> run() {
        State init;
        init.parent.resize(static_cast<std::size_t>(num_vertices_));
        std::iota(init.parent.begin(), init.parent.end(), 0);
        init.size.assign(static_cast<std::size_t>(num_vertices_), 1);
        init.rep_succ = succ_;
        dfs(init, -1, -1);
        return {found_.begin(), found_.end()};
    }

private:
    struct State {
        std::vector<int> parent, size;
        std::vector<int> rep_succ;  // rep_succ[j * V + root]: a successor representative
    };

    std::size_t index(int j, int v) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(num_vertices_) +
               static_cast<std::size_t>(v);
    }

    static int find(State& st, int v) {
        while (st.parent[static_cast<std::size_t>(v)] != v) {
            st.parent[static_cast<std::size_t>(v)] =
                st.parent[static_cast<std::size_t>(st.parent[static_cast<std::size_t>(v)])];
            v = st.parent[static_cast<std::size_t>(v)];
        }
        return v;
    }

    /// Merge the classes of a and b plus everything forward closure forces.
    /// False when the merge is inconsistent.
    bool merge(State& st, int a, int b) const {
        std::vector<std::pair<int, int>> todo{{a, b}};
        while (!todo.empty()) {
            auto [x, y] = todo.back();
            todo.pop_back();
            int rx = find(st, x), ry = find(st, y);
            if (rx == ry) continue;
            if (cblock_[static_cast<std::size_t>(rx)] != cblock_[static_cast<std::size_t>(ry)])
                return false;
            if (st.size[static_cast<std::size_t>(rx)] + st.size[static_cast<std::size_t>(ry)] >
                block_size_)
                return false;
            if (st.size[static_cast<std::size_t>(rx)] < st.size[static_cast<std::size_t>(ry)])
                std::swap(rx, ry);
            st.parent[static_cast<std::size_t>(ry)] = rx;
            st.size[static_cast<std::size_t>(rx)] += st.size[static_cast<std::size_t>(ry)];
            for (int j = 0; j < num_graphs_; ++j)
                todo.emplace_back(st.rep_succ[index(j, rx)], st.rep_succ[index(j, ry)]);
        }
        return true;
    }

    void dfs(State& st, int branch_vertex, int min_partner) {
        int v = -1;
        for (int u = 0; u < num_vertices_; ++u)
            if (st.size[static_cast<std::size_t>(find(st, u))] < block_size_) {
                v = u;
                break;
            }
        if (v < 0) {
            emit(st);
            return;
        }
        if (v != branch_vertex) min_partner = -1;
        const int rv = find(st, v);
        // partner classes are reached through their vertices in ascending
        // order, and the vertex bound only grows while the same class keeps
        // filling, so a given block is assembled along one merge order
        // rather than all of them (any target stays reachable: the least
        // vertex still missing from it always lies above the bound)
        std::vector<char> tried(static_cast<std::size_t>(num_vertices_), 0);
        for (int u = min_partner + 1; u < num_vertices_; ++u) {
            const int ru = find(st, u);
            if (ru == rv || tried[static_cast<std::size_t>(ru)]) continue;
            tried[static_cast<std::size_t>(ru)] = 1;
            if (cblock_[static_cast<std::size_t>(ru)] != cblock_[static_cast<std::size_t>(rv)])
                continue;
            if (st.size[static_cast<std::size_t>(ru)] + st.size[static_cast<std::size_t>(rv)] >
                block_size_)
                continue;
            State child = st;
            if (merge(child, v, u)) dfs(child, v, u);
        }
    }

    void emit(State& st) {
        std::vector<int> labels(static_cast<std::size_t>(num_vertices_));
        for (int v = 0; v < num_vertices_; ++v)
            labels[static_cast<std::size_t>(v)] = find(st, v) + 1;
        found_.insert(Partition::from_labels(labels));
    }

    int num_vertices_, num_graphs_, block_size_;
    std::vector<int> succ_;
    std::vector<int> cblock_;
    std::set<Partition> found_;
};

}  // namespace detail

/// All equal partitions with block size 2^d that are forward-closed under
/// every input graph and output-uniform, in canonical order.  First mode
/// returns at most the canonically smallest one.  Empty result = no such
/// partition.
inline std::vector<Partition> search_congruent_partitions(const BCN& b, int d,
                                                          SearchMode mode = SearchMode::All) {
    if (d < 1)
        throw ValidationError("search order must be >= 1");
    if (d > b.n) return {};
    const Partition c = obs_partition(b);
    const int block_size = 1 << d;
    for (const auto& blk : c.blocks())
        if (static_cast<int>(blk.size()) % block_size != 0) return {};

    std::vector<Partition> all = detail::CongruenceSearch(blocks(b), c, block_size).run();
    if (mode == SearchMode::First && all.size() > 1) all.erase(all.begin() + 1, all.end());
    return all;
}

/// Q = delta_{2^s}[i_1,...,i_{2^n}] with i_q the canonical label (blocks
/// numbered 1..2^s by minimum element) of the block containing q.
inline LogicalMatrix q_from_partition(const Partition& s) {
    const std::size_t count = s.block_count();
    const std::size_t want = s.blocks().front().size();
    for (const auto& blk : s.blocks())
        if (blk.size() != want)
            throw ValidationError("q_from_partition: blocks have unequal sizes");
    if ((want & (want - 1)) != 0 || (count & (count - 1)) != 0)
        throw ValidationError("q_from_partition: block size and count must be powers of two");
    std::vector<int> delta(static_cast<std::size_t>(s.universe_size()));
    for (int v = 1; v <= s.universe_size(); ++v)
        delta[static_cast<std::size_t>(v - 1)] = s.block_of(v);
    return LogicalMatrix(static_cast<int>(count), std::move(delta));
}

/// A permutation T with (I_{2^s} (x) 1') T = Q: within each block, vertices
/// in ascending order receive consecutive z-indices.
inline LogicalMatrix t_from_q(const LogicalMatrix& q) {
    const int labels = q.rows();
    const int width = q.cols();
    if (width % labels != 0)
        throw ValidationError("t_from_q: label count must divide the width");
    const int per = width / labels;
    std::vector<int> counts(static_cast<std::size_t>(labels), 0);
    for (int v = 1; v <= width; ++v) counts[static_cast<std::size_t>(q.col(v) - 1)]++;
    for (int c : counts)
        if (c != per)
            throw ValidationError("t_from_q: unbalanced Q (labels must appear equally often)");
    std::vector<int> next(static_cast<std::size_t>(labels), 0);
    std::vector<int> delta(static_cast<std::size_t>(width));
    for (int v = 1; v <= width; ++v) {
        const int l = q.col(v);
        delta[static_cast<std::size_t>(v - 1)] = (l - 1) * per + ++next[static_cast<std::size_t>(l - 1)];
    }
    return LogicalMatrix(width, std::move(delta));
}

/// Where a verification failed: the class whose image under one transition
/// block (or under H) is not a single value.
struct VerifyFailure {
    std::string matrix;  // "L_<j>" or "H"
    int class_index = 0; // 1-based z[1] class
    int vertex_a = 0, vertex_b = 0;  // two states in the class ...
    int image_a = 0, image_b = 0;    // ... with different images

    std::string describe() const {
        return matrix + " maps class " + std::to_string(class_index) + " to two values (state " +
               std::to_string(vertex_a) + " -> " + std::to_string(image_a) + ", state " +
               std::to_string(vertex_b) + " -> " + std::to_string(image_b) + ")";
    }
};

struct VerifyReport {
    bool ok = false;
    std::vector<VerifyFailure> failures;

    explicit operator bool() const { return ok; }
};

namespace detail {

struct QuotientData {
    LogicalMatrix q;
    std::vector<LogicalMatrix> g1;
    LogicalMatrix m_out;
};

/// Shared core of verify/extract: Q from T, then each quotient
/// Q L_j Q' / 2^(n-s) and H Q' / 2^(n-s) is logical iff every class maps to
/// a single value; collect delta forms or failures.
struct QuotientOutcome {
    VerifyReport report;
    std::optional<QuotientData> data;
};

inline QuotientOutcome try_quotients(const BCN& b, const LogicalMatrix& t, int s) {
    if (s < 0 || s > b.n)
        throw ValidationError("retained coordinate count must be between 0 and n");
    if (t.rows() != b.num_states() || !t.is_permutation())
        throw ValidationError("T must be a 2^n x 2^n permutation");

    const int per = 1 << (b.n - s);   // block size 2^(n-s)
    const int labels = 1 << s;
    std::vector<int> iq(static_cast<std::size_t>(b.num_states()));
    for (int v = 1; v <= b.num_states(); ++v)
        iq[static_cast<std::size_t>(v - 1)] = (t.col(v) - 1) / per + 1;

    std::vector<std::vector<int>> classes(static_cast<std::size_t>(labels));
    for (int v = 1; v <= b.num_states(); ++v)
        classes[static_cast<std::size_t>(iq[static_cast<std::size_t>(v - 1)] - 1)].push_back(v);

    QuotientOutcome out;
    const std::vector<LogicalMatrix> ljs = blocks(b);
    std::vector<std::vector<int>> g1_delta(ljs.size(),
                                           std::vector<int>(static_cast<std::size_t>(labels)));
    std::vector<int> m_delta(static_cast<std::size_t>(labels));
    for (int l = 1; l <= labels; ++l) {
        const auto& cls = classes[static_cast<std::size_t>(l - 1)];
        for (std::size_t j = 0; j < ljs.size(); ++j) {
            const int first = iq[static_cast<std::size_t>(ljs[j].col(cls.front()) - 1)];
            g1_delta[j][static_cast<std::size_t>(l - 1)] = first;
            for (int v : cls) {
                const int img = iq[static_cast<std::size_t>(ljs[j].col(v) - 1)];
                if (img != first) {
                    out.report.failures.push_back({"L_" + std::to_string(j + 1), l, cls.front(), v,
                                                   first, img});
                    break;
                }
            }
        }
        const int color = b.H.col(cls.front());
        m_delta[static_cast<std::size_t>(l - 1)] = color;
        for (int v : cls) {
            if (b.H.col(v) != color) {
                out.report.failures.push_back({"H", l, cls.front(), v, color, b.H.col(v)});
                break;
            }
        }
    }
    if (!out.report.failures.empty()) return out;

    out.report.ok = true;
    QuotientData data{LogicalMatrix(labels, std::move(iq)), {}, LogicalMatrix(b.num_outputs(),
                                                                              std::move(m_delta))};
    for (auto& d : g1_delta) data.g1.emplace_back(labels, std::move(d));
    out.data = std::move(data);
    return out;
}

}  // namespace detail

/// Check that T realizes a decomposition of order n-s: with
/// Q = (I_{2^s} (x) 1') T, every Q L_j Q' / 2^(n-s) and H Q' / 2^(n-s) must
/// be logical.  On success the exact identities Q L_j = G1_j Q and H = M Q
/// are re-asserted.
inline VerifyReport verify_decomposition(const BCN& b, const LogicalMatrix& t, int s) {
    detail::QuotientOutcome out = detail::try_quotients(b, t, s);
    if (!out.report.ok) return out.report;
    // exact recheck of the defining identities
    const detail::QuotientData& d = *out.data;
    const std::vector<LogicalMatrix> ljs = blocks(b);
    for (std::size_t j = 0; j < ljs.size(); ++j)
        for (int v = 1; v <= b.num_states(); ++v)
            if (d.q.col(ljs[j].col(v)) != d.g1[j].col(d.q.col(v)))
                throw InternalError("verify_decomposition: Q L_j = G1_j Q failed after quotient check");
    for (int v = 1; v <= b.num_states(); ++v)
        if (b.H.col(v) != d.m_out.col(d.q.col(v)))
            throw InternalError("verify_decomposition: H = M Q failed after quotient check");
    return out.report;
}

/// The decomposed matrices for a verified (T, s): G1 blocks and M by exact
/// quotient, G2 = (1' (x) I) T L (I (x) T').  Throws when a quotient is not
/// logical (invalid T/s pair).
inline DecomposedBCN extract_subsystems(const BCN& b, const LogicalMatrix& t, int s) {
    detail::QuotientOutcome out = detail::try_quotients(b, t, s);
    if (!out.report.ok)
        throw ValidationError("extract_subsystems: quotient not logical (" +
                              out.report.failures.front().describe() + ")");
    const BCN moved = transform(b, t);
    const int per = 1 << (b.n - s);
    std::vector<int> g2_delta(moved.L.delta().size());
    for (std::size_t c = 0; c < g2_delta.size(); ++c)
        g2_delta[c] = (moved.L.delta()[c] - 1) % per + 1;
    return DecomposedBCN{s, std::move(out.data->g1), LogicalMatrix(per, std::move(g2_delta)),
                         std::move(out.data->m_out)};
}

/// Maximum decomposition: try orders from the parity bound downward and
/// stop at the first order with a qualifying partition.  Order 0 means
/// undecomposable; the result then carries no partition or matrices.
inline DecompositionResult max_decomposition(const BCN& b) {
    DecompositionResult res;
    const Partition c = obs_partition(b);
    for (int d = std::min(max_feasible_order(c), b.n); d >= 1; --d) {
        std::vector<Partition> all = search_congruent_partitions(b, d, SearchMode::All);
        if (all.empty()) continue;
        res.order = d;
        res.partition = all.front();
        res.q = q_from_partition(all.front());
        res.t = t_from_q(*res.q);
        res.decomposed = extract_subsystems(b, *res.t, b.n - d);
        res.all_partitions = std::move(all);
        if (!verify_decomposition(b, *res.t, b.n - d))
            throw InternalError("max_decomposition: constructed T failed verification");
        return res;
    }
    return res;
}

enum class RegularityVerdict { NotRegular, Inconclusive };

/// Comparison of two decomposition transformations of the same order:
/// R = (1' (x) I) T T2' (1 (x) I) / 2^s relates the two tail coordinates.
/// A non-logical R certifies that no single logical function family can
/// express each tail in terms of the other (the verdict is one-directional;
/// a logical R proves nothing).
struct RegularityReport {
    RationalMatrix r;
    bool r_is_logical = false;
    RegularityVerdict verdict = RegularityVerdict::Inconclusive;
};

inline RegularityReport regularity_test(const LogicalMatrix& t, const LogicalMatrix& t2, int s) {
    if (!t.is_permutation() || !t2.is_permutation() || t.rows() != t2.rows())
        throw ValidationError("regularity_test: need two permutations of equal size");
    int n = 0;
    while ((1 << n) < t.rows()) ++n;
    if ((1 << n) != t.rows())
        throw ValidationError("regularity_test: size must be a power of two");
    if (s < 0 || s > n)
        throw ValidationError("regularity_test: s out of range");
    if (2 * (n - s) > 26)
        throw ValidationError("regularity_test: tail too large to materialize R");

    const int per = 1 << (n - s);
    RationalMatrix r(per, per, std::int64_t{1} << s);
    for (int x = 1; x <= t.rows(); ++x) {
        const int a = (t.col(x) - 1) % per + 1;
        const int bb = (t2.col(x) - 1) % per + 1;
        r.at(a, bb) += 1;
    }
    RegularityReport rep{std::move(r), false, RegularityVerdict::NotRegular};
    rep.r_is_logical = is_logical(rep.r);
    rep.verdict = rep.r_is_logical ? RegularityVerdict::Inconclusive : RegularityVerdict::NotRegular;
    return rep;
}

}  // namespace bcn
