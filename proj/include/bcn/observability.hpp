#pragma once

#include <cassert>
#include <cstddef>
#include <map>
#include <vector>

#include "bcn/model.hpp"
#include "bcn/partition.hpp"

// The observability matrix of a network: the closure of {H} under right
// multiplication by every transition block, one row-vector per distinct
// product H L_{j1} ... L_{jr}.  Two states are indistinguishable exactly
// when their columns in this matrix agree.

namespace bcn {

/// One closure row: the delta vector of H L_{j1}...L_{jr}, together with a
/// shortest input word producing it (empty word = H itself).
struct ObsRow {
    std::vector<int> word;
    std::vector<int> row;
};

struct ObservabilityMatrix {
    int width = 0;          // 2^n
    int row_range = 0;      // 2^p (entries of each row lie in 1..2^p)
    std::vector<ObsRow> rows;  // empty word first, then by (length, lex word)
    int closure_depth = 0;  // longest shortest-witness word length
};

namespace detail {

/// Closure rows, abandoning the walk once more than max_rows rows exist
/// (the count is finite but can be astronomically large on adversarial
/// random systems).  Returns true when the closure completed.
inline bool obs_rows_capped(const BCN& b, std::size_t max_rows, ObservabilityMatrix& o) {
    const std::vector<LogicalMatrix> ljs = blocks(b);
    o.width = b.num_states();
    o.row_range = b.num_outputs();
    o.rows.clear();
    o.closure_depth = 0;

    std::map<std::vector<int>, int> seen;
    o.rows.push_back({{}, b.H.delta()});
    seen.emplace(b.H.delta(), 0);
    for (std::size_t head = 0; head < o.rows.size(); ++head) {
        // o.rows may reallocate while we append; index, don't hold references
        for (int j = 1; j <= b.num_inputs(); ++j) {
            const std::vector<int>& cur = o.rows[head].row;
            std::vector<int> next(cur.size());
            for (int q = 1; q <= o.width; ++q)
                next[static_cast<std::size_t>(q - 1)] =
                    cur[static_cast<std::size_t>(ljs[static_cast<std::size_t>(j - 1)].col(q) - 1)];
            if (seen.emplace(next, static_cast<int>(o.rows.size())).second) {
                if (o.rows.size() >= max_rows) return false;
                std::vector<int> word = o.rows[head].word;
                word.push_back(j);
                o.closure_depth = std::max(o.closure_depth, static_cast<int>(word.size()));
                o.rows.push_back({std::move(word), std::move(next)});
            }
        }
    }
    return true;
}

}  // namespace detail

/// Breadth-first closure: start from {H}; repeatedly append row * L_j for
/// every stored row and input j, deduplicating by value.  Terminates since
/// there are finitely many row vectors; BFS order makes each stored word a
/// shortest witness and the output deterministic.
inline ObservabilityMatrix obs_rows(const BCN& b) {
    ObservabilityMatrix o;
    detail::obs_rows_capped(b, static_cast<std::size_t>(-1), o);
    return o;
}

/// The indistinguishability partition: classes of equal columns of the
/// observability matrix, i.e. states that produce the same output under
/// every input word.  Computed as the coarsest refinement of the H-column
/// classes that is a congruence for every transition block, which avoids
/// materializing the row closure; the row route (equal columns, and the
/// greatest common refinement of the per-row partitions) is cross-checked
/// in debug builds while the closure stays small.
inline Partition obs_partition(const BCN& b) {
    const std::vector<LogicalMatrix> ljs = blocks(b);
    const int n = b.num_states();

    std::vector<int> cls(static_cast<std::size_t>(n));
    {
        std::map<int, int> ids;
        for (int v = 1; v <= n; ++v) {
            auto [it, fresh] = ids.emplace(b.H.col(v), static_cast<int>(ids.size()) + 1);
            (void)fresh;
            cls[static_cast<std::size_t>(v - 1)] = it->second;
        }
    }
    std::size_t classes = 0;
    for (int v = 1; v <= n; ++v) classes = std::max(classes, static_cast<std::size_t>(cls[static_cast<std::size_t>(v - 1)]));
    while (true) {
        std::map<std::vector<int>, int> ids;
        std::vector<int> refined(static_cast<std::size_t>(n));
        std::vector<int> sig(ljs.size() + 1);
        for (int v = 1; v <= n; ++v) {
            sig[0] = cls[static_cast<std::size_t>(v - 1)];
            for (std::size_t j = 0; j < ljs.size(); ++j)
                sig[j + 1] = cls[static_cast<std::size_t>(ljs[j].col(v) - 1)];
            auto [it, fresh] = ids.emplace(sig, static_cast<int>(ids.size()) + 1);
            (void)fresh;
            refined[static_cast<std::size_t>(v - 1)] = it->second;
        }
        if (ids.size() == classes) break;
        classes = ids.size();
        cls = std::move(refined);
    }
    Partition result = Partition::from_labels(cls);
#ifndef NDEBUG
    {
        ObservabilityMatrix o;
        if (detail::obs_rows_capped(b, 4096, o)) {
            std::map<std::vector<int>, int> ids;
            std::vector<int> labels(static_cast<std::size_t>(o.width));
            std::vector<int> column(o.rows.size());
            for (int q = 1; q <= o.width; ++q) {
                for (std::size_t r = 0; r < o.rows.size(); ++r)
                    column[r] = o.rows[r].row[static_cast<std::size_t>(q - 1)];
                auto [it, fresh] = ids.emplace(column, static_cast<int>(ids.size()) + 1);
                (void)fresh;
                labels[static_cast<std::size_t>(q - 1)] = it->second;
            }
            assert(Partition::from_labels(labels) == result);
            std::vector<Partition> per_row;
            per_row.reserve(o.rows.size());
            for (const auto& r : o.rows) per_row.push_back(Partition::from_labels(r.row));
            assert(gcr(per_row) == result);
        }
    }
#endif
    return result;
}

/// True iff every indistinguishability class is a singleton, i.e. all
/// columns of the observability matrix are distinct.  This characterizes
/// observability only under global controllability, which is not checked
/// here; the predicate is the column test alone.
inline bool is_observable_columns(const BCN& b) {
    const Partition c = obs_partition(b);
    return c.block_count() == static_cast<std::size_t>(c.universe_size());
}

/// An odd-size indistinguishability class rules out any decomposition of
/// order >= 1: blocks of size 2^d must tile every class.
inline bool undecomposable_by_parity(const Partition& c) {
    for (const auto& blk : c.blocks())
        if (blk.size() % 2 == 1) return true;
    return false;
}

}  // namespace bcn
