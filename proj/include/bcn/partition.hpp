#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bcn/errors.hpp"
#include "bcn/logical_matrix.hpp"

// The partition lattice over the vertex set {1..N}.  Partitions are kept
// in canonical form: blocks sorted by minimum element, elements within a
// block ascending.  This makes equality, ordering and reports well-defined.

namespace bcn {

class Partition {
public:
    Partition(int universe_size, std::vector<std::vector<int>> blocks)
        : universe_(universe_size), blocks_(std::move(blocks)) {
        if (universe_ < 1)
            throw ValidationError("partition universe must be nonempty");
        std::vector<char> seen(static_cast<std::size_t>(universe_) + 1, 0);
        int covered = 0;
        for (auto& blk : blocks_) {
            if (blk.empty())
                throw ValidationError("partition blocks must be nonempty");
            std::sort(blk.begin(), blk.end());
            for (int v : blk) {
                if (v < 1 || v > universe_)
                    throw ValidationError("vertex " + std::to_string(v) + " out of range 1.." +
                                          std::to_string(universe_));
                if (seen[static_cast<std::size_t>(v)])
                    throw ValidationError("vertex " + std::to_string(v) +
                                          " appears in two blocks");
                seen[static_cast<std::size_t>(v)] = 1;
                ++covered;
            }
        }
        if (covered != universe_)
            throw ValidationError("partition does not cover the universe");
        std::sort(blocks_.begin(), blocks_.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        block_of_.assign(static_cast<std::size_t>(universe_) + 1, 0);
        for (std::size_t l = 0; l < blocks_.size(); ++l)
            for (int v : blocks_[l]) block_of_[static_cast<std::size_t>(v)] = static_cast<int>(l) + 1;
    }

    static Partition singletons(int n) {
        std::vector<std::vector<int>> blocks;
        blocks.reserve(static_cast<std::size_t>(n));
        for (int v = 1; v <= n; ++v) blocks.push_back({v});
        return Partition(n, std::move(blocks));
    }

    /// Group vertices by an arbitrary label; labels[v-1] belongs to vertex v.
    static Partition from_labels(const std::vector<int>& labels) {
        std::map<int, std::vector<int>> groups;
        for (std::size_t v = 0; v < labels.size(); ++v)
            groups[labels[v]].push_back(static_cast<int>(v) + 1);
        std::vector<std::vector<int>> blocks;
        blocks.reserve(groups.size());
        for (auto& [label, blk] : groups) blocks.push_back(std::move(blk));
        return Partition(static_cast<int>(labels.size()), std::move(blocks));
    }

    int universe_size() const { return universe_; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }
    std::size_t block_count() const { return blocks_.size(); }

    /// 1-based index (in canonical order) of the block containing vertex v.
    int block_of(int v) const {
        if (v < 1 || v > universe_)
            throw ValidationError("vertex " + std::to_string(v) + " out of range");
        return block_of_[static_cast<std::size_t>(v)];
    }

    friend bool operator==(const Partition& a, const Partition& b) {
        return a.universe_ == b.universe_ && a.blocks_ == b.blocks_;
    }

    /// Lexicographic order on the canonical block list.
    friend bool operator<(const Partition& a, const Partition& b) {
        return a.blocks_ < b.blocks_;
    }

    std::string to_string() const {
        std::string out = "{";
        for (std::size_t l = 0; l < blocks_.size(); ++l) {
            out += l ? ",{" : "{";
            for (std::size_t i = 0; i < blocks_[l].size(); ++i) {
                if (i) out += ",";
                out += std::to_string(blocks_[l][i]);
            }
            out += "}";
        }
        return out + "}";
    }

private:
    int universe_;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_of_;
};

/// True iff every block of u is contained in some block of v.
inline bool refines(const Partition& u, const Partition& v) {
    if (u.universe_size() != v.universe_size())
        throw ValidationError("refines: partitions have different universes");
    for (const auto& blk : u.blocks()) {
        const int target = v.block_of(blk.front());
        for (int x : blk)
            if (v.block_of(x) != target) return false;
    }
    return true;
}

/// Greatest common refinement of two partitions: the nonempty pairwise
/// intersections of their blocks.
inline Partition meet(const Partition& u, const Partition& v) {
    if (u.universe_size() != v.universe_size())
        throw ValidationError("meet: partitions have different universes");
    std::vector<int> labels(static_cast<std::size_t>(u.universe_size()));
    std::map<std::pair<int, int>, int> ids;
    for (int x = 1; x <= u.universe_size(); ++x) {
        const std::pair<int, int> key{u.block_of(x), v.block_of(x)};
        auto [it, fresh] = ids.emplace(key, static_cast<int>(ids.size()) + 1);
        (void)fresh;
        labels[static_cast<std::size_t>(x - 1)] = it->second;
    }
    return Partition::from_labels(labels);
}

/// Left fold of meet over a nonempty sequence.
inline Partition gcr(std::span<const Partition> parts) {
    if (parts.empty())
        throw ValidationError("gcr of an empty sequence");
    Partition acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = meet(acc, parts[i]);
    return acc;
}

/// Vertex colors: two vertices share a color iff their H-columns are equal.
/// Color ids are assigned by first occurrence, starting at 1.
struct Coloring {
    int universe_size = 0;
    std::vector<int> color_of;  // color_of[v-1]

    int color(int v) const { return color_of[static_cast<std::size_t>(v - 1)]; }
};

inline Coloring color_classes(const LogicalMatrix& h) {
    Coloring c;
    c.universe_size = h.cols();
    c.color_of.resize(static_cast<std::size_t>(h.cols()));
    std::map<int, int> ids;  // H column value -> color id
    for (int v = 1; v <= h.cols(); ++v) {
        auto [it, fresh] = ids.emplace(h.col(v), static_cast<int>(ids.size()) + 1);
        (void)fresh;
        c.color_of[static_cast<std::size_t>(v - 1)] = it->second;
    }
    return c;
}

/// Successor set of S in the graph whose adjacency matrix is the square
/// logical matrix lj: column q of lj is the one successor of vertex q.
inline std::vector<int> out_neighborhood(const LogicalMatrix& lj, const std::vector<int>& s) {
    if (!lj.is_square())
        throw ValidationError("out_neighborhood: transition matrix must be square");
    std::vector<int> out;
    out.reserve(s.size());
    for (int q : s) {
        if (q < 1 || q > lj.cols())
            throw ValidationError("vertex " + std::to_string(q) + " out of range");
        out.push_back(lj.col(q));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Result of the congruent-partition check, with a structured reason when
/// a clause fails so callers can render actionable diagnostics.
struct CongruenceCheck {
    enum class Violation { None, UnequalBlockSizes, ForwardClosure, MixedColors };

    bool ok = false;
    Violation violation = Violation::None;
    int block_index = 0;            // 1-based offending block
    int graph_index = 0;            // 1-based input graph (ForwardClosure)
    std::vector<int> witnesses;     // offending vertices

    explicit operator bool() const { return ok; }

    std::string describe() const {
        switch (violation) {
            case Violation::None:
                return "partition is an equal-size, forward-closed, output-uniform partition";
            case Violation::UnequalBlockSizes:
                return "block " + std::to_string(block_index) + " has the wrong size";
            case Violation::ForwardClosure: {
                std::string s = "block " + std::to_string(block_index) + " maps into two blocks under input " +
                                std::to_string(graph_index) + " (successors";
                for (int w : witnesses) s += " " + std::to_string(w);
                return s + ")";
            }
            case Violation::MixedColors: {
                std::string s = "block " + std::to_string(block_index) + " mixes output values (vertices";
                for (int w : witnesses) s += " " + std::to_string(w);
                return s + ")";
            }
        }
        return "";
    }
};

/// Check that s is (a) an equal vertex partition, (b) forward-closed: the
/// successor set of every block lies inside a single block, for every
/// input's transition graph, and (c) output-uniform: each block's vertices
/// share one H-column.
inline CongruenceCheck is_output_congruent_partition(const Partition& s,
                                                     std::span<const LogicalMatrix> ljs,
                                                     const LogicalMatrix& h) {
    const int universe = s.universe_size();
    if (h.cols() != universe)
        throw ValidationError("output matrix width does not match the partition universe");
    for (const auto& lj : ljs)
        if (!lj.is_square() || lj.cols() != universe)
            throw ValidationError("transition blocks must be square over the partition universe");

    CongruenceCheck r;
    const std::size_t want = s.blocks().front().size();
    for (std::size_t l = 0; l < s.block_count(); ++l) {
        if (s.blocks()[l].size() != want) {
            r.violation = CongruenceCheck::Violation::UnequalBlockSizes;
            r.block_index = static_cast<int>(l) + 1;
            return r;
        }
    }
    for (std::size_t l = 0; l < s.block_count(); ++l) {
        const auto& blk = s.blocks()[l];
        for (std::size_t j = 0; j < ljs.size(); ++j) {
            const int target = s.block_of(ljs[j].col(blk.front()));
            for (int q : blk) {
                const int succ = ljs[j].col(q);
                if (s.block_of(succ) != target) {
                    r.violation = CongruenceCheck::Violation::ForwardClosure;
                    r.block_index = static_cast<int>(l) + 1;
                    r.graph_index = static_cast<int>(j) + 1;
                    r.witnesses = {ljs[j].col(blk.front()), succ};
                    return r;
                }
            }
        }
        const int color = h.col(blk.front());
        for (int q : blk) {
            if (h.col(q) != color) {
                r.violation = CongruenceCheck::Violation::MixedColors;
                r.block_index = static_cast<int>(l) + 1;
                r.witnesses = {blk.front(), q};
                return r;
            }
        }
    }
    r.ok = true;
    return r;
}

}  // namespace bcn
