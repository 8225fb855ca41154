#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "nbg/multigraph.hpp"

namespace nbg {

/// Non-backtracking operator of a multigraph, stored as a sparse 0/1 matrix
/// in CSR form over the 2|E| sides. Row s lists the sides t with
/// tail(t) = head(s) and t != rev(s): the walks extending s by one step
/// without immediate reversal. row(s) is ascending by side index.
struct NBOperator {
    std::vector<std::uint64_t> offset;  // size sides+1
    std::vector<SideId> target;        // concatenated rows

    std::uint64_t dimension() const noexcept {
        return offset.empty() ? 0 : offset.size() - 1;
    }

    std::span<const SideId> row(SideId s) const {
        return {target.data() + offset[s], offset[s + 1] - offset[s]};
    }
};

inline NBOperator nb_operator(const Multigraph& g) {
    NBOperator op;
    const SideId n = g.side_count();
    op.offset.assign(n + 1, 0);
    for (SideId s = 0; s < n; ++s) {
        VertexId v = g.head(s);
        std::uint64_t out = g.degree(v);
        // rev(s) leaves v, so it always sits in sides(v); drop it.
        op.offset[s + 1] = out - 1;
    }
    for (SideId s = 0; s < n; ++s) op.offset[s + 1] += op.offset[s];
    op.target.resize(op.offset[n]);
    std::uint64_t pos = 0;
    for (SideId s = 0; s < n; ++s) {
        const SideId back = Multigraph::rev(s);
        for (SideId t : g.sides(g.head(s)))
            if (t != back) op.target[pos++] = t;
    }
    return op;
}

/// True iff the operator's directed graph on sides is strongly connected
/// (equivalently, the matrix is irreducible). Iterative Tarjan SCC.
inline bool is_nb_strongly_connected(const NBOperator& op) {
    const std::uint64_t n = op.dimension();
    if (n == 0) return false;
    constexpr std::uint32_t kUnset = 0xFFFFFFFFu;
    std::vector<std::uint32_t> index(n, kUnset), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<SideId> stack;
    std::uint32_t next_index = 0;
    std::size_t scc_count = 0;

    struct Frame {
        SideId node;
        std::uint64_t child;
    };
    std::vector<Frame> call;
    for (SideId root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        call.push_back({root, op.offset[root]});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& frame = call.back();
            if (frame.child < op.offset[frame.node + 1]) {
                SideId w = op.target[frame.child++];
                if (index[w] == kUnset) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, op.offset[w]});
                } else if (on_stack[w]) {
                    low[frame.node] = std::min(low[frame.node], index[w]);
                }
            } else {
                SideId v = frame.node;
                call.pop_back();
                if (!call.empty())
                    low[call.back().node] = std::min(low[call.back().node], low[v]);
                if (low[v] == index[v]) {
                    ++scc_count;
                    if (scc_count > 1) return false;
                    SideId w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                    } while (w != v);
                }
            }
        }
    }
    return scc_count == 1;
}

}  // namespace nbg
