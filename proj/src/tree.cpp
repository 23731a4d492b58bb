#include "cone/tree.hpp"

#include "cone/errors.hpp"

#include <algorithm>
#include <string>

namespace cone {

TreeSpec::TreeSpec(std::vector<int> parent) : parent_(std::move(parent)) {
    const int n = static_cast<int>(parent_.size());
    if (n == 0) fail(ErrorCode::domain, "tree must have at least one node");
    for (int i = 0; i < n; ++i) {
        int& p = parent_[i];
        if (p == i) p = -1;
        if (p < -1 || p >= n)
            fail(ErrorCode::domain, "node " + std::to_string(i) + " has invalid parent " + std::to_string(p));
        if (p == -1) {
            if (root_ != -1)
                fail(ErrorCode::domain, "tree has two roots (" + std::to_string(root_) + " and " +
                                            std::to_string(i) + ")");
            root_ = i;
        }
    }
    if (root_ == -1) fail(ErrorCode::domain, "tree has no root");

    children_.assign(n, {});
    for (int i = 0; i < n; ++i)
        if (parent_[i] != -1) children_[parent_[i]].push_back(i);

    // Breadth-first from the root; nodes never reached sit on a cycle.
    depth_.assign(n, -1);
    depth_[root_] = 0;
    std::vector<int> queue{root_};
    for (std::size_t k = 0; k < queue.size(); ++k)
        for (int c : children_[queue[k]]) {
            depth_[c] = depth_[queue[k]] + 1;
            queue.push_back(c);
        }
    for (int i = 0; i < n; ++i)
        if (depth_[i] < 0) fail(ErrorCode::domain, "node " + std::to_string(i) + " is on a parent cycle");
}

std::size_t TreeSpec::check(int node) const {
    if (node < 0 || static_cast<std::size_t>(node) >= parent_.size())
        fail(ErrorCode::domain, "node id " + std::to_string(node) + " out of range");
    return static_cast<std::size_t>(node);
}

std::vector<int> TreeSpec::leaves() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(size()); ++i)
        if (children_[i].empty()) out.push_back(i);
    return out;
}

int TreeSpec::max_depth() const noexcept { return *std::max_element(depth_.begin(), depth_.end()); }

}  // namespace cone
