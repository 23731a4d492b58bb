#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cone {

/// Rooted tree stored as a parent array. The root's parent is -1 (a
/// self-parented root is accepted and normalized to -1).
class TreeSpec {
public:
    explicit TreeSpec(std::vector<int> parent);

    std::size_t size() const noexcept { return parent_.size(); }
    int root() const noexcept { return root_; }
    int parent(int node) const { return parent_.at(check(node)); }
    int depth(int node) const { return depth_.at(check(node)); }
    std::span<const int> children(int node) const { return children_.at(check(node)); }
    bool is_leaf(int node) const { return children(node).empty(); }
    const std::vector<int>& parents() const noexcept { return parent_; }

    /// Leaves in increasing id order.
    std::vector<int> leaves() const;
    int max_depth() const noexcept;

private:
    std::size_t check(int node) const;

    std::vector<int> parent_;
    std::vector<int> depth_;
    std::vector<std::vector<int>> children_;
    int root_ = -1;
};

}  // namespace cone
