#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace linkrank {

/// External id as found in input files paired with the dense index the
/// engine uses internally. The mapping is a bijection and stable for the
/// lifetime of one LinkGraph snapshot.
struct NodeId {
    std::uint64_t external = 0;
    std::uint32_t internal = 0;
};

/// Directed edge in external-id space.
using ExtEdge = std::pair<std::uint64_t, std::uint64_t>;

/// Immutable sparse directed graph snapshot.
///
/// Stores forward and reverse adjacency in CSR form with sorted rows.
/// Duplicate edges collapse to one link; self-loops are permitted.
/// A node is dangling iff it has no out-links; dangling rows get no
/// patching anywhere in this library.
class LinkGraph {
public:
    LinkGraph() = default;

    /// Builds a snapshot from edges plus nodes that must exist even when
    /// they carry no edge (isolated nodes from a node manifest).
    static LinkGraph build(std::vector<ExtEdge> edges,
                           std::span<const std::uint64_t> isolated_nodes = {});

    std::uint32_t node_count() const { return n_; }
    std::size_t edge_count() const { return fwd_targets_.size(); }

    std::span<const std::uint32_t> successors(std::uint32_t i) const {
        return {fwd_targets_.data() + fwd_offsets_[i], fwd_targets_.data() + fwd_offsets_[i + 1]};
    }
    std::span<const std::uint32_t> predecessors(std::uint32_t i) const {
        return {rev_sources_.data() + rev_offsets_[i], rev_sources_.data() + rev_offsets_[i + 1]};
    }
    std::uint32_t out_degree(std::uint32_t i) const {
        return fwd_offsets_[i + 1] - fwd_offsets_[i];
    }
    std::uint32_t in_degree(std::uint32_t i) const {
        return rev_offsets_[i + 1] - rev_offsets_[i];
    }
    bool is_dangling(std::uint32_t i) const { return dangling_mask_[i] != 0; }
    const std::vector<std::uint8_t>& dangling_mask() const { return dangling_mask_; }

    bool has_edge(std::uint32_t src, std::uint32_t dst) const;

    std::uint64_t external_id(std::uint32_t i) const { return external_ids_[i]; }
    std::optional<std::uint32_t> internal_index(std::uint64_t external) const;
    const std::vector<std::uint64_t>& external_ids() const { return external_ids_; }

    /// All edges in external-id space, ascending by (src, dst).
    std::vector<ExtEdge> external_edges() const;

    /// CSR slot of edge (src,dst) in the forward arrays, if present.
    std::optional<std::size_t> forward_slot(std::uint32_t src, std::uint32_t dst) const;

    std::span<const std::uint32_t> forward_offsets() const { return fwd_offsets_; }
    std::span<const std::uint32_t> forward_targets() const { return fwd_targets_; }
    std::span<const std::uint32_t> reverse_offsets() const { return rev_offsets_; }
    std::span<const std::uint32_t> reverse_sources() const { return rev_sources_; }

private:
    std::uint32_t n_ = 0;
    std::vector<std::uint32_t> fwd_offsets_{0};
    std::vector<std::uint32_t> fwd_targets_;
    std::vector<std::uint32_t> rev_offsets_{0};
    std::vector<std::uint32_t> rev_sources_;
    std::vector<std::uint8_t> dangling_mask_;
    std::vector<std::uint64_t> external_ids_;
    std::unordered_map<std::uint64_t, std::uint32_t> external_to_internal_;
};

/// Edit script between two snapshots, in external-id space.
///
/// removed_edges must be edges of the base graph and added_edges must not
/// collide with it. Every edge incident to a removed node has to be listed
/// in removed_edges so deltas stay self-describing.
struct GraphDelta {
    std::vector<std::uint64_t> added_nodes;
    std::vector<std::uint64_t> removed_nodes;
    std::vector<ExtEdge> added_edges;
    std::vector<ExtEdge> removed_edges;

    bool empty() const {
        return added_nodes.empty() && removed_nodes.empty() && added_edges.empty() &&
               removed_edges.empty();
    }
};

/// Swaps the add/remove sides so applying d then inverse(d) restores the
/// original node and edge sets.
GraphDelta inverse(const GraphDelta& d);

/// Parses an edge-list file: one "src dst" pair per line, '#' comments and
/// blank lines ignored. Throws ParseError with the offending line number,
/// or ValidationError for an empty graph. An optional manifest file with
/// one external id per line declares nodes that have no edges.
LinkGraph load_graph(const std::filesystem::path& edge_path,
                     const std::optional<std::filesystem::path>& node_manifest = std::nullopt);

/// Writes the canonical edge list (ascending by src, dst). Isolated nodes
/// go to manifest_path when given; without it they would be lost, so the
/// call throws ValidationError if isolated nodes exist and no manifest
/// path is supplied.
void save_graph(const LinkGraph& g, const std::filesystem::path& edge_path,
                const std::optional<std::filesystem::path>& manifest_path = std::nullopt);

/// Verifies that reverse adjacency is exactly the transpose of forward
/// adjacency. Construction guarantees this; the check exists as a
/// corruption probe and for raw CSR arrays from elsewhere.
bool transpose_check(const LinkGraph& g);
bool transpose_check(std::uint32_t n, std::span<const std::uint32_t> fwd_offsets,
                     std::span<const std::uint32_t> fwd_targets,
                     std::span<const std::uint32_t> rev_offsets,
                     std::span<const std::uint32_t> rev_sources);

/// Validates d against g and materializes a new snapshot. External ids
/// survive; internal indices may be reassigned. ValidationError lists the
/// offending nodes/edges.
LinkGraph apply_delta(const LinkGraph& g, const GraphDelta& d);

/// Partition of internal indices into weakly connected components
/// (direction-blind connectivity). component_of[i] identifies the class;
/// classes are numbered 0..count-1 by smallest member.
struct ComponentPartition {
    std::vector<std::uint32_t> component_of;
    std::uint32_t count = 0;
};
ComponentPartition weakly_connected_components(const LinkGraph& g);

/// Writes "external_id,internal_index" CSV.
void save_id_map(const LinkGraph& g, const std::filesystem::path& path);

} // namespace linkrank
