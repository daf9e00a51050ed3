#include "linkrank/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>

#include "linkrank/errors.hpp"

namespace linkrank {

namespace {

// Disjoint-set forest with path halving.
class UnionFind {
public:
    explicit UnionFind(std::uint32_t n) : parent_(n) {
        for (std::uint32_t i = 0; i < n; ++i) parent_[i] = i;
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::uint32_t> parent_;
};

std::vector<std::string> format_edge_list(std::span<const ExtEdge> edges, std::size_t limit = 8) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < edges.size() && i < limit; ++i)
        out.push_back("(" + std::to_string(edges[i].first) + "," +
                      std::to_string(edges[i].second) + ")");
    if (edges.size() > limit) out.push_back("...");
    return out;
}

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += " ";
        s += parts[i];
    }
    return s;
}

} // namespace

LinkGraph LinkGraph::build(std::vector<ExtEdge> edges,
                           std::span<const std::uint64_t> isolated_nodes) {
    LinkGraph g;

    std::vector<std::uint64_t> ids;
    ids.reserve(edges.size() * 2 + isolated_nodes.size());
    for (const auto& [s, d] : edges) {
        ids.push_back(s);
        ids.push_back(d);
    }
    ids.insert(ids.end(), isolated_nodes.begin(), isolated_nodes.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    if (ids.size() > static_cast<std::size_t>(std::numeric_limits<std::uint32_t>::max()))
        throw ValidationError("graph exceeds 2^32-1 nodes");

    g.n_ = static_cast<std::uint32_t>(ids.size());
    g.external_ids_ = std::move(ids);
    g.external_to_internal_.reserve(g.n_);
    for (std::uint32_t i = 0; i < g.n_; ++i) g.external_to_internal_[g.external_ids_[i]] = i;

    // Dedup in internal index space, sorted per row.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> internal_edges;
    internal_edges.reserve(edges.size());
    for (const auto& [s, d] : edges)
        internal_edges.emplace_back(g.external_to_internal_.at(s), g.external_to_internal_.at(d));
    std::sort(internal_edges.begin(), internal_edges.end());
    internal_edges.erase(std::unique(internal_edges.begin(), internal_edges.end()),
                         internal_edges.end());

    g.fwd_offsets_.assign(g.n_ + 1, 0);
    for (const auto& [s, d] : internal_edges) ++g.fwd_offsets_[s + 1];
    for (std::uint32_t i = 0; i < g.n_; ++i) g.fwd_offsets_[i + 1] += g.fwd_offsets_[i];
    g.fwd_targets_.resize(internal_edges.size());
    {
        std::vector<std::uint32_t> cursor(g.fwd_offsets_.begin(), g.fwd_offsets_.end() - 1);
        for (const auto& [s, d] : internal_edges) g.fwd_targets_[cursor[s]++] = d;
    }

    g.rev_offsets_.assign(g.n_ + 1, 0);
    for (const auto& [s, d] : internal_edges) ++g.rev_offsets_[d + 1];
    for (std::uint32_t i = 0; i < g.n_; ++i) g.rev_offsets_[i + 1] += g.rev_offsets_[i];
    g.rev_sources_.resize(internal_edges.size());
    {
        std::vector<std::uint32_t> cursor(g.rev_offsets_.begin(), g.rev_offsets_.end() - 1);
        // internal_edges is sorted by (src,dst), so each reverse row fills
        // with ascending sources.
        for (const auto& [s, d] : internal_edges) g.rev_sources_[cursor[d]++] = s;
    }

    g.dangling_mask_.resize(g.n_);
    for (std::uint32_t i = 0; i < g.n_; ++i)
        g.dangling_mask_[i] = (g.out_degree(i) == 0) ? 1 : 0;

    if (!transpose_check(g)) throw NumericalError("transpose round-trip failed on build");
    return g;
}

bool LinkGraph::has_edge(std::uint32_t src, std::uint32_t dst) const {
    auto row = successors(src);
    return std::binary_search(row.begin(), row.end(), dst);
}

std::optional<std::uint32_t> LinkGraph::internal_index(std::uint64_t external) const {
    auto it = external_to_internal_.find(external);
    if (it == external_to_internal_.end()) return std::nullopt;
    return it->second;
}

std::vector<ExtEdge> LinkGraph::external_edges() const {
    std::vector<ExtEdge> out;
    out.reserve(edge_count());
    for (std::uint32_t i = 0; i < n_; ++i)
        for (std::uint32_t j : successors(i)) out.emplace_back(external_ids_[i], external_ids_[j]);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<std::size_t> LinkGraph::forward_slot(std::uint32_t src, std::uint32_t dst) const {
    auto row = successors(src);
    auto it = std::lower_bound(row.begin(), row.end(), dst);
    if (it == row.end() || *it != dst) return std::nullopt;
    return fwd_offsets_[src] + static_cast<std::size_t>(it - row.begin());
}

GraphDelta inverse(const GraphDelta& d) {
    GraphDelta inv;
    inv.added_nodes = d.removed_nodes;
    inv.removed_nodes = d.added_nodes;
    inv.added_edges = d.removed_edges;
    inv.removed_edges = d.added_edges;
    return inv;
}

namespace {

bool parse_u64(std::string_view tok, std::uint64_t& out) {
    if (tok.empty()) return false;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

} // namespace

LinkGraph load_graph(const std::filesystem::path& edge_path,
                     const std::optional<std::filesystem::path>& node_manifest) {
    std::ifstream in(edge_path);
    if (!in) throw ParseError("cannot open graph file: " + edge_path.string());

    std::vector<ExtEdge> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto toks = split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        std::uint64_t src = 0, dst = 0;
        if (toks.size() != 2 || !parse_u64(toks[0], src) || !parse_u64(toks[1], dst))
            throw ParseError(edge_path.string() + ":" + std::to_string(line_no) +
                             ": expected \"src dst\" with non-negative integers, got \"" + line +
                             "\"");
        edges.emplace_back(src, dst);
    }

    std::vector<std::uint64_t> isolated;
    if (node_manifest) {
        std::ifstream min(*node_manifest);
        if (!min) throw ParseError("cannot open node manifest: " + node_manifest->string());
        std::size_t mline = 0;
        while (std::getline(min, line)) {
            ++mline;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto toks = split_ws(line);
            if (toks.empty() || toks[0][0] == '#') continue;
            std::uint64_t id = 0;
            if (toks.size() != 1 || !parse_u64(toks[0], id))
                throw ParseError(node_manifest->string() + ":" + std::to_string(mline) +
                                 ": expected one external id per line");
            isolated.push_back(id);
        }
    }

    if (edges.empty() && isolated.empty())
        throw ValidationError("empty graph: " + edge_path.string() +
                              " declares no edges and no manifest nodes");

    return LinkGraph::build(std::move(edges), isolated);
}

void save_graph(const LinkGraph& g, const std::filesystem::path& edge_path,
                const std::optional<std::filesystem::path>& manifest_path) {
    std::vector<std::uint64_t> isolated;
    for (std::uint32_t i = 0; i < g.node_count(); ++i)
        if (g.out_degree(i) == 0 && g.in_degree(i) == 0) isolated.push_back(g.external_id(i));

    if (!isolated.empty() && !manifest_path)
        throw ValidationError("graph has " + std::to_string(isolated.size()) +
                              " isolated node(s); a manifest path is required to keep them");

    std::ofstream out(edge_path);
    if (!out) throw ParseError("cannot write graph file: " + edge_path.string());
    for (const auto& [s, d] : g.external_edges()) out << s << " " << d << "\n";

    if (manifest_path) {
        std::ofstream mout(*manifest_path);
        if (!mout) throw ParseError("cannot write node manifest: " + manifest_path->string());
        std::sort(isolated.begin(), isolated.end());
        for (auto id : isolated) mout << id << "\n";
    }
}

bool transpose_check(std::uint32_t n, std::span<const std::uint32_t> fwd_offsets,
                     std::span<const std::uint32_t> fwd_targets,
                     std::span<const std::uint32_t> rev_offsets,
                     std::span<const std::uint32_t> rev_sources) {
    if (fwd_offsets.size() != n + 1 || rev_offsets.size() != n + 1) return false;
    if (fwd_targets.size() != rev_sources.size()) return false;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t k = fwd_offsets[i]; k < fwd_offsets[i + 1]; ++k) {
            std::uint32_t j = fwd_targets[k];
            if (j >= n) return false;
            auto row = rev_sources.subspan(rev_offsets[j], rev_offsets[j + 1] - rev_offsets[j]);
            if (!std::binary_search(row.begin(), row.end(), i)) return false;
        }
    }
    // Sizes match and every forward edge has a reverse twin, so the edge
    // multisets are equal iff reverse rows hold no duplicates.
    for (std::uint32_t j = 0; j < n; ++j) {
        auto row = rev_sources.subspan(rev_offsets[j], rev_offsets[j + 1] - rev_offsets[j]);
        if (std::adjacent_find(row.begin(), row.end()) != row.end()) return false;
    }
    return true;
}

bool transpose_check(const LinkGraph& g) {
    return transpose_check(g.node_count(), g.forward_offsets(), g.forward_targets(),
                           g.reverse_offsets(), g.reverse_sources());
}

LinkGraph apply_delta(const LinkGraph& g, const GraphDelta& d) {
    std::set<std::uint64_t> nodes(g.external_ids().begin(), g.external_ids().end());
    std::set<ExtEdge> edges;
    {
        auto ee = g.external_edges();
        edges.insert(ee.begin(), ee.end());
    }

    std::vector<std::string> problems;

    for (auto id : d.removed_nodes)
        if (!nodes.count(id)) problems.push_back("removed node " + std::to_string(id) + " unknown");
    for (auto id : d.added_nodes)
        if (nodes.count(id))
            problems.push_back("added node " + std::to_string(id) + " already present");

    std::set<ExtEdge> removed(d.removed_edges.begin(), d.removed_edges.end());
    {
        std::vector<ExtEdge> bad;
        for (const auto& e : removed)
            if (!edges.count(e)) bad.push_back(e);
        if (!bad.empty())
            problems.push_back("removed edges not in base graph: " + join(format_edge_list(bad)));
    }
    {
        std::vector<ExtEdge> bad;
        for (const auto& e : d.added_edges)
            if (edges.count(e)) bad.push_back(e);
        if (!bad.empty())
            problems.push_back("added edges already in base graph: " + join(format_edge_list(bad)));
    }

    // Every edge touching a removed node must be enumerated explicitly.
    std::set<std::uint64_t> removed_nodes(d.removed_nodes.begin(), d.removed_nodes.end());
    {
        std::vector<ExtEdge> missing;
        for (const auto& e : edges)
            if ((removed_nodes.count(e.first) || removed_nodes.count(e.second)) &&
                !removed.count(e))
                missing.push_back(e);
        if (!missing.empty())
            problems.push_back("edges incident to removed nodes missing from removed_edges: " +
                               join(format_edge_list(missing)));
    }

    std::set<std::uint64_t> added_nodes(d.added_nodes.begin(), d.added_nodes.end());
    auto node_known = [&](std::uint64_t id) {
        return (nodes.count(id) && !removed_nodes.count(id)) || added_nodes.count(id);
    };
    {
        std::vector<ExtEdge> bad;
        for (const auto& e : d.added_edges)
            if (!node_known(e.first) || !node_known(e.second)) bad.push_back(e);
        if (!bad.empty())
            problems.push_back("added edges reference unknown nodes: " +
                               join(format_edge_list(bad)));
    }

    if (!problems.empty()) throw ValidationError("invalid delta: " + join(problems));

    for (const auto& e : removed) edges.erase(e);
    for (const auto& e : d.added_edges) edges.insert(e);
    for (auto id : removed_nodes) nodes.erase(id);
    for (auto id : added_nodes) nodes.insert(id);

    // Nodes that end up with no edges still exist; pass them all as the
    // manifest and let build() dedup.
    std::vector<ExtEdge> edge_vec(edges.begin(), edges.end());
    std::vector<std::uint64_t> node_vec(nodes.begin(), nodes.end());
    return LinkGraph::build(std::move(edge_vec), node_vec);
}

ComponentPartition weakly_connected_components(const LinkGraph& g) {
    UnionFind uf(g.node_count());
    for (std::uint32_t i = 0; i < g.node_count(); ++i)
        for (std::uint32_t j : g.successors(i)) uf.unite(i, j);

    ComponentPartition part;
    part.component_of.assign(g.node_count(), 0);
    std::unordered_map<std::uint32_t, std::uint32_t> root_to_class;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        std::uint32_t root = uf.find(i);
        auto [it, inserted] = root_to_class.try_emplace(root, part.count);
        if (inserted) ++part.count;
        part.component_of[i] = it->second;
    }
    return part;
}

void save_id_map(const LinkGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write id map: " + path.string());
    out << "external_id,internal_index\n";
    for (std::uint32_t i = 0; i < g.node_count(); ++i) out << g.external_id(i) << "," << i << "\n";
}

} // namespace linkrank
