#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>

#include "linkrank/compare.hpp"
#include "linkrank/graph.hpp"
#include "linkrank/ranking.hpp"

namespace linkrank {

/// Doubles rendered with 17 significant digits so round-trips are exact.
std::string format_double(double v);

/// "external_id,score" rows, ascending external id.
void write_scores_csv(const LinkGraph& g, const ScoreVector& s, const std::filesystem::path& path);

/// "iteration,l1_residual,rel_error_vs_reference"; the third column stays
/// empty when no reference was supplied.
void write_trace_csv(const ConvergenceTrace& t, const std::filesystem::path& path);

/// "rank,external_id,score" rows, rank starting at 1.
void write_rank_list_csv(const RankList& list, const std::filesystem::path& path);

/// Reads "external_id,value" rows; an optional header line is skipped.
std::unordered_map<std::uint64_t, double> read_value_map_csv(const std::filesystem::path& path);

/// Per-node vector from a value map, default_value for absent nodes.
std::vector<double> values_for_graph(const LinkGraph& g,
                                     const std::unordered_map<std::uint64_t, double>& by_id,
                                     double default_value);

} // namespace linkrank
