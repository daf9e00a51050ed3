#include "linkrank/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "linkrank/errors.hpp"

namespace linkrank {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_scores_csv(const LinkGraph& g, const ScoreVector& s,
                      const std::filesystem::path& path) {
    if (s.values.size() != g.node_count())
        throw ValidationError("score vector size does not match graph");

    std::vector<std::pair<std::uint64_t, double>> rows;
    rows.reserve(g.node_count());
    for (std::uint32_t i = 0; i < g.node_count(); ++i)
        rows.emplace_back(g.external_id(i), s.values[i]);
    std::sort(rows.begin(), rows.end());

    std::ofstream out(path);
    if (!out) throw ParseError("cannot write scores: " + path.string());
    out << "external_id,score\n";
    for (const auto& [id, v] : rows) out << id << "," << format_double(v) << "\n";
}

void write_trace_csv(const ConvergenceTrace& t, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write trace: " + path.string());
    out << "iteration,l1_residual,rel_error_vs_reference\n";
    for (const auto& row : t.rows) {
        out << row.iteration << "," << format_double(row.l1_residual) << ",";
        if (row.rel_error) out << format_double(*row.rel_error);
        out << "\n";
    }
}

void write_rank_list_csv(const RankList& list, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write rank list: " + path.string());
    out << "rank,external_id,score\n";
    for (std::size_t i = 0; i < list.entries.size(); ++i)
        out << (i + 1) << "," << list.entries[i].first << ","
            << format_double(list.entries[i].second) << "\n";
}

std::unordered_map<std::uint64_t, double> read_value_map_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open value file: " + path.string());

    std::unordered_map<std::uint64_t, double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected \"external_id,value\"");
        std::string id_tok = line.substr(0, comma);
        std::string val_tok = line.substr(comma + 1);

        char* end = nullptr;
        std::uint64_t id = std::strtoull(id_tok.c_str(), &end, 10);
        if (end == id_tok.c_str() || *end != '\0') {
            if (line_no == 1) continue; // header line
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": bad external id \"" + id_tok + "\"");
        }
        double v = std::strtod(val_tok.c_str(), &end);
        if (end == val_tok.c_str() || *end != '\0')
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad value \"" +
                             val_tok + "\"");
        out[id] = v;
    }
    return out;
}

std::vector<double> values_for_graph(const LinkGraph& g,
                                     const std::unordered_map<std::uint64_t, double>& by_id,
                                     double default_value) {
    std::vector<double> out(g.node_count(), default_value);
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        auto it = by_id.find(g.external_id(i));
        if (it != by_id.end()) out[i] = it->second;
    }
    return out;
}

} // namespace linkrank
