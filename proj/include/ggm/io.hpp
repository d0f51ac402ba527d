#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ggm/data_matrix.hpp"
#include "ggm/experiments.hpp"
#include "ggm/search.hpp"

namespace ggm {

/// 17 significant digits: enough to reproduce any double exactly, so CSV
/// regression tests can compare bytes.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool is_missing_token(std::string_view s) {
    if (s.empty()) return true;
    std::string lower(s);
    for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return lower == "na" || lower == "nan" || lower == "null";
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return v;
}

}  // namespace detail

/// Parses a rectangular numeric CSV. Rows containing a missing cell (empty,
/// NA, NaN or null) are dropped and counted; any other unparsable cell is a
/// ParseError naming its 1-based row and column. The surviving rows are
/// centered by the DataMatrix constructor.
inline DataMatrix ingest_csv(const std::string& path, bool has_header = false) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    int dropped = 0;
    std::string line;
    long lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && has_header) continue;
        if (detail::trim(line).empty()) continue;
        std::vector<double> row;
        bool missing = false;
        std::string_view rest(line);
        std::size_t col = 0;
        while (true) {
            ++col;
            const std::size_t comma = rest.find(',');
            const std::string_view cell = detail::trim(rest.substr(0, comma));
            if (detail::is_missing_token(cell)) {
                missing = true;
            } else if (auto v = detail::parse_double(cell)) {
                row.push_back(*v);
            } else {
                throw ParseError(path + ": row " + std::to_string(lineno) + ", column " + std::to_string(col) +
                                 ": cannot parse '" + std::string(cell) + "'");
            }
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (width == 0)
            width = col;
        else if (col != width)
            throw ParseError(path + ": row " + std::to_string(lineno) + " has " + std::to_string(col) +
                             " columns, expected " + std::to_string(width));
        if (missing)
            ++dropped;
        else
            rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw EmptyAfterFilteringError(path + ": fewer than 2 usable rows");
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j) values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return DataMatrix(std::move(values), dropped);
}

/// Edge-list text: one "i j" pair per line, 1-based, blank lines ignored.
inline Graph read_edge_list(const std::string& path, int p = 0) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::pair<int, int>> pairs;
    int max_v = 0;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view t = detail::trim(line);
        if (t.empty()) continue;
        std::istringstream ss{std::string(t)};
        int a = 0, b = 0;
        if (!(ss >> a >> b) || a < 1 || b < 1 || a == b)
            throw ParseError(path + ": line " + std::to_string(lineno) + ": expected two distinct 1-based vertices");
        std::string extra;
        if (ss >> extra) throw ParseError(path + ": line " + std::to_string(lineno) + ": trailing tokens");
        pairs.emplace_back(a - 1, b - 1);
        max_v = std::max({max_v, a, b});
    }
    const int pp = p > 0 ? p : max_v;
    if (pp < 1) throw ParseError(path + ": no edges and no vertex count given");
    Graph g(pp);
    for (auto [a, b] : pairs) g.add_edge(a, b);
    return g;
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
    for (const Edge& e : g.edges()) out << (e.a + 1) << ' ' << (e.b + 1) << '\n';
}

/// "a-b c-d ..." with 1-based endpoints, canonical order; empty graph -> "".
inline std::string edges_to_string(const Graph& g) {
    std::string s;
    for (const Edge& e : g.edges()) {
        if (!s.empty()) s += ' ';
        s += std::to_string(e.a + 1) + "-" + std::to_string(e.b + 1);
    }
    return s;
}

inline Graph edges_from_string(const std::string& s, int p) {
    Graph g(p);
    std::istringstream ss(s);
    std::string tok;
    while (ss >> tok) {
        const std::size_t dash = tok.find('-');
        if (dash == std::string::npos) throw ParseError("bad edge token '" + tok + "'");
        const auto a = detail::parse_double(tok.substr(0, dash));
        const auto b = detail::parse_double(tok.substr(dash + 1));
        if (!a || !b) throw ParseError("bad edge token '" + tok + "'");
        g.add_edge(static_cast<int>(*a) - 1, static_cast<int>(*b) - 1);
    }
    return g;
}

inline std::string to_dot(const Graph& g, const std::string& name = "g") {
    std::string s = "graph " + name + " {\n";
    for (int v = 0; v < g.vertex_count(); ++v) s += "  " + std::to_string(v + 1) + ";\n";
    for (const Edge& e : g.edges()) s += "  " + std::to_string(e.a + 1) + " -- " + std::to_string(e.b + 1) + ";\n";
    s += "}\n";
    return s;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::string matrix_to_csv(const Eigen::MatrixXd& m) {
    std::string s;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) s += ',';
            s += format_number(m(i, j));
        }
        s += '\n';
    }
    return s;
}

using Json = nlohmann::ordered_json;

inline Json prior_to_json(const PriorSpec& s) {
    return Json{{"family", to_string(s.family)}, {"m", s.m}, {"h", s.h},
                {"c", s.c},                      {"phi", s.phi}, {"a", s.a}, {"b", s.b}};
}

inline Json graph_to_json(const Graph& g) {
    Json edges = Json::array();
    for (const Edge& e : g.edges()) edges.push_back(Json::array({e.a + 1, e.b + 1}));
    return Json{{"vertices", g.vertex_count()}, {"size", g.edge_count()}, {"edges", std::move(edges)}};
}

inline Json stats_to_json(const SearchStats& st) {
    return Json{{"iterations", st.iterations},
                {"local_moves", st.local_moves},
                {"resample_moves", st.resample_moves},
                {"global_moves", st.global_moves},
                {"score_evaluations", st.score_evaluations},
                {"list_insertions", st.list_insertions},
                {"list_evictions", st.list_evictions},
                {"best_score", st.best_score},
                {"list_size", st.list_size},
                {"subset_cache_entries", st.subset_cache_entries},
                {"memo_entries", st.memo_entries}};
}

/// Everything a search run needs to be replayed and everything the report
/// files are generated from. The output directory is deliberately not
/// echoed: two runs that differ only in destination emit identical bytes.
struct ResultBundle {
    std::string command;
    std::string input_path;
    bool has_header = false;
    PriorSpec prior;
    SearchConfig search;
    std::optional<double> g_override;
    int n = 0, p = 0, dropped_rows = 0;
    std::vector<ScoredGraph> top;  // descending score
    InclusionMatrix inclusion;
    Graph median{1};
    SearchStats stats;
};

inline Json bundle_to_json(const ResultBundle& b) {
    Json top = Json::array();
    int rank = 1;
    for (const ScoredGraph& sg : b.top)
        top.push_back(Json{{"rank", rank++},
                           {"log_score", sg.score},
                           {"size", sg.graph.edge_count()},
                           {"edges", edges_to_string(sg.graph)}});
    Json incl = Json::array();
    for (int i = 0; i < b.inclusion.p; ++i) {
        Json row = Json::array();
        for (int j = 0; j < b.inclusion.p; ++j) row.push_back(b.inclusion.q(i, j));
        incl.push_back(std::move(row));
    }
    return Json{{"schema_version", 1},
                {"command", b.command},
                {"input", b.input_path},
                {"has_header", b.has_header},
                {"data", Json{{"n", b.n}, {"p", b.p}, {"dropped_rows", b.dropped_rows}}},
                {"prior", prior_to_json(b.prior)},
                {"likelihood_g", b.g_override ? Json(*b.g_override) : Json("1/n")},
                {"search",
                 Json{{"iterations", b.search.iterations},
                      {"global_period", b.search.global_period},
                      {"resample_period", b.search.resample_period},
                      {"list_capacity", b.search.list_capacity},
                      {"inclusion_clamp", b.search.inclusion_clamp},
                      {"inclusion_resync", b.search.inclusion_resync},
                      {"use_score_memo", b.search.use_score_memo},
                      {"seed", b.search.seed}}},
                {"stats", stats_to_json(b.stats)},
                {"median_graph", graph_to_json(b.median)},
                {"top_graphs", std::move(top)},
                {"inclusion", std::move(incl)}};
}

inline std::string top_graphs_csv(const std::vector<ScoredGraph>& top) {
    std::string s = "rank,log_score,size,edges\n";
    int rank = 1;
    for (const ScoredGraph& sg : top) {
        s += std::to_string(rank++) + ',' + format_number(sg.score) + ',' + std::to_string(sg.graph.edge_count()) +
             ",\"" + edges_to_string(sg.graph) + "\"\n";
    }
    return s;
}

struct EmitFlags {
    bool json = true;
    bool dot = true;
    bool csv = true;
};

inline void emit_results(const ResultBundle& bundle, const std::filesystem::path& out_dir, EmitFlags flags = {}) {
    std::filesystem::create_directories(out_dir);
    if (flags.json) write_text_file(out_dir / "results.json", bundle_to_json(bundle).dump(2) + "\n");
    if (flags.dot) write_text_file(out_dir / "median_graph.dot", to_dot(bundle.median, "median_graph"));
    if (flags.csv) {
        write_text_file(out_dir / "inclusion.csv", matrix_to_csv(bundle.inclusion.q));
        write_text_file(out_dir / "top_graphs.csv", top_graphs_csv(bundle.top));
    }
}

inline std::string data_to_csv(const Eigen::MatrixXd& values) { return matrix_to_csv(values); }

inline std::string kl_curve_csv(const std::vector<KlCurvePoint>& curve) {
    std::string s = "size,mean_kl,std_error\n";
    for (const KlCurvePoint& pt : curve)
        s += std::to_string(pt.size) + ',' + format_number(pt.mean) + ',' + format_number(pt.std_error) + '\n';
    return s;
}

inline std::string sim_study_csv(const SimStudyReport& report) {
    std::string s = "noise_vertices,seed,prior,h,c,false_positives,false_negatives,true_positives,median_edges,mean_true_edge_inclusion,best_score\n";
    for (const SimStudyRun& r : report.runs)
        s += std::to_string(report.spec.noise_vertices) + ',' + std::to_string(r.seed) + ',' + r.prior_label + ',' +
             format_number(r.h) + ',' + format_number(r.c) + ',' + std::to_string(r.false_positives) + ',' +
             std::to_string(r.false_negatives) + ',' + std::to_string(r.true_positives) + ',' +
             std::to_string(r.median_edges) + ',' + format_number(r.mean_true_edge_inclusion) + ',' +
             format_number(r.best_score) + '\n';
    return s;
}

inline std::string calibration_csv(const std::vector<CalibrationRow>& rows) {
    std::string s = "label,h,c,weighting,mean,variance\n";
    for (const CalibrationRow& r : rows)
        s += "\"" + r.label + "\"," + format_number(r.h) + ',' + format_number(r.c) + ',' +
             (r.weighting == SizeWeighting::PerSize ? "per-size" : "graph-count") + ',' + format_number(r.mean) +
             ',' + format_number(r.variance) + '\n';
    return s;
}

inline std::string size_pmf_csv(const SizeDistribution& dist) {
    std::string s = "k,probability\n";
    for (std::size_t k = 0; k < dist.pmf.size(); ++k)
        s += std::to_string(k) + ',' + format_number(dist.pmf[k]) + '\n';
    return s;
}

}  // namespace ggm
