#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "posebench/harness/compare.hpp"
#include "posebench/harness/runner.hpp"

namespace posebench::harness {

// One method's results as read back from a run directory.
struct MethodResults {
  std::string name;
  std::vector<AggregateRow> aggregates;
  std::vector<PoseMetrics> poses;
};

inline std::vector<AggregateRow> aggregates_from_json(const nlohmann::json& j) {
  std::vector<AggregateRow> out;
  for (const auto& r : j.at("aggregates")) {
    AggregateRow a{parse_criterion(r.at("criterion").get<std::string>()), r.at("k").get<int>()};
    a.mean = r.at("mean").get<double>();
    a.bootstrap_mean = r.at("bootstrap_mean").get<double>();
    a.sem = r.at("sem").get<double>();
    a.n_structures = r.at("n_structures").get<int>();
    out.push_back(a);
  }
  return out;
}

inline MethodResults load_method_results(const std::filesystem::path& run_dir, std::string name = {}) {
  MethodResults m;
  m.name = name.empty() ? run_dir.filename().string() : std::move(name);
  if (m.name.empty()) m.name = run_dir.parent_path().filename().string();
  try {
    m.aggregates = aggregates_from_json(nlohmann::json::parse(read_text(run_dir / "aggregates.json")));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("aggregates.json: ") + e.what());
  }
  m.poses = poses_from_csv(read_text(run_dir / "poses.csv"));
  sort_poses(m.poses);
  return m;
}

inline std::optional<AggregateRow> find_row(const MethodResults& m, Criterion c, int k) {
  for (const auto& r : m.aggregates)
    if (r.criterion == c && r.k == k) return r;
  return std::nullopt;
}

// "79.0 ± 1.4" (percent) for thresholded criteria, "0.812 ± 0.010" for lDDT-PLI.
inline std::string format_cell(const AggregateRow& r) {
  if (is_binary(r.criterion)) return fmt_fixed(100.0 * r.mean, 1) + " ± " + fmt_fixed(100.0 * r.sem, 1);
  return fmt_fixed(r.mean, 3) + " ± " + fmt_fixed(r.sem, 3);
}

inline std::string results_table_csv(const std::vector<MethodResults>& methods, int k) {
  std::string out = "method";
  for (auto c : kCriteria) out += "," + criterion_name(c);
  out += "\n";
  for (const auto& m : methods) {
    out += csv_escape(m.name);
    for (auto c : kCriteria) {
      auto r = find_row(m, c, k);
      out += "," + (r ? csv_escape(format_cell(*r)) : std::string());
    }
    out += "\n";
  }
  return out;
}

inline std::string xml_escape(std::string_view s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

// stars[i][c]: annotation for methods[0] vs methods[i] under criterion c.
using StarTable = std::vector<std::map<Criterion, std::string>>;

// Grouped bar chart: one group per criterion, one bar per method, error
// bars of one SEM, significance stars above compared bars, dashed boxes
// around each group.
inline std::string render_bar_chart_svg(const std::vector<MethodResults>& methods, int k, const StarTable& stars) {
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  const double bar_w = 22, gap = 26, left = 60, top = 40, plot_h = 260;
  const std::size_t nm = std::max<std::size_t>(methods.size(), 1);
  const double group_w = bar_w * static_cast<double>(nm) + gap;
  const double width = left + group_w * static_cast<double>(kCriteria.size()) + 20;
  const double height = top + plot_h + 70 + 18.0 * static_cast<double>(methods.size());
  auto y_of = [&](double frac) { return top + plot_h * (1.0 - std::clamp(frac, 0.0, 1.0)); };
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_fixed(width, 0) + "\" height=\"" + fmt_fixed(height, 0) +
       "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<text x=\"" + fmt_fixed(left, 0) + "\" y=\"20\" font-size=\"13\">best@" + std::to_string(k) + "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = y_of(t / 4.0);
    s += "<line x1=\"" + fmt_fixed(left - 4, 1) + "\" y1=\"" + fmt_fixed(y, 1) + "\" x2=\"" + fmt_fixed(width - 20, 1) +
         "\" y2=\"" + fmt_fixed(y, 1) + "\" stroke=\"#ddd\"/>\n";
    s += "<text x=\"" + fmt_fixed(left - 8, 1) + "\" y=\"" + fmt_fixed(y + 4, 1) + "\" text-anchor=\"end\">" +
         std::to_string(25 * t) + "%</text>\n";
  }
  for (std::size_t ci = 0; ci < kCriteria.size(); ++ci) {
    const auto c = kCriteria[ci];
    const double gx = left + group_w * static_cast<double>(ci) + gap / 2;
    s += "<rect x=\"" + fmt_fixed(gx - 4, 1) + "\" y=\"" + fmt_fixed(top - 14, 1) + "\" width=\"" +
         fmt_fixed(bar_w * static_cast<double>(nm) + 8, 1) + "\" height=\"" + fmt_fixed(plot_h + 14, 1) +
         "\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      const auto r = find_row(methods[mi], c, k);
      if (!r) continue;
      const double x = gx + bar_w * static_cast<double>(mi);
      const double y = y_of(r->mean);
      s += "<rect x=\"" + fmt_fixed(x, 1) + "\" y=\"" + fmt_fixed(y, 2) + "\" width=\"" + fmt_fixed(bar_w - 2, 1) +
           "\" height=\"" + fmt_fixed(top + plot_h - y, 2) + "\" fill=\"" + palette[mi % 6] + "\"><title>" +
           xml_escape(methods[mi].name + " " + criterion_name(c) + ": " + format_cell(*r)) + "</title></rect>\n";
      const double xm = x + (bar_w - 2) / 2;
      const double ylo = y_of(r->mean - r->sem), yhi = y_of(r->mean + r->sem);
      s += "<line class=\"errbar\" x1=\"" + fmt_fixed(xm, 1) + "\" y1=\"" + fmt_fixed(ylo, 2) + "\" x2=\"" + fmt_fixed(xm, 1) +
           "\" y2=\"" + fmt_fixed(yhi, 2) + "\" stroke=\"#000\"/>\n";
      for (double ye : {ylo, yhi})
        s += "<line x1=\"" + fmt_fixed(xm - 4, 1) + "\" y1=\"" + fmt_fixed(ye, 2) + "\" x2=\"" + fmt_fixed(xm + 4, 1) +
             "\" y2=\"" + fmt_fixed(ye, 2) + "\" stroke=\"#000\"/>\n";
      if (mi < stars.size()) {
        auto it = stars[mi].find(c);
        if (it != stars[mi].end() && !it->second.empty())
          s += "<text class=\"stars\" x=\"" + fmt_fixed(xm, 1) + "\" y=\"" + fmt_fixed(yhi - 4, 2) +
               "\" text-anchor=\"middle\">" + it->second + "</text>\n";
      }
    }
    s += "<text x=\"" + fmt_fixed(gx + bar_w * static_cast<double>(nm) / 2, 1) + "\" y=\"" + fmt_fixed(top + plot_h + 16, 1) +
         "\" text-anchor=\"middle\">" + xml_escape(criterion_name(c)) + "</text>\n";
  }
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const double y = top + plot_h + 40 + 18.0 * static_cast<double>(mi);
    s += "<rect x=\"" + fmt_fixed(left, 0) + "\" y=\"" + fmt_fixed(y - 10, 0) + "\" width=\"12\" height=\"12\" fill=\"" +
         palette[mi % 6] + "\"/>\n";
    s += "<text x=\"" + fmt_fixed(left + 18, 0) + "\" y=\"" + fmt_fixed(y, 0) + "\">" + xml_escape(methods[mi].name) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

// Stars for methods[0] against each other method (row 0 stays empty).
inline StarTable compute_stars(const std::vector<MethodResults>& methods, int k, SignificanceMethod how = SignificanceMethod::ttest) {
  StarTable t(methods.size());
  for (std::size_t i = 1; i < methods.size(); ++i)
    for (auto c : kCriteria) {
      try {
        t[i][c] = compare_methods(methods[0].poses, methods[i].poses, k, c, how).stars;
      } catch (const InvalidArgument&) {
        t[i][c] = "";
      }
    }
  return t;
}

// index.html, table_best{k}.csv and chart_best{k}.svg under `dir`.
inline std::vector<std::filesystem::path> render_report(const std::vector<MethodResults>& methods, const std::vector<int>& k_values,
                                                        const std::filesystem::path& dir,
                                                        SignificanceMethod how = SignificanceMethod::ttest) {
  std::vector<std::filesystem::path> written;
  std::string html =
      "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>posebench report</title>\n"
      "<style>body{font-family:sans-serif}table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:3px 8px}</style>\n"
      "</head><body>\n<h1>posebench report</h1>\n";
  for (int k : k_values) {
    const auto csv = results_table_csv(methods, k);
    const auto svg = render_bar_chart_svg(methods, k, compute_stars(methods, k, how));
    const auto csv_name = "table_best" + std::to_string(k) + ".csv";
    const auto svg_name = "chart_best" + std::to_string(k) + ".svg";
    write_text(dir / csv_name, csv);
    write_text(dir / svg_name, svg);
    written.push_back(dir / csv_name);
    written.push_back(dir / svg_name);
    html += "<h2>best@" + std::to_string(k) + "</h2>\n<table><tr><th>method</th>";
    for (auto c : kCriteria) html += "<th>" + xml_escape(criterion_name(c)) + "</th>";
    html += "</tr>\n";
    for (const auto& m : methods) {
      html += "<tr><td>" + xml_escape(m.name) + "</td>";
      for (auto c : kCriteria) {
        auto r = find_row(m, c, k);
        html += "<td>" + (r ? xml_escape(format_cell(*r)) : std::string()) + "</td>";
      }
      html += "</tr>\n";
    }
    html += "</table>\n<p><a href=\"" + csv_name + "\">" + csv_name + "</a></p>\n<img src=\"" + svg_name + "\" alt=\"best@" +
            std::to_string(k) + " chart\">\n";
  }
  html += "<p>Error bars: bootstrap SEM. Stars: one-sided paired test of the first method against each other method "
          "(*** p&le;0.001, ** p&le;0.01, * p&le;0.05).</p>\n</body></html>\n";
  write_text(dir / "index.html", html);
  written.push_back(dir / "index.html");
  return written;
}

// Full run directory: write_results() plus a single-method report/.
inline void write_run(const ResultsBundle& b, const RunConfig& cfg, const std::filesystem::path& dir,
                      const chem::BenchmarkManifest* manifest = nullptr) {
  write_results(b, cfg, dir, manifest);
  MethodResults m{b.dataset.empty() ? "run" : b.dataset, b.aggregates, b.poses};
  render_report({m}, cfg.k_values, dir / "report", cfg.significance);
}

}  // namespace posebench::harness
