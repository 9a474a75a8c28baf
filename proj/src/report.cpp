// Copyright 2026 The EPR Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <string>

#include <fmt/format.h>

#include "epr/scenarios.hpp"

namespace epr {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Shortest representation that parses back to the same double.
std::string cellText(const Cell& c) {
  return std::visit(Overloaded{[](std::monostate) { return std::string(); },
                               [](std::uint64_t v) { return fmt::format("{}", v); },
                               [](double v) { return fmt::format("{}", v); },
                               [](const std::string& v) { return v; },
                               [](bool v) { return std::string(v ? "true" : "false"); }},
                    c);
}

std::string cellPretty(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return fmt::format("{:.6g}", *d);
  if (std::holds_alternative<std::monostate>(c)) return "-";
  return cellText(c);
}

nlohmann::ordered_json cellJson(const Cell& c) {
  return std::visit(Overloaded{[](std::monostate) { return nlohmann::ordered_json(nullptr); },
                               [](std::uint64_t v) { return nlohmann::ordered_json(v); },
                               [](double v) { return nlohmann::ordered_json(v); },
                               [](const std::string& v) { return nlohmann::ordered_json(v); },
                               [](bool v) { return nlohmann::ordered_json(v); }},
                    c);
}

std::string scalarText(const nlohmann::ordered_json& v) {
  if (v.is_number_float()) return fmt::format("{}", v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void flatten(const nlohmann::ordered_json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else {
    out.emplace_back(prefix, scalarText(j));
  }
}

}  // namespace

std::string renderTsv(const ResultDocument& doc) {
  std::string out;
  out += fmt::format("# scenario\t{}\n", toString(doc.name));
  out += fmt::format("# config\t{}\n", doc.scenario.at("config").dump());
  out += fmt::format("# version\t{}\n", doc.engine.version);
  for (std::size_t i = 0; i < doc.table.columns.size(); ++i) {
    out += (i ? "\t" : "") + doc.table.columns[i];
  }
  out += '\n';
  for (const auto& row : doc.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "\t" : "") + cellText(row[i]);
    out += '\n';
  }
  std::vector<std::pair<std::string, std::string>> summary;
  flatten(doc.summary, "", summary);
  for (const auto& [k, v] : summary) out += fmt::format("# {}\t{}\n", k, v);
  return out;
}

std::string renderJson(const ResultDocument& doc) {
  nlohmann::ordered_json j;
  j["scenario"] = doc.scenario;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : doc.table.rows) {
    nlohmann::ordered_json r;
    for (std::size_t i = 0; i < row.size(); ++i) r[doc.table.columns[i]] = cellJson(row[i]);
    j["rows"].push_back(std::move(r));
  }
  j["summary"] = doc.summary;
  j["engine"] = {{"version", doc.engine.version},
                 {"trials", doc.engine.trials},
                 {"wall_seconds", doc.engine.wallSeconds},
                 {"workers", doc.engine.workers}};
  return j.dump(2) + "\n";
}

std::string renderTable(const ResultDocument& doc) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(doc.table.columns);
  for (const auto& row : doc.table.rows) {
    std::vector<std::string> r;
    for (const auto& c : row) r.push_back(cellPretty(c));
    cells.push_back(std::move(r));
  }
  std::vector<std::size_t> width(doc.table.columns.size(), 0);
  for (const auto& r : cells)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());

  std::string out = fmt::format("{} (epr {}, {} trials, {:.2f} s, {} workers)\n\n", toString(doc.name),
                                doc.engine.version, doc.engine.trials, doc.engine.wallSeconds,
                                doc.engine.workers);
  for (const auto& r : cells) {
    for (std::size_t i = 0; i < r.size(); ++i) out += fmt::format("{:>{}}  ", r[i], width[i]);
    out += '\n';
  }
  out += '\n';
  std::vector<std::pair<std::string, std::string>> summary;
  flatten(doc.summary, "", summary);
  for (const auto& [k, v] : summary) out += fmt::format("{}: {}\n", k, v);
  return out;
}

std::string render(const ResultDocument& doc, OutputFormat format) {
  switch (format) {
    case OutputFormat::Tsv: return renderTsv(doc);
    case OutputFormat::Json: return renderJson(doc);
    case OutputFormat::Table: break;
  }
  return renderTable(doc);
}

std::string renderPlotData(const ResultDocument& doc) {
  const ResultTable& t = doc.table;
  auto num = [&](const std::vector<Cell>& row, const char* col) {
    const Cell& c = row[t.column(col)];
    if (const double* d = std::get_if<double>(&c)) return fmt::format("{}", *d);
    return cellText(c);
  };
  auto text = [&](const std::vector<Cell>& row, const char* col) { return cellText(row[t.column(col)]); };

  std::string out;
  switch (doc.name) {
    case ScenarioName::MalusCheck:
      out += "# theta_deg\tP_pass\tP_stderr\tcos2_theta\n";
      for (const auto& r : t.rows)
        out += fmt::format("{}\t{}\t{}\t{}\n", num(r, "theta_deg"), num(r, "P_pass"), num(r, "P_stderr"),
                           num(r, "cos2_theta"));
      return out;
    case ScenarioName::QwpTest:
      out += "# index\tP_B_given_A\tP_B_given_A_stderr\n";
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out += fmt::format("# model {}\t{}\n", i, text(t.rows[i], "model"));
      }
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out += fmt::format("{}\t{}\t{}\n", i, num(t.rows[i], "P_B_given_A"),
                           num(t.rows[i], "P_B_given_A_stderr"));
      }
      return out;
    default: break;
  }
  // Correlation against relative analyzer angle; one gnuplot block per model.
  const bool perModel = doc.name == ScenarioName::ModelMatrix;
  std::string currentModel;
  out += "# theta_deg\tE\tE_stderr\n";
  for (const auto& r : t.rows) {
    if (perModel) {
      if (text(r, "block") != "chsh") continue;
      if (text(r, "model") != currentModel) {
        if (!currentModel.empty()) out += "\n\n";
        currentModel = text(r, "model");
        out += fmt::format("# model {}\n", currentModel);
      }
    }
    const double theta = std::get<double>(r[t.column("b_deg")]) - std::get<double>(r[t.column("a_deg")]);
    out += fmt::format("{}\t{}\t{}\n", theta, num(r, "E"), num(r, "E_stderr"));
  }
  return out;
}

}  // namespace epr
