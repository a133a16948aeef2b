#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "knotderiv/autgroup.hpp"
#include "knotderiv/quandle.hpp"
#include "knotderiv/virtual_knots.hpp"

namespace knotderiv {

class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw io_error("write failed: " + path);
}

// Matrix text format: first line the order n, then n lines of n 1-based
// entries.  Lines starting with '#' are comments.
inline FiniteQuandle parse_qm_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<int> numbers;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    int v;
    while (row >> v) numbers.push_back(v);
    if (!row.eof()) throw io_error("matrix file contains a non-numeric token");
  }
  if (numbers.empty()) throw io_error("matrix file is empty");
  int n = numbers[0];
  if (n < 1 || static_cast<std::size_t>(n) * n + 1 != numbers.size())
    throw io_error("matrix file needs the order n followed by n*n entries; got " +
                   std::to_string(numbers.size() - 1) + " entries for n = " + std::to_string(n));
  std::vector<std::vector<int>> rows(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rows[i][j] = numbers[1 + i * n + j];
  return FiniteQuandle::from_rows(rows);
}

inline std::string qm_text(const FiniteQuandle& q) {
  std::string out = std::to_string(q.size()) + "\n";
  for (const auto& row : q.rows()) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ' ';
      out += std::to_string(row[j]);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json quandle_to_json(const FiniteQuandle& q) {
  return {{"n", q.size()}, {"table", q.rows()}};
}

inline FiniteQuandle quandle_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("table"))
    throw io_error("quandle JSON needs the keys \"n\" and \"table\"");
  int n = j.at("n").get<int>();
  auto rows = j.at("table").get<std::vector<std::vector<int>>>();
  if (static_cast<int>(rows.size()) != n)
    throw io_error("quandle JSON: table has " + std::to_string(rows.size()) +
                   " rows but n = " + std::to_string(n));
  return FiniteQuandle::from_rows(rows);
}

inline FiniteQuandle load_quandle_file(const std::string& path) {
  std::string text = read_text_file(path);
  std::string ext = std::filesystem::path(path).extension().string();
  try {
    if (ext == ".json") return quandle_from_json(nlohmann::json::parse(text));
    return parse_qm_text(text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": " + e.what());
  } catch (const io_error& e) {
    throw io_error(path + ": " + e.what());
  }
}

inline void write_quandle_file(const std::string& path, const FiniteQuandle& q) {
  std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".json")
    write_text_file(path, quandle_to_json(q).dump(2) + "\n");
  else
    write_text_file(path, qm_text(q));
}

// Quandle specs understood everywhere a quandle can be named: "d<n>" dihedral,
// "t<n>" trivial, "conj-aut:<spec>" the conjugation quandle of Aut(<spec>),
// anything else a file path.
inline FiniteQuandle resolve_quandle_spec(const std::string& spec, const RunConfig& cfg = {}) {
  auto all_digits = [](const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
  };
  if (spec.size() >= 2 && (spec[0] == 'd' || spec[0] == 't') && all_digits(spec.substr(1))) {
    int n = std::stoi(spec.substr(1));
    if (n < 1) throw io_error("quandle spec needs a positive order: " + spec);
    return spec[0] == 'd' ? dihedral(n) : trivial_quandle(n);
  }
  if (spec.rfind("conj-aut:", 0) == 0) {
    FiniteQuandle inner = resolve_quandle_spec(spec.substr(9), cfg);
    return conj_quandle(automorphism_group(inner, cfg)).quandle;
  }
  return load_quandle_file(spec);
}

inline nlohmann::json diagram_to_json(const KnotDiagram& dia) {
  nlohmann::json tuples = nlohmann::json::array();
  for (const auto& c : dia.crossings) tuples.push_back({c.a, c.b, c.c, c.d});
  return {{"crossings", tuples}};
}

inline KnotDiagram diagram_from_json(const nlohmann::json& j, const PdParseOptions& opts = {}) {
  if (!j.is_object() || !j.contains("crossings"))
    throw io_error("diagram JSON needs the key \"crossings\"");
  std::string pd;
  for (const auto& t : j.at("crossings")) {
    auto e = t.get<std::vector<int>>();
    if (e.size() != 4) throw io_error("diagram JSON: each crossing needs four labels");
    if (!pd.empty()) pd += ' ';
    pd += "X(" + std::to_string(e[0]) + "," + std::to_string(e[1]) + "," + std::to_string(e[2]) +
          "," + std::to_string(e[3]) + ")";
  }
  return parse_pd(pd, opts);
}

// CLI arguments that take "inline text or a file path": an existing file wins,
// anything else is treated as literal text.
inline std::string text_or_file(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) return read_text_file(arg);
  return arg;
}

}  // namespace knotderiv
