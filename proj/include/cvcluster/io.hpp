// Copyright 2026 The cvcluster Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// JSON/CSV serialization.  Rationals are encoded as [numerator, denominator]
// string pairs so arbitrary precision survives the round trip.  Every state
// dump carries a conventions header to prevent cross-tool misreads.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvcluster/gaussian.hpp"
#include "cvcluster/graph.hpp"
#include "cvcluster/mbqc.hpp"
#include "cvcluster/nullifier.hpp"
#include "cvcluster/resources.hpp"

namespace cvc {

using nlohmann::json;

inline json conventions_header() {
  return json{{"ordering", "(q1..qn, p1..pn)"},
              {"hbar", 1},
              {"vacuum_variance", 0.5},
              {"db", "10*log10(s^2)"},
              {"cz", "exp(i q_i q_j)"},
              {"fourier", "R(pi/2)"}};
}

// --- Graph ----------------------------------------------------------------

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (const auto& [i, j] : g.edges()) edges.push_back({i, j});
  return json{{"n", g.mode_count()}, {"edges", edges}};
}

inline Graph graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
    throw std::invalid_argument(
        "graph JSON must be an object with fields \"n\" and \"edges\"");
  if (!j["n"].is_number_integer())
    throw std::invalid_argument("graph JSON: \"n\" must be an integer");
  if (!j["edges"].is_array())
    throw std::invalid_argument("graph JSON: \"edges\" must be an array");
  std::vector<std::pair<int, int>> edges;
  for (std::size_t k = 0; k < j["edges"].size(); ++k) {
    const auto& e = j["edges"][k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      throw std::invalid_argument("graph JSON: edge #" + std::to_string(k) +
                                  " must be a pair of integers");
    edges.push_back({e[0].get<int>(), e[1].get<int>()});
  }
  return Graph(j["n"].get<int>(), edges);
}

inline Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("graph file " + path + ": " + e.what());
  }
  return graph_from_json(j);
}

// --- Rationals and nullifiers --------------------------------------------

inline json rational_to_json(const Rational& r) {
  return json::array({boost::multiprecision::numerator(r).str(),
                      boost::multiprecision::denominator(r).str()});
}

inline Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_float()) {
    // Decimal literals are taken at fixed precision; exact values should use
    // the [num, den] form.
    double v = j.get<double>();
    long long scaled = std::llround(v * 1e9);
    return Rational(scaled, 1000000000LL);
  }
  if (j.is_array() && j.size() == 2)
    return Rational(BigInt(j[0].get<std::string>()),
                    BigInt(j[1].get<std::string>()));
  throw std::invalid_argument(
      "rational JSON must be an integer, a number, or [num, den] strings");
}

inline json form_to_json(const QuadratureForm& f) {
  json q = json::array(), p = json::array();
  for (const auto& c : f.coeff_q) q.push_back(rational_to_json(c));
  for (const auto& c : f.coeff_p) p.push_back(rational_to_json(c));
  return json{{"q", q}, {"p", p}, {"constant", rational_to_json(f.constant)}};
}

inline json nullifier_set_to_json(const NullifierSet& ns) {
  json forms = json::array();
  for (const auto& f : ns.forms) forms.push_back(form_to_json(f));
  return json{{"conventions", conventions_header()},
              {"mode_labels", ns.mode_labels},
              {"forms", forms}};
}

// --- Gaussian states ------------------------------------------------------

inline json gaussian_to_json(const GaussianState& st) {
  json mean = json::array(), cov = json::array();
  for (Eigen::Index i = 0; i < st.mean.size(); ++i) mean.push_back(st.mean(i));
  for (Eigen::Index i = 0; i < st.cov.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < st.cov.cols(); ++j) row.push_back(st.cov(i, j));
    cov.push_back(row);
  }
  return json{{"conventions", conventions_header()},
              {"modes", st.modes()},
              {"mean", mean},
              {"cov", cov},
              {"purity_det", st.purity_det()}};
}

// --- Programs -------------------------------------------------------------

inline MeasurementStep step_from_json(const json& j) {
  if (!j.is_object() || !j.contains("mode") || !j.contains("poly"))
    throw std::invalid_argument(
        "program step must be an object with \"mode\" and \"poly\"");
  MeasurementStep st;
  st.mode = j["mode"].get<int>();
  const auto& poly = j["poly"];
  if (!poly.is_array() || poly.size() > 4)
    throw std::invalid_argument(
        "program step: \"poly\" must list at most 4 coefficients (f(q) = sum "
        "poly[k] q^k)");
  for (std::size_t k = 0; k < poly.size(); ++k)
    st.f[k] = rational_from_json(poly[k]);
  if (j.contains("adapt")) {
    std::string a = j["adapt"].get<std::string>();
    if (a == "none") st.adapt = AdaptRule::None;
    else if (a == "add-previous") st.adapt = AdaptRule::AddPrevious;
    else if (a == "physical") st.adapt = AdaptRule::Physical;
    else throw std::invalid_argument("program step: unknown adapt rule " + a);
    if (j.contains("adapt_factor"))
      st.adapt_factor = rational_from_json(j["adapt_factor"]);
  }
  return st;
}

inline MeasurementProgram program_from_json(const json& j) {
  if (!j.is_array())
    throw std::invalid_argument("program JSON must be an array of steps");
  MeasurementProgram prog;
  for (const auto& s : j) prog.steps.push_back(step_from_json(s));
  prog.validate();
  return prog;
}

inline MeasurementProgram load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open program file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("program file " + path + ": " + e.what());
  }
  return program_from_json(j);
}

// --- Outcome log ----------------------------------------------------------

inline std::string outcome_log_csv(const std::vector<OutcomeLogEntry>& log) {
  std::ostringstream os;
  os << "step,mode,basis,outcome,result\n";
  for (const auto& e : log)
    os << e.step << ',' << e.mode << ",\"" << e.basis << "\"," << e.outcome
       << ',' << e.result << '\n';
  return os.str();
}

inline json outcome_log_json(const std::vector<OutcomeLogEntry>& log) {
  json arr = json::array();
  for (const auto& e : log)
    arr.push_back({{"step", e.step},
                   {"mode", e.mode},
                   {"basis", e.basis},
                   {"outcome", e.outcome},
                   {"result", e.result},
                   {"eigenstate_forced", e.eigenstate_forced}});
  return arr;
}

inline json record_to_json(const ByproductRecord& rec) {
  json arr = json::array();
  for (const auto& t : rec.tags) {
    const char* kind = "";
    switch (t.kind) {
      case ByproductTag::X: kind = "X"; break;
      case ByproductTag::Z: kind = "Z"; break;
      case ByproductTag::F: kind = "F"; break;
      case ByproductTag::FInverse: kind = "F^-1"; break;
      case ByproductTag::Reflect: kind = "reflect"; break;
    }
    arr.push_back({{"kind", kind}, {"mode", t.mode}, {"value", t.value}});
  }
  return arr;
}

// --- Resource reports -----------------------------------------------------

inline json resource_report_to_json(const ResourceReport& r) {
  json j{{"conventions", conventions_header()},
         {"modes", r.n},
         {"edges", r.edge_count},
         {"accuracy", r.accuracy},
         {"max_degree", r.max_degree},
         {"overhead_mode", r.mode == OverheadMode::Exact ? "exact" : "bound"},
         {"overhead_bound", r.overhead_bound},
         {"cz_squeezer_db", r.cz_squeezer_db},
         {"canonical_online_db", r.canonical_cost_db},
         {"decomposed_offline_db", r.decompositional_cost_db},
         {"savings_db", r.savings_db},
         {"savings_db_per_mode", r.n > 0 ? r.savings_db / r.n : 0.0}};
  if (!r.adjacency_singulars.empty())
    j["adjacency_singulars"] = r.adjacency_singulars;
  if (!r.db_per_mode.empty()) j["squeezer_db"] = r.db_per_mode;
  if (!r.exact_singulars.empty()) j["generation_singulars"] = r.exact_singulars;
  return j;
}

inline std::string resource_report_csv(const ResourceReport& r) {
  std::ostringstream os;
  os << "field,value\n"
     << "modes," << r.n << "\nedges," << r.edge_count << "\naccuracy,"
     << r.accuracy << "\nmax_degree," << r.max_degree << "\noverhead_mode,"
     << (r.mode == OverheadMode::Exact ? "exact" : "bound")
     << "\noverhead_bound," << r.overhead_bound << "\ncanonical_online_db,"
     << r.canonical_cost_db << "\ndecomposed_offline_db,"
     << r.decompositional_cost_db << "\nsavings_db," << r.savings_db
     << "\nsavings_db_per_mode," << (r.n > 0 ? r.savings_db / r.n : 0.0)
     << '\n';
  return os.str();
}

inline std::string resource_report_table(const ResourceReport& r) {
  std::ostringstream os;
  os << "conventions: (q1..qn,p1..pn), hbar=1, dB = 10 log10(s^2)\n"
     << "modes                 " << r.n << '\n'
     << "edges                 " << r.edge_count << '\n'
     << "accuracy s            " << r.accuracy << '\n'
     << "max degree            " << r.max_degree << '\n'
     << "overhead mode         "
     << (r.mode == OverheadMode::Exact ? "exact" : "bound") << '\n'
     << "overhead bound        " << r.overhead_bound << '\n'
     << "canonical online dB   " << r.canonical_cost_db << '\n'
     << "decomposed offline dB " << r.decompositional_cost_db << '\n'
     << "savings dB            " << r.savings_db << '\n'
     << "savings dB / mode     " << (r.n > 0 ? r.savings_db / r.n : 0.0)
     << '\n';
  if (!r.adjacency_singulars.empty()) {
    os << "adjacency singulars  ";
    for (double v : r.adjacency_singulars) os << ' ' << v;
    os << '\n';
  }
  if (!r.exact_singulars.empty()) {
    os << "generation singulars ";
    for (double v : r.exact_singulars) os << ' ' << v;
    os << '\n';
  }
  return os.str();
}

// --- Atomic file write ----------------------------------------------------

inline void write_file_atomic(const std::string& path,
                              const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move " + tmp + " to " + path);
}

}  // namespace cvc
