#include "dissdoi/io.hpp"

#include <fstream>
#include <sstream>

#include "dissdoi/errors.hpp"

namespace dissdoi {

namespace {

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Complex complex_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(std::string(what) + " must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json to_json(const ComplexMatrix& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < a.cols(); ++k) row.push_back(complex_json(a(i, k)));
    rows.push_back(std::move(row));
  }
  return Json{{"dim", a.rows()}, {"entries", std::move(rows)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  const Json& dim_j = field(j, "dim");
  if (!dim_j.is_number_integer() || dim_j.get<long>() < 1) throw ParseError("'dim' must be a positive integer");
  const auto n = dim_j.get<Eigen::Index>();
  const Json& rows = field(j, "entries");
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n) throw ParseError("'entries' must have dim rows");
  ComplexMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ParseError("each row must have dim entries");
    for (Eigen::Index k = 0; k < n; ++k) a(i, k) = complex_from(row[static_cast<std::size_t>(k)], "matrix entry");
  }
  if (!a.allFinite()) throw ParseError("matrix has non-finite entries");
  return a;
}

Json to_json(const GeneratedInstance& inst) {
  return Json{{"L1", to_json(inst.first.first().matrix())},
              {"M1", to_json(inst.first.second().matrix())},
              {"L2", to_json(inst.second.first().matrix())},
              {"M2", to_json(inst.second.second().matrix())},
              {"meta", {{"seed", inst.seed}, {"style", std::string(to_string(inst.style))}}}};
}

Instance instance_from_json(const Json& j, double tol) {
  auto load = [&](const char* key) { return DissipativeMatrix::certify(matrix_from_json(field(j, key)), tol); };
  auto l1 = load("L1");
  auto m1 = load("M1");
  auto l2 = load("L2");
  auto m2 = load("M2");
  Instance out{check_commuting(l1, m1, tol), check_commuting(l2, m2, tol), 0, ""};
  if (j.contains("meta")) {
    const Json& meta = j.at("meta");
    if (meta.contains("seed") && meta.at("seed").is_number_unsigned()) out.seed = meta.at("seed").get<std::uint64_t>();
    if (meta.contains("style") && meta.at("style").is_string()) out.style = meta.at("style").get<std::string>();
  }
  return out;
}

Json to_json(const ExpSum1D& f) {
  Json terms = Json::array();
  for (const auto& t : f.terms()) terms.push_back({{"freq", Json::array({t.freq})}, {"coeff", complex_json(t.coeff)}});
  return Json{{"sigma", f.sigma()}, {"dims", 1}, {"terms", std::move(terms)}};
}

Json to_json(const ExpSum2D& f) {
  Json terms = Json::array();
  for (const auto& t : f.terms())
    terms.push_back({{"freq", Json::array({t.xi, t.eta})}, {"coeff", complex_json(t.coeff)}});
  return Json{{"sigma", f.sigma()}, {"dims", 2}, {"terms", std::move(terms)}};
}

Function function_from_json(const Json& j) {
  const Json& sigma_j = field(j, "sigma");
  if (!sigma_j.is_number()) throw ParseError("'sigma' must be a number");
  const double sigma = sigma_j.get<double>();
  const Json& dims_j = field(j, "dims");
  if (!dims_j.is_number_integer()) throw ParseError("'dims' must be 1 or 2");
  const int dims = dims_j.get<int>();
  if (dims != 1 && dims != 2) throw ParseError("'dims' must be 1 or 2");
  const Json& terms = field(j, "terms");
  if (!terms.is_array()) throw ParseError("'terms' must be an array");
  try {
    if (dims == 1) {
      std::vector<ExpSum1D::Term> out;
      for (const auto& t : terms) {
        const Json& fr = field(t, "freq");
        if (!fr.is_array() || fr.size() != 1 || !fr[0].is_number()) throw ParseError("1-d 'freq' must be [xi]");
        out.push_back({fr[0].get<double>(), complex_from(field(t, "coeff"), "coeff")});
      }
      return ExpSum1D(sigma, std::move(out));
    }
    std::vector<ExpSum2D::Term> out;
    for (const auto& t : terms) {
      const Json& fr = field(t, "freq");
      if (!fr.is_array() || fr.size() != 2 || !fr[0].is_number() || !fr[1].is_number())
        throw ParseError("2-d 'freq' must be [xi, eta]");
      out.push_back({fr[0].get<double>(), fr[1].get<double>(), complex_from(field(t, "coeff"), "coeff")});
    }
    return ExpSum2D(sigma, std::move(out));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

Json to_json(const PerturbationReport& r) {
  Json history = Json::array();
  for (const auto& h : r.doi.history)
    history.push_back({{"N", h.level}, {"norm", h.norm}, {"change", h.change}});
  return Json{{"formula", r.formula},
              {"N_used", r.doi.n_used},
              {"converged", r.doi.converged},
              {"path", r.doi.path},
              {"residual", r.residual},
              {"lhs", operator_norm(r.doi_value)},
              {"rhs", r.bound},
              {"certificate", r.certificate},
              {"s2_lhs", r.s2_lhs},
              {"s2_rhs", r.s2_rhs},
              {"partial_sum_history", std::move(history)}};
}

Json to_json(const LipschitzReport& r) {
  return Json{{"lhs", r.lhs}, {"rhs", r.rhs}, {"delta_L", r.delta_first}, {"delta_M", r.delta_second}, {"ok", r.ok}};
}

Json to_json(const BesovLipschitzReport& r) {
  Json bands = Json::array();
  for (const auto& b : r.bands)
    bands.push_back({{"n", b.n}, {"sigma", b.sigma}, {"upper", b.upper}, {"contribution", b.contribution}});
  return Json{{"lhs", r.lhs}, {"rhs", r.rhs}, {"constant", complex_json(r.constant)}, {"bands", std::move(bands)},
              {"ok", r.ok}};
}

Json to_json(const HolderSchattenReport& r) {
  return Json{{"alpha", r.alpha},
              {"p", r.p},
              {"lhs_op", r.lhs_op},
              {"lhs_sp", r.lhs_sp},
              {"holder_quantity", r.holder_quantity},
              {"omega_quantity", r.omega_quantity},
              {"schatten_quantity", r.schatten_quantity},
              {"ratio_holder", r.ratio_holder},
              {"ratio_omega", r.ratio_omega},
              {"ratio_schatten", r.ratio_schatten}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
}

}  // namespace dissdoi
