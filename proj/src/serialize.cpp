#include "coherelab/serialize.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace coherelab {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json re_row = Json::array();
    Json im_row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re_row.push_back(m(i, j).real());
      im_row.push_back(m(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::ParseError, "matrix JSON: " + why); };
  if (!j.is_object()) fail("expected an object");
  if (!j.contains("dim") || !j.at("dim").is_number_integer()) fail("missing integer 'dim'");
  const long d = j.at("dim").get<long>();
  if (d < 1 || d > 512) fail("'dim' out of range");
  if (!j.contains("re") || !j.at("re").is_array()) fail("missing array 're'");
  const bool has_im = j.contains("im");
  if (has_im && !j.at("im").is_array()) fail("'im' must be an array");

  ComplexMatrix m(d, d);
  auto read = [&](const Json& rows, bool imag) {
    if (static_cast<long>(rows.size()) != d) fail("row count does not match 'dim'");
    for (long r = 0; r < d; ++r) {
      const Json& row = rows.at(static_cast<std::size_t>(r));
      if (!row.is_array() || static_cast<long>(row.size()) != d) fail("column count does not match 'dim'");
      for (long c = 0; c < d; ++c) {
        const Json& v = row.at(static_cast<std::size_t>(c));
        if (!v.is_number()) fail("non-numeric entry");
        const double x = v.get<double>();
        if (imag) m(r, c).imag(x);
        else m(r, c) = Complex(x, 0.0);
      }
    }
  };
  read(j.at("re"), false);
  if (has_im) read(j.at("im"), true);
  return m;
}

DensityMatrix density_from_json(const Json& j) { return validate_density(matrix_from_json(j)); }

MeasurementBasis basis_from_json(const Json& j) { return MeasurementBasis(matrix_from_json(j)); }

Json to_json(const TradeoffReport& r) {
  return Json{{"dim", r.dim},
              {"purity", r.purity},
              {"M_l", r.M_l},
              {"S", r.S},
              {"M_g", r.M_g},
              {"Q", r.Q},
              {"rms_avg_l2", r.rms_avg_l2},
              {"avg_r", r.avg_r},
              {"avg_sk", r.avg_sk},
              {"max_l2", r.max_l2},
              {"max_r", r.max_r},
              {"max_sk", r.max_sk},
              {"residual_t1_rms", r.residual_t1_rms},
              {"residual_t1_max", r.residual_t1_max},
              {"residual_t2_avg", r.residual_t2_avg},
              {"residual_t2_max", r.residual_t2_max},
              {"residual_t3_avg", r.residual_t3_avg},
              {"residual_t3_max", r.residual_t3_max}};
}

Json to_json(const TradeoffSweepSummary& s) {
  Json violations = Json::object();
  for (const auto& [name, count] : s.violations) violations[name] = count;
  Json worst = Json::object();
  for (const auto& [name, margin] : s.worst_margin) worst[name] = margin;
  return Json{{"dim", s.dim},           {"n_states", s.n_states}, {"n_bases", s.n_bases},
              {"violations", violations}, {"worst_margin", worst},  {"seed", s.seed}};
}

Json to_json(const EstimateWithError& e) {
  return Json{{"mean", e.mean}, {"std_error", e.std_error}, {"n_samples", e.n_samples}};
}

const std::vector<std::string>& sweep_csv_columns() {
  static const std::vector<std::string> cols{
      "dim",      "sample",   "purity",     "M_l",        "S",          "Q",          "M_g",
      "rms_avg_l2", "avg_r",  "avg_sk",     "max_l2",     "max_r",      "max_sk",     "res_t1_rms",
      "res_t1_max", "res_t2_avg", "res_t2_max", "res_t3_avg", "res_t3_max"};
  return cols;
}

std::string sweep_csv_header() {
  std::string out;
  for (const auto& c : sweep_csv_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::string sweep_csv_row(long sample, const TradeoffReport& r) {
  std::string out = std::to_string(r.dim) + ',' + std::to_string(sample);
  for (double v : {r.purity, r.M_l, r.S, r.Q, r.M_g, r.rms_avg_l2, r.avg_r, r.avg_sk, r.max_l2, r.max_r, r.max_sk,
                   r.residual_t1_rms, r.residual_t1_max, r.residual_t2_avg, r.residual_t2_max, r.residual_t3_avg,
                   r.residual_t3_max}) {
    out += ',';
    out += format_real(v);
  }
  return out;
}

SweepCsvRecord parse_sweep_csv_row(std::string_view line) {
  std::vector<double> fields;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t comma = line.find(',', pos);
    const std::string_view tok = line.substr(pos, comma == std::string_view::npos ? line.size() - pos : comma - pos);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw Error(ErrorKind::ParseError, "bad CSV field '" + std::string(tok) + "'");
    }
    fields.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (fields.size() != sweep_csv_columns().size()) throw Error(ErrorKind::ParseError, "wrong CSV column count");

  SweepCsvRecord rec;
  TradeoffReport& r = rec.report;
  r.dim = static_cast<int>(fields[0]);
  rec.sample = static_cast<long>(fields[1]);
  double* targets[] = {&r.purity, &r.M_l, &r.S, &r.Q, &r.M_g, &r.rms_avg_l2, &r.avg_r, &r.avg_sk, &r.max_l2,
                       &r.max_r, &r.max_sk, &r.residual_t1_rms, &r.residual_t1_max, &r.residual_t2_avg,
                       &r.residual_t2_max, &r.residual_t3_avg, &r.residual_t3_max};
  for (std::size_t k = 0; k < std::size(targets); ++k) *targets[k] = fields[k + 2];
  return rec;
}

}  // namespace coherelab
