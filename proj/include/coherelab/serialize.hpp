#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "coherelab/closedforms.hpp"
#include "coherelab/qstate.hpp"
#include "coherelab/verify.hpp"

namespace coherelab {

using Json = nlohmann::json;

/// 17 significant digits with '.' as decimal point, independent of locale.
std::string format_real(double v);

/// { "dim": d, "re": [[...]], "im": [[...]] }, row-major.
Json matrix_to_json(const ComplexMatrix& m);
/// Throws ParseError on schema violations.
ComplexMatrix matrix_from_json(const Json& j);
DensityMatrix density_from_json(const Json& j);
MeasurementBasis basis_from_json(const Json& j);

Json to_json(const TradeoffReport& r);
Json to_json(const TradeoffSweepSummary& s);
Json to_json(const EstimateWithError& e);

/// Fixed sweep column order.
const std::vector<std::string>& sweep_csv_columns();
std::string sweep_csv_header();
std::string sweep_csv_row(long sample, const TradeoffReport& r);

/// One parsed sweep row; `report` holds the stored values verbatim.
struct SweepCsvRecord {
  long sample = 0;
  TradeoffReport report;
};
SweepCsvRecord parse_sweep_csv_row(std::string_view line);

}  // namespace coherelab
