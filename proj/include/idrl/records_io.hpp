#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "idrl/experiment.hpp"

namespace idrl {

inline constexpr const char* kRecordsHeader =
    "seed,iteration,acquisition,env,query_id,response,regret,mse,cosine,wall_time_ms";
inline constexpr const char* kSummaryHeader =
    "acquisition,env,iteration,count,regret_mean,regret_se,mse_mean,mse_se,cosine_mean,cosine_se";

/// Floats are written with 17 significant digits, so parsing restores them exactly.
void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_csv(std::istream& in);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

void write_records_file(const std::string& path, const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> read_records_file(const std::string& path);

}  // namespace idrl
