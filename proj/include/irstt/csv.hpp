#pragma once

#include "irstt/analysis.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace irstt {

inline constexpr const char* kTrialCsvHeader =
    "sweep_param,value,trial,solver,error_abs,error_rel,iterations,wall_time_ms,seed,status";

// Scientific notation, 17 significant digits; nan and inf spelled out.
std::string format_real(double v);

// Records are written sorted by (value, solver, trial). wall_time_ms is
// written as 0 unless record_wall_time is set, so files stay byte-identical.
void write_csv(std::ostream& out, std::vector<TrialRecord> records, bool record_wall_time = false);
void write_csv(const std::vector<TrialRecord>& records, const std::string& path,
               bool record_wall_time = false);

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                         const std::string& sweep_param);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& sweep_param,
                         const std::string& path);

// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_file(const std::string& path, const std::string& content);

} // namespace irstt
