#include "irstt/csv.hpp"

#include "irstt/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

namespace irstt {

std::string format_real(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, std::vector<TrialRecord> records, bool record_wall_time)
{
    std::stable_sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return std::tie(a.value, a.solver, a.trial) < std::tie(b.value, b.solver, b.trial);
    });
    out << kTrialCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.sweep_param << ',' << format_real(r.value) << ',' << r.trial << ',' << r.solver << ','
            << format_real(r.error_abs) << ',' << format_real(r.error_rel) << ',' << r.iterations << ','
            << format_real(record_wall_time ? r.wall_time_ms : 0.0) << ',' << r.seed << ',' << r.status
            << '\n';
    }
}

void write_file(const std::string& path, const std::string& content)
{
    const std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
        }
    }
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    f << content;
    f.flush();
    if (!f) {
        throw IoError("write to '" + path + "' failed");
    }
}

void write_csv(const std::vector<TrialRecord>& records, const std::string& path, bool record_wall_time)
{
    std::ostringstream s;
    write_csv(s, records, record_wall_time);
    write_file(path, s.str());
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows,
                         const std::string& sweep_param)
{
    out << "sweep_param,value,solver,trials,failures,mean_error_abs,mean_error_rel\n";
    for (const auto& r : rows) {
        out << sweep_param << ',' << format_real(r.value) << ',' << r.solver << ',' << r.trials << ','
            << r.failures << ',' << format_real(r.mean_error_abs) << ',' << format_real(r.mean_error_rel)
            << '\n';
    }
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& sweep_param,
                         const std::string& path)
{
    std::ostringstream s;
    write_aggregate_csv(s, rows, sweep_param);
    write_file(path, s.str());
}

} // namespace irstt
