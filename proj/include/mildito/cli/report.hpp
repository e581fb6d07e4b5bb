#pragma once

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace mildito::cli {

inline constexpr int kSchemaVersion = 1;

/// eq: violation = |lhs - rhs|; le: max(0, lhs - rhs); ge: max(0, rhs - lhs).
enum class Relation { eq, le, ge };

struct ReportRow {
    std::string suite;
    std::string check;
    Relation relation = Relation::eq;
    double lhs = 0.0;
    double rhs = 0.0;
    double stderr_value = 0.0;
    double tolerance = 0.0;
    double wall_seconds = 0.0;  // goes to summary.json only

    double violation() const;
    bool pass() const { return violation() <= tolerance; }
};

ReportRow make_row(std::string suite, std::string check, Relation relation, double lhs, double rhs,
                   double stderr_value, double tolerance);

const char* relation_name(Relation r);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);
/// %.17g, with nan/inf spelled out.
std::string format_number(double v);

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows);

nlohmann::json summary_json(const nlohmann::json& config, const std::vector<ReportRow>& rows, int exit_code);

}  // namespace mildito::cli
