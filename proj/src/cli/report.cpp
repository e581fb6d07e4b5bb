#include "mildito/cli/report.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <limits>

namespace mildito::cli {

double ReportRow::violation() const {
    if (std::isnan(lhs) || std::isnan(rhs)) return std::numeric_limits<double>::infinity();
    switch (relation) {
        case Relation::eq: return std::fabs(lhs - rhs);
        case Relation::le: return lhs <= rhs ? 0.0 : lhs - rhs;
        case Relation::ge: return lhs >= rhs ? 0.0 : rhs - lhs;
    }
    return 0.0;
}

ReportRow make_row(std::string suite, std::string check, Relation relation, double lhs, double rhs,
                   double stderr_value, double tolerance) {
    ReportRow r;
    r.suite = std::move(suite);
    r.check = std::move(check);
    r.relation = relation;
    r.lhs = lhs;
    r.rhs = rhs;
    r.stderr_value = stderr_value;
    r.tolerance = tolerance;
    return r;
}

const char* relation_name(Relation r) {
    switch (r) {
        case Relation::eq: return "eq";
        case Relation::le: return "le";
        case Relation::ge: return "ge";
    }
    return "eq";
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
    os << "suite,check,relation,lhs,rhs,stderr,tolerance,violation,verdict\r\n";
    for (const auto& r : rows) {
        os << csv_field(r.suite) << ',' << csv_field(r.check) << ',' << relation_name(r.relation) << ','
           << format_number(r.lhs) << ',' << format_number(r.rhs) << ',' << format_number(r.stderr_value) << ','
           << format_number(r.tolerance) << ',' << format_number(r.violation()) << ','
           << (r.pass() ? "pass" : "fail") << "\r\n";
    }
}

nlohmann::json summary_json(const nlohmann::json& config, const std::vector<ReportRow>& rows, int exit_code) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["config"] = config;
    j["seed"] = config.value("seed", 0);
    std::size_t passed = 0;
    nlohmann::json failed = nlohmann::json::array();
    nlohmann::json timings = nlohmann::json::object();
    for (const auto& r : rows) {
        if (r.pass())
            ++passed;
        else
            failed.push_back(r.suite + "/" + r.check);
        timings[r.suite + "/" + r.check] = r.wall_seconds;
    }
    j["totals"] = {{"checks", rows.size()}, {"passed", passed}, {"failed", rows.size() - passed}};
    j["failed_checks"] = failed;
    j["exit_code"] = exit_code;
    j["versions"] = {{"mildito", "1.0.0"},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                     {"compiler", __VERSION__}};
    j["timings"] = timings;
    return j;
}

}  // namespace mildito::cli
