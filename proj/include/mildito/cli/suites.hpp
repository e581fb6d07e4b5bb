#pragma once

#include "mildito/cli/config.hpp"
#include "mildito/cli/report.hpp"

#include <vector>

namespace mildito::cli {

std::vector<ReportRow> gamma_suite(const ExperimentConfig& c);
std::vector<ReportRow> nemytskii_suite(const ExperimentConfig& c);
std::vector<ReportRow> simulate_suite(const ExperimentConfig& c);
std::vector<ReportRow> ito_suite(const ExperimentConfig& c);
std::vector<ReportRow> dynkin_suite(const ExperimentConfig& c);
std::vector<ReportRow> weak_suite(const ExperimentConfig& c);

/// Runs one named suite (not "all").
std::vector<ReportRow> run_suite(const std::string& name, const ExperimentConfig& c);

/// Closed form of E||X_T||_H^2 for Y = 0 and constant Z:
/// ||S_{t0,T} X_0||^2 + sum_n (Z Z^T)_{nn} int_{t0}^T S_{s,T}(n)^2 ds.
double second_moment_closed_form(const MildItoProcessSpec& spec, const Matrix& z, double t0, double terminal);

}  // namespace mildito::cli
