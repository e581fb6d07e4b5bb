#include "mildito/cli/run.hpp"

#include "mildito/cli/suites.hpp"
#include "mildito/errors.hpp"

#include <filesystem>
#include <fstream>

namespace mildito::cli {

namespace {

void write_outputs(const ExperimentConfig& c, const RunResult& result) {
    const std::filesystem::path dir(c.out);
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "report.csv", std::ios::binary);
        write_csv(csv, result.rows);
    }
    auto summary = summary_json(to_json(c), result.rows, result.exit_code);
    if (!result.error.empty()) summary["error"] = result.error;
    std::ofstream json(dir / "summary.json");
    json << summary.dump(2) << '\n';
}

}  // namespace

RunResult run(const ExperimentConfig& c, std::ostream& log) {
    RunResult result;
    try {
        validate(c);
        for (const auto& suite : c.suites()) {
            log << "[" << suite << "] running\n";
            auto rows = run_suite(suite, c);
            std::size_t failed = 0;
            for (const auto& r : rows) {
                if (!r.pass()) {
                    ++failed;
                    log << "  FAIL " << r.check << ": lhs=" << format_number(r.lhs) << " rhs=" << format_number(r.rhs)
                        << " tolerance=" << format_number(r.tolerance) << '\n';
                }
            }
            log << "[" << suite << "] " << rows.size() - failed << "/" << rows.size() << " passed\n";
            result.rows.insert(result.rows.end(), rows.begin(), rows.end());
        }
        result.exit_code = kAllPassed;
        for (const auto& r : result.rows)
            if (!r.pass()) result.exit_code = kChecksFailed;
    } catch (const BlowUpError& e) {
        result.exit_code = kBlowUp;
        result.error = e.what();
    } catch (const ConfigError& e) {
        result.exit_code = kBadInput;
        result.error = e.what();
    } catch (const HypothesisViolatedError& e) {
        result.exit_code = kBadInput;
        result.error = e.what();
    } catch (const DomainError& e) {
        result.exit_code = kBadInput;
        result.error = e.what();
    }
    if (!result.error.empty()) {
        log << "error: " << result.error << '\n';
        result.rows.clear();
    }
    write_outputs(c, result);
    return result;
}

}  // namespace mildito::cli
