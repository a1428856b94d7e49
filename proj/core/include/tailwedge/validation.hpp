#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tailwedge::validation {

// One acceptance criterion outcome. `detail` carries the measured quantities
// so a failing line is actionable on its own.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    bool quick = false;      // reduced path counts / random-config counts
    std::string only;        // run a single named block ("" = all)
    std::string cli_path;    // enables the end-to-end CLI determinism check
};

// Runs the acceptance suite, printing one PASS/FAIL line per criterion.
std::vector<CriterionResult> run(const Options& options, std::ostream& out);

// 0 when every executed criterion passed, 1 otherwise.
int exit_code(const std::vector<CriterionResult>& results);

// Valid --only block names, in criterion order.
const std::vector<std::string>& block_names();

}  // namespace tailwedge::validation
