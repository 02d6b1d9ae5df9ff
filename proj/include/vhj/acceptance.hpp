#pragma once
// The acceptance suite: thirteen scripted criteria covering the solver core,
// the gradient and oscillation bounds, the structural Hamiltonian facts, and
// the reproducibility contract, each reported as one pass/fail line.

#include <iosfwd>
#include <string>
#include <vector>

namespace vhj::acceptance {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    // a failure whose signature matches the documented discrete gradient
    // floor (see README); counted separately from unexpected failures
    bool known_limitation = false;
    std::string detail;
};

// run criterion `only` (1..13), or all of them when only == 0, printing one
// line per criterion to `out`
std::vector<CriterionResult> run_all(std::ostream& out, int only = 0);

int unexpected_failures(const std::vector<CriterionResult>& results);

} // namespace vhj::acceptance
