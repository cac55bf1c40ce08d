#pragma once

#include <string>
#include <vector>

namespace gridforge::detail {

struct RuleText {
    std::string id;
    std::string rule;
    std::string cell_at;
    std::string direct_solution;
    std::string valid_action;
    std::string cot_solution;
};

const std::vector<RuleText>& rule_texts();

} // namespace gridforge::detail
