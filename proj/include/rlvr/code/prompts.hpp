#pragma once

#include <string>

namespace rlvr::code {

/// Evaluation instructions appended to a problem statement.
inline const std::string kMathInstruction =
    "Please reason step by step, and put your final answer within \\boxed{}.";

inline const std::string kCodeInstructionNoStarter =
    "Write Python code to solve the problem. Please place the solution code in \n"
    "the following format:\n"
    "```python\n"
    "# Your solution code here\n"
    "```";

inline std::string code_instruction_with_header(const std::string& starter_code) {
  return "Solve the problem starting with the provided function header.\n"
         "\n"
         "Function header:\n"
         "``` \n" +
         starter_code +
         "\n```\n"
         "Please place the solution code in the following format:\n"
         "```python\n"
         "# Your solution code here\n"
         "```";
}

}  // namespace rlvr::code
