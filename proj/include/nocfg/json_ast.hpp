#pragma once

// JSON encoding of a lowered Program, the alternate input format. The field
// reference lives in docs/json-ast.md.

#include "nocfg/ir.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace nocfg {

class JsonAstError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string program_to_json(const Program &program);

/// Throws JsonAstError on malformed documents or inconsistent programs.
Program program_from_json(std::string_view text);

} // namespace nocfg
