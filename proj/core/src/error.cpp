#include "hvs/error.hpp"

#include <fmt/format.h>

namespace hvs {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : InputError(fmt::format("{}:{}: {}", source, line, what)), line_(line) {}

}  // namespace hvs
