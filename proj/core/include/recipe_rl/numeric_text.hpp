#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace recipe_rl {

// Shortest decimal text that parses back to the identical double.
std::string formatReal(double value);

// Parses the whole of `text` as a double. Returns false on any trailing junk.
bool parseReal(std::string_view text, double& out);

std::vector<std::string_view> splitFields(std::string_view line, char sep = ',');

std::string_view trim(std::string_view text);

}  // namespace recipe_rl
