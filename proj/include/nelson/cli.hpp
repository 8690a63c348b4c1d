#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nelson::cli {

using Settings = std::map<std::string, std::string>;

// Flat "key = value" text with dotted sections; '#' starts a comment.
Settings parse_config_text(const std::string& text, const std::string& origin = "config");
Settings load_config_file(const std::string& path);

// FNV-1a 64 over the canonical "key=value\n" listing.
std::uint64_t config_hash(const Settings& s);

// "a:b:n" (n points, both ends) or a comma list.
std::vector<double> parse_time_grid(const std::string& text);
std::vector<double> parse_list(const std::string& text);

// Entry point of the nelson-fk tool; returns the process exit code.
int run(int argc, char** argv);

}  // namespace nelson::cli
