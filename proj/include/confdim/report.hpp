#pragma once

#include <json.hpp>

#include "confdim/modulus.hpp"

namespace confdim {

using Json = nlohmann::ordered_json;

// canonical shortest round-trip formatting; keeps JSON byte-stable
std::string format_double(double v);

// value, p, status, density histogram, constraint count
Json result_to_json(const ModulusResult& r);

std::string csv_header();
std::string csv_row(const std::string& ifs_name, int k, double p, double L,
                    const ModulusResult& r, double seconds);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Stable top-level report schema shared by the CLI subcommands.
Json make_report_skeleton(const std::string& tool, std::uint64_t ifs_hash, const Json& params);

}  // namespace confdim
