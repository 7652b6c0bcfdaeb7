#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qcoef/ifs.hpp"

namespace qcoef {

/// JSON system-spec text. Floating-point values are written in shortest
/// round-trip form, so read_system(write_system(d)) == d.
std::string write_system(const SystemDescription& desc);
SystemDescription read_system(const std::string& text);

SystemDescription read_system_file(const std::filesystem::path& path);
void write_system_file(const SystemDescription& desc, const std::filesystem::path& path);

/// Names accepted by builtin_system.
std::vector<std::string> builtin_system_names();

/// dyadic: s_j = p_j = 2^-j on [0,1], touching images (thermodynamics only).
/// gamma3: s_j = 3^-j, p_j = 2^-j on [0,1], S_j(x) = s_j x + 2 s_j.
/// disk-gamma / paper-gamma3: s_j = 3^-j, p_j = 2^-j, sub-disks of the unit
///   disk on golden-angle shells.
/// uniform4: four maps of ratio 1/5 on [0,1], equal weights.
SystemDescription builtin_system(const std::string& name);

/// Resolves a path, a file in `search_dir`, or a builtin name (an optional
/// ".spec" suffix and directory are ignored for builtins), then constructs
/// the system and checks the pressure finiteness condition.
InfiniteIFS load_system(const std::string& path_or_name,
                        const std::filesystem::path& search_dir = {});

}  // namespace qcoef
