#pragma once

// Text formats: MDP and potential files (JSON syntax), structural reports,
// and regret traces (CSV).

#include "mehc/mdp.hpp"
#include "mehc/shaping.hpp"
#include "mehc/solve.hpp"
#include "mehc/ucrl2.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mehc {

/// An MDP together with the names its file gives to states and actions.
struct MdpFile {
    Mdp mdp;
    std::vector<std::string> states;
    std::vector<std::string> actions;
};

/// Names "s0", "s1", ... and "a0", "a1", ...
MdpFile with_default_names(Mdp mdp);

/// Parses the MDP file format. Missing keys, wrong types and ragged arrays
/// raise Error(ParseError) with the offending coordinate, e.g. `transition[1][0]`.
MdpFile parse_mdp(const std::string& text);
MdpFile load_mdp(const std::filesystem::path& path);

/// Numbers are written with round-trip precision.
std::string dump_mdp(const MdpFile& file);
void save_mdp(const std::filesystem::path& path, const MdpFile& file);

Potential parse_potential(const std::string& text);
Potential load_potential(const std::filesystem::path& path);
std::string dump_potential(const Potential& potential);

/// 12 significant digits; +inf prints as "inf".
std::string format_number(double value);

/// JSON text with keys diameter, mehc, optimal_gain, bias_span, hitting_time,
/// hitting_cost. Numbers carry 12 significant digits, +inf is the string "inf".
std::string dump_report(const StructuralReport& report);

/// CSV with header `t,cumulative_reward,regret,episode`. With thin > 1 only
/// every thin-th step and the final step are written.
std::string trace_csv(const RegretTrace& trace, std::size_t thin = 1);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

} // namespace mehc
