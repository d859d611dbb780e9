#include "mehc/io.hpp"

#include "json_util.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mehc {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::ParseError, where + ": " + what);
}

const json& require_key(const json& object, const char* key) {
    auto it = object.find(key);
    if (it == object.end()) parse_fail(key, "missing key");
    return *it;
}

double as_number(const json& value, const std::string& where) {
    if (!value.is_number()) parse_fail(where, "expected a number");
    return value.get<double>();
}

const json& as_array(const json& value, const std::string& where, std::size_t expected) {
    if (!value.is_array()) parse_fail(where, "expected an array");
    if (value.size() != expected)
        parse_fail(where, "expected " + std::to_string(expected) + " entries, got " +
                              std::to_string(value.size()));
    return value;
}

std::vector<std::string> as_names(const json& value, const char* key) {
    if (!value.is_array() || value.empty()) parse_fail(key, "expected a non-empty array of names");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_string())
            parse_fail(std::string(key) + "[" + std::to_string(i) + "]", "expected a string");
        names.push_back(value[i].get<std::string>());
    }
    return names;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
    }
}

std::string index_path(const char* key, std::initializer_list<std::size_t> indices) {
    std::string path = key;
    for (auto i : indices) path += "[" + std::to_string(i) + "]";
    return path;
}

json matrix_json(const SquareMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.n; ++j) row.push_back(detail::rounded_number(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

namespace detail {

json rounded_number(double value) {
    if (std::isnan(value)) return nullptr;
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return std::stod(format_number(value));
}

} // namespace detail

MdpFile with_default_names(Mdp mdp) {
    MdpFile file{std::move(mdp), {}, {}};
    for (std::size_t s = 0; s < file.mdp.n_states(); ++s) file.states.push_back("s" + std::to_string(s));
    for (std::size_t a = 0; a < file.mdp.n_actions(); ++a) file.actions.push_back("a" + std::to_string(a));
    return file;
}

MdpFile parse_mdp(const std::string& text) {
    const json root = parse_json(text);
    if (!root.is_object()) parse_fail("<root>", "expected an object");

    const double r_max = as_number(require_key(root, "r_max"), "r_max");
    const json& model = require_key(root, "reward_model");
    RewardModel reward_model;
    if (model == "deterministic")
        reward_model = RewardModel::Deterministic;
    else if (model == "bernoulli")
        reward_model = RewardModel::BernoulliScaled;
    else
        parse_fail("reward_model", "expected \"deterministic\" or \"bernoulli\"");

    auto states = as_names(require_key(root, "states"), "states");
    auto actions = as_names(require_key(root, "actions"), "actions");
    const std::size_t S = states.size();
    const std::size_t A = actions.size();

    const json& transition = as_array(require_key(root, "transition"), "transition", S);
    const json& reward = as_array(require_key(root, "mean_reward"), "mean_reward", S);
    std::vector<double> p(S * A * S), r(S * A);
    for (std::size_t s = 0; s < S; ++s) {
        const json& t_s = as_array(transition[s], index_path("transition", {s}), A);
        const json& r_s = as_array(reward[s], index_path("mean_reward", {s}), A);
        for (std::size_t a = 0; a < A; ++a) {
            const json& row = as_array(t_s[a], index_path("transition", {s, a}), S);
            for (std::size_t j = 0; j < S; ++j)
                p[(s * A + a) * S + j] = as_number(row[j], index_path("transition", {s, a, j}));
            r[s * A + a] = as_number(r_s[a], index_path("mean_reward", {s, a}));
        }
    }
    return {Mdp(S, A, std::move(p), std::move(r), reward_model, r_max), std::move(states),
            std::move(actions)};
}

MdpFile load_mdp(const std::filesystem::path& path) {
    return parse_mdp(read_file(path));
}

std::string dump_mdp(const MdpFile& file) {
    const Mdp& mdp = file.mdp;
    json root;
    root["r_max"] = mdp.r_max();
    root["reward_model"] = mdp.reward_model() == RewardModel::Deterministic ? "deterministic" : "bernoulli";
    root["states"] = file.states;
    root["actions"] = file.actions;
    json transition = json::array(), reward = json::array();
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        json t_s = json::array(), r_s = json::array();
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            auto row = mdp.row(s, a);
            t_s.push_back(std::vector<double>(row.begin(), row.end()));
            r_s.push_back(mdp.mean_reward(s, a));
        }
        transition.push_back(std::move(t_s));
        reward.push_back(std::move(r_s));
    }
    root["transition"] = std::move(transition);
    root["mean_reward"] = std::move(reward);
    return root.dump(2) + "\n";
}

void save_mdp(const std::filesystem::path& path, const MdpFile& file) {
    write_file(path, dump_mdp(file));
}

Potential parse_potential(const std::string& text) {
    const json root = parse_json(text);
    if (!root.is_object()) parse_fail("<root>", "expected an object");
    const json& phi = require_key(root, "phi");
    if (!phi.is_array()) parse_fail("phi", "expected an array");
    Potential potential;
    for (std::size_t i = 0; i < phi.size(); ++i)
        potential.phi.push_back(as_number(phi[i], index_path("phi", {i})));
    return potential;
}

Potential load_potential(const std::filesystem::path& path) {
    return parse_potential(read_file(path));
}

std::string dump_potential(const Potential& potential) {
    json root;
    root["phi"] = potential.phi;
    return root.dump() + "\n";
}

std::string format_number(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

std::string dump_report(const StructuralReport& report) {
    json root;
    root["diameter"] = detail::rounded_number(report.diameter);
    root["mehc"] = detail::rounded_number(report.mehc);
    root["optimal_gain"] = detail::rounded_number(report.optimal_gain);
    root["bias_span"] = detail::rounded_number(report.bias_span);
    root["hitting_time"] = matrix_json(report.hitting_time);
    root["hitting_cost"] = matrix_json(report.hitting_cost);
    return root.dump(2) + "\n";
}

std::string trace_csv(const RegretTrace& trace, std::size_t thin) {
    if (thin == 0) throw Error(ErrorKind::InvalidArgument, "thin must be at least 1");
    std::string out = "t,cumulative_reward,regret,episode\n";
    const std::size_t n = trace.records.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = trace.records[i];
        if (r.t % thin != 0 && i + 1 != n) continue;
        out += std::to_string(r.t);
        out += ',';
        out += format_number(r.cumulative_reward);
        out += ',';
        out += format_number(r.regret);
        out += ',';
        out += std::to_string(r.episode);
        out += '\n';
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

} // namespace mehc
