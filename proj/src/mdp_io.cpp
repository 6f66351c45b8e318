#include "riskmdp/mdp_io.hpp"

#include "riskmdp/convert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/stat.h>

namespace riskmdp {

namespace {

const char* kHeader = "idstatefrom,idaction,idstateto,probability,reward";

struct CsvRow {
    int from, action, to;
    double prob, reward;
};

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

long parse_int(const std::string& s, const std::string& what, long lineno) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw model_error("line " + std::to_string(lineno) + ": cannot parse " + what + " '" +
                          s + "'");
    return v;
}

double parse_double(const std::string& s, const std::string& what, long lineno) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw model_error("line " + std::to_string(lineno) + ": cannot parse " + what + " '" +
                          s + "'");
    return v;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct ParsedRows {
    int n_states = 0;
    int n_actions = 0;
    std::vector<std::vector<std::vector<Transition>>> transitions;
    std::vector<indvec> admissible;
};

ParsedRows parse_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw model_error("cannot open '" + path + "'");

    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw model_error("'" + path + "' is empty");
    lineno++;
    // tolerate a trailing carriage return from foreign line endings
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw model_error("line 1: expected header '" + std::string(kHeader) + "'");

    std::vector<CsvRow> rows;
    int max_state = -1, max_action = -1;
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_commas(line);
        if (fields.size() != 5)
            throw model_error("line " + std::to_string(lineno) + ": expected 5 fields, got " +
                              std::to_string(fields.size()));
        CsvRow r;
        r.from = int(parse_int(fields[0], "idstatefrom", lineno));
        r.action = int(parse_int(fields[1], "idaction", lineno));
        r.to = int(parse_int(fields[2], "idstateto", lineno));
        r.prob = parse_double(fields[3], "probability", lineno);
        r.reward = parse_double(fields[4], "reward", lineno);
        if (r.from < 0 || r.action < 0 || r.to < 0)
            throw model_error("line " + std::to_string(lineno) + ": negative id");
        if (r.prob < 0.0 || r.prob > 1.0)
            throw model_error("line " + std::to_string(lineno) + ": probability out of range");
        rows.push_back(r);
        max_state = std::max({max_state, r.from, r.to});
        max_action = std::max(max_action, r.action);
    }
    if (rows.empty()) throw model_error("'" + path + "' has no transition rows");

    ParsedRows out;
    out.n_states = max_state + 1;
    out.n_actions = max_action + 1;

    // sum duplicate (s,a,s') keys
    std::map<std::tuple<int, int, int>, std::pair<double, double>> acc;
    for (const auto& r : rows) {
        auto key = std::make_tuple(r.from, r.action, r.to);
        auto it = acc.find(key);
        if (it == acc.end())
            acc[key] = {r.prob, r.reward};
        else {
            it->second.first += r.prob;
            it->second.second = r.reward;
        }
    }
    out.transitions.assign(out.n_states, std::vector<std::vector<Transition>>(out.n_actions));
    out.admissible.assign(out.n_states, {});
    for (const auto& [key, pr] : acc) {
        auto [s, a, to] = key;
        out.transitions[s][a].push_back({to, pr.first, pr.second});
    }
    for (int s = 0; s < out.n_states; s++)
        for (int a = 0; a < out.n_actions; a++)
            if (!out.transitions[s][a].empty()) out.admissible[s].push_back(a);
    return out;
}

} // namespace

TransientMdp load_mdp_csv(const std::string& path, std::optional<int> sink_opt) {
    ParsedRows parsed = parse_rows(path);

    TransientMdp mdp;
    mdp.n_states = parsed.n_states;
    mdp.n_actions = parsed.n_actions;
    mdp.transitions = std::move(parsed.transitions);
    mdp.admissible = std::move(parsed.admissible);
    mdp.sink = sink_opt.value_or(mdp.n_states - 1);
    if (mdp.sink < 0 || mdp.sink >= mdp.n_states)
        throw model_error("sink index " + std::to_string(mdp.sink) + " out of range");

    // sink must be present and absorbing
    bool sink_ok = !mdp.admissible[mdp.sink].empty();
    for (int a : mdp.admissible[mdp.sink]) {
        const auto& row = mdp.transitions[mdp.sink][a];
        if (row.size() != 1 || row[0].to != mdp.sink ||
            std::fabs(row[0].prob - 1.0) > PROB_TOL)
            sink_ok = false;
    }
    if (!sink_ok)
        throw model_error("state " + std::to_string(mdp.sink) +
                          " is missing an absorbing sink self-loop");

    int nonsink = mdp.n_nonsink();
    mdp.initial_dist.assign(mdp.n_states, 0.0);
    for (int s = 0; s < mdp.n_states; s++)
        if (s != mdp.sink) mdp.initial_dist[s] = 1.0 / double(nonsink);
    return mdp;
}

void save_mdp_csv(const TransientMdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw model_error("cannot write '" + path + "'");
    out << kHeader << "\n";
    for (int s = 0; s < mdp.n_states; s++)
        for (int a : mdp.admissible[s])
            for (const auto& t : mdp.transitions[s][a])
                out << s << ',' << a << ',' << t.to << ',' << fmt17(t.prob) << ','
                    << fmt17(t.reward) << "\n";
}

void load_initial_dist_csv(TransientMdp& mdp, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw model_error("cannot open '" + path + "'");
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw model_error("'" + path + "' is empty");
    lineno++;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "idstate,probability")
        throw model_error("line 1: expected header 'idstate,probability'");
    numvec mu(mdp.n_states, 0.0);
    while (std::getline(in, line)) {
        lineno++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_commas(line);
        if (fields.size() != 2)
            throw model_error("line " + std::to_string(lineno) + ": expected 2 fields");
        long s = parse_int(fields[0], "idstate", lineno);
        double p = parse_double(fields[1], "probability", lineno);
        if (s < 0 || s >= mdp.n_states)
            throw model_error("line " + std::to_string(lineno) + ": state id out of range");
        mu[s] = p;
    }
    mdp.initial_dist = mu;
}

void save_initial_dist_csv(const TransientMdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw model_error("cannot write '" + path + "'");
    out << "idstate,probability\n";
    for (int s = 0; s < mdp.n_states; s++)
        if (mdp.initial_dist[s] != 0.0) out << s << ',' << fmt17(mdp.initial_dist[s]) << "\n";
}

void save_metadata(const TransientMdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw model_error("cannot write '" + path + "'");
    out << "sink=" << mdp.sink << "\n";
    out << "n_states=" << mdp.n_states << "\n";
    out << "n_actions=" << mdp.n_actions << "\n";
}

void save_model_bundle(const TransientMdp& mdp, const std::string& prefix) {
    save_mdp_csv(mdp, prefix + ".csv");
    save_initial_dist_csv(mdp, prefix + "_initial.csv");
    save_metadata(mdp, prefix + "_meta.txt");
}

DiscountedMdp load_discounted_csv(const std::string& path) {
    ParsedRows parsed = parse_rows(path);
    DiscountedMdp out;
    out.n_states = parsed.n_states;
    out.n_actions = parsed.n_actions;
    out.transitions = std::move(parsed.transitions);
    out.admissible = std::move(parsed.admissible);
    out.initial_dist.assign(out.n_states, 1.0 / double(out.n_states));
    return out;
}

TransientMdp load_model_bundle(const std::string& prefix) {
    std::optional<int> sink;
    std::ifstream meta(prefix + "_meta.txt");
    if (meta) {
        std::string line;
        while (std::getline(meta, line))
            if (line.rfind("sink=", 0) == 0) sink = std::atoi(line.c_str() + 5);
    }
    TransientMdp mdp = load_mdp_csv(prefix + ".csv", sink);
    struct stat st {};
    if (stat((prefix + "_initial.csv").c_str(), &st) == 0)
        load_initial_dist_csv(mdp, prefix + "_initial.csv");
    return mdp;
}

} // namespace riskmdp
