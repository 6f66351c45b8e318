#pragma once

#include <optional>
#include <string>

#include "riskmdp/mdp.hpp"

namespace riskmdp {

/**
 * Loads an MDP from a CSV file with header
 * `idstatefrom,idaction,idstateto,probability,reward` and 0-based ids.
 * Rows sharing the same (s,a,s') key are summed, which supports sparse
 * authoring. The sink defaults to the largest state id unless given.
 * The admissible action set of a state is the set of actions that appear
 * in at least one of its rows.
 *
 * Throws model_error on a malformed row (with its line number), a
 * probability outside [0,1], or a missing sink self-loop. The initial
 * distribution is uniform over non-sink states; load_initial_dist_csv
 * replaces it from a companion file.
 */
TransientMdp load_mdp_csv(const std::string& path, std::optional<int> sink = std::nullopt);

/// Writes the transition table with 17 significant digits so that
/// serialize-then-parse reproduces every probability and reward bit for bit.
void save_mdp_csv(const TransientMdp& mdp, const std::string& path);

/// Companion CSV `idstate,probability`.
void load_initial_dist_csv(TransientMdp& mdp, const std::string& path);
void save_initial_dist_csv(const TransientMdp& mdp, const std::string& path);

/// Plain-text key=value sidecar: sink, n_states, n_actions.
void save_metadata(const TransientMdp& mdp, const std::string& path);

/// Full bundle: <prefix>.csv, <prefix>_initial.csv, <prefix>_meta.txt.
void save_model_bundle(const TransientMdp& mdp, const std::string& prefix);
TransientMdp load_model_bundle(const std::string& prefix);

} // namespace riskmdp
