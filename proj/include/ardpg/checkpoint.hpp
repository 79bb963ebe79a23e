#pragma once

#include <string>

#include "ardpg/agent.hpp"
#include "ardpg/critic.hpp"

namespace ardpg {

/// Versioned textual parameter dumps. Field order is fixed: header line,
/// scalar fields, then parameter blocks; numbers use full round-trip
/// precision.
void save_critic(const CriticState& cs, std::uint64_t step, const std::string& path);
CriticState load_critic(const std::string& path, std::uint64_t* step = nullptr);

void save_agent(const AroDdpgAgent& agent, const std::string& path);
AroDdpgAgent load_agent(const std::string& path);

}  // namespace ardpg
