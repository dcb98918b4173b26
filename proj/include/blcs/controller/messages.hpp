#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "blcs/common/types.hpp"
#include "blcs/fron/spectrum.hpp"

namespace blcs::ctl {

/// A physical event as the handling controller knows it.
struct EventInfo {
  std::string event_id;  // P_id
  Tick t = 0;
  std::string location;     // identification token of the object involved
  std::string affair_type;  // behavior token
};

struct DisclosurePolicy {
  bool include_event_id = false;
  bool include_time = true;
  bool include_location = true;
  bool include_affair = true;
  bool event_id_private = true;
  /// Slots exposed per spectrum fragment; 0 sends no fragment.
  int fragment_slots = 0;
};

/// Slot states of one link relative to one lightpath: occupied where that
/// lightpath sits, free where it does not, unknown outside the exposed window.
struct SpectrumFragment {
  LightpathId lightpath = 0;
  LinkId link = 0;
  fron::SlotStates states;
};

/// Resources the sender proposes for a route through its domain.
struct CandidateResources {
  std::vector<LinkId> links;
  fron::SlotInterval slots;
};

struct PartialInfo {
  ControllerId sender = 0;
  std::uint64_t nonce = 0;
  std::optional<std::string> event_id;
  std::optional<Tick> t;
  std::optional<std::string> location;
  std::optional<std::string> affair_type;
  std::vector<SpectrumFragment> fragments;
  std::optional<CandidateResources> candidate;
};

/// Throws PrivacyViolation for a private P_id or a fragment without unknown slots.
void check_privacy(const PartialInfo& info, bool event_id_private);

enum class MessageType { AUTH_REQ, AUTH_RESP, SYNC };

std::string_view to_string(MessageType t) noexcept;

inline constexpr int kMessageVersion = 1;

nlohmann::json to_json(const PartialInfo& info);
/// Throws InvalidInput on malformed input.
PartialInfo partial_info_from_json(const nlohmann::json& j);

/// {type, sender, nonce, payload, version}
nlohmann::json auth_message(MessageType type, ControllerId sender, std::uint64_t nonce, nlohmann::json payload);

}  // namespace blcs::ctl
