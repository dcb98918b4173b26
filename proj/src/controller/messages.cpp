#include "blcs/controller/messages.hpp"

#include "blcs/common/error.hpp"

namespace blcs::ctl {

void check_privacy(const PartialInfo& info, bool event_id_private) {
  if (event_id_private && info.event_id) throw PrivacyViolation("partial info carries a private event id");
  for (const auto& f : info.fragments)
    if (!fron::has_unknown(f.states))
      throw PrivacyViolation("fragment on link " + std::to_string(f.link) + " exposes every slot");
}

std::string_view to_string(MessageType t) noexcept {
  switch (t) {
    case MessageType::AUTH_REQ: return "AUTH_REQ";
    case MessageType::AUTH_RESP: return "AUTH_RESP";
    case MessageType::SYNC: return "SYNC";
  }
  return "?";
}

namespace {

std::string encode_states(const fron::SlotStates& s) {
  std::string out(s.size(), '?');
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == fron::SlotState::free) out[i] = 'f';
    if (s[i] == fron::SlotState::occupied) out[i] = 'o';
  }
  return out;
}

fron::SlotStates decode_states(const std::string& s) {
  fron::SlotStates out(s.size(), fron::SlotState::unknown);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == 'f') out[i] = fron::SlotState::free;
    else if (s[i] == 'o') out[i] = fron::SlotState::occupied;
    else if (s[i] != '?') throw InvalidInput("bad slot state character");
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const PartialInfo& info) {
  nlohmann::json j;
  j["sender"] = info.sender;
  j["nonce"] = info.nonce;
  if (info.event_id) j["event_id"] = *info.event_id;
  if (info.t) j["t"] = *info.t;
  if (info.location) j["location"] = *info.location;
  if (info.affair_type) j["affair_type"] = *info.affair_type;
  j["fragments"] = nlohmann::json::array();
  for (const auto& f : info.fragments)
    j["fragments"].push_back({{"lightpath", f.lightpath}, {"link", f.link}, {"states", encode_states(f.states)}});
  if (info.candidate)
    j["candidate"] = {{"links", info.candidate->links}, {"lo", info.candidate->slots.lo}, {"hi", info.candidate->slots.hi}};
  return j;
}

PartialInfo partial_info_from_json(const nlohmann::json& j) {
  try {
    PartialInfo p;
    p.sender = j.at("sender").get<ControllerId>();
    p.nonce = j.at("nonce").get<std::uint64_t>();
    if (j.contains("event_id")) p.event_id = j["event_id"].get<std::string>();
    if (j.contains("t")) p.t = j["t"].get<Tick>();
    if (j.contains("location")) p.location = j["location"].get<std::string>();
    if (j.contains("affair_type")) p.affair_type = j["affair_type"].get<std::string>();
    for (const auto& f : j.value("fragments", nlohmann::json::array()))
      p.fragments.push_back({f.at("lightpath").get<LightpathId>(), f.at("link").get<LinkId>(),
                             decode_states(f.at("states").get<std::string>())});
    if (j.contains("candidate")) {
      const auto& c = j["candidate"];
      p.candidate = CandidateResources{c.at("links").get<std::vector<LinkId>>(),
                                       {c.at("lo").get<int>(), c.at("hi").get<int>()}};
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("partial info: ") + e.what());
  }
}

nlohmann::json auth_message(MessageType type, ControllerId sender, std::uint64_t nonce, nlohmann::json payload) {
  return {{"type", to_string(type)},
          {"sender", sender},
          {"nonce", nonce},
          {"payload", std::move(payload)},
          {"version", kMessageVersion}};
}

}  // namespace blcs::ctl
