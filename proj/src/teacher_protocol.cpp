#include "argos/teacher/protocol.hpp"

namespace argos::teacher {

using nlohmann::json;

json media_to_json(const MediaRef& m) {
    json j{{"id", m.id}};
    if (m.frame) j["frame"] = *m.frame;
    return j;
}

MediaRef media_from_json(const json& j) {
    MediaRef m;
    m.id = j.at("id").get<std::string>();
    if (j.contains("frame") && !j["frame"].is_null()) m.frame = j["frame"].get<int>();
    return m;
}

json mask_to_json(const Mask& m) {
    return json{{"width", m.width()}, {"height", m.height()}, {"rows", m.rle_rows()}};
}

Mask mask_from_json(const json& j) {
    return Mask::from_rle(j.at("width").get<int>(), j.at("height").get<int>(),
                          j.at("rows").get<std::vector<std::vector<int>>>());
}

}  // namespace argos::teacher
