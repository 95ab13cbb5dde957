#include "navgen/grammar.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "navgen/errors.hpp"

namespace navgen {

namespace {

const char* kNumberWords[] = {"zero", "one",  "two",   "three", "four",  "five",  "six",
                              "seven", "eight", "nine",  "ten",   "eleven", "twelve"};

std::string format_metres(double d) {
    char buf[32];
    if (d == std::floor(d)) {
        std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(d));
    } else {
        std::snprintf(buf, sizeof(buf), "%.1f", d);
    }
    return buf;
}

void replace_all(std::string& s, const std::string& key, const std::string& value) {
    for (std::size_t pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos)) {
        s.replace(pos, key.size(), value);
        pos += value.size();
    }
}

std::vector<std::string> require_list(const nlohmann::json& j, const std::string& key, int want) {
    const auto& arr = j.at(key);
    if (!arr.is_array() || static_cast<int>(arr.size()) != want) {
        throw InvalidConfigError("grammar: '" + key + "' must list exactly " +
                                 std::to_string(want) + " phrases");
    }
    std::vector<std::string> out;
    for (const auto& v : arr) out.push_back(v.get<std::string>());
    return out;
}

}  // namespace

Grammar Grammar::standard() {
    // Kept as a JSON literal so the built-in tables and a --grammar file go
    // through the same loader.
    static const char* kStandard = R"json({
  "variants": 3,
  "directions": {
    "1":  ["Turn slightly right toward 1 o'clock", "Angle slightly right toward 1 o'clock", "Bear toward your 1 o'clock"],
    "2":  ["Turn toward 2 o'clock", "Turn to your 2 o'clock", "Face 2 o'clock and continue"],
    "3":  ["Turn right toward 3 o'clock", "Turn right to your 3 o'clock", "Make a right toward 3 o'clock"],
    "4":  ["Turn toward 4 o'clock", "Turn to your 4 o'clock", "Face 4 o'clock and continue"],
    "5":  ["Turn toward 5 o'clock", "Turn to your 5 o'clock", "Face 5 o'clock and continue"],
    "6":  ["Turn around toward 6 o'clock", "Turn back toward 6 o'clock", "Turn around to face 6 o'clock"],
    "7":  ["Turn toward 7 o'clock", "Turn to your 7 o'clock", "Face 7 o'clock and continue"],
    "8":  ["Turn toward 8 o'clock", "Turn to your 8 o'clock", "Face 8 o'clock and continue"],
    "9":  ["Turn left toward 9 o'clock", "Turn left to your 9 o'clock", "Make a left toward 9 o'clock"],
    "10": ["Turn toward 10 o'clock", "Turn to your 10 o'clock", "Face 10 o'clock and continue"],
    "11": ["Turn slightly left toward 11 o'clock", "Angle slightly left toward 11 o'clock", "Bear toward your 11 o'clock"],
    "12": ["Continue straight ahead toward 12 o'clock", "Go straight ahead", "Head straight toward 12 o'clock"]
  },
  "face_phrases": ["Face {K} o'clock", "Turn to face {K} o'clock", "Orient yourself toward {K} o'clock"],
  "stop_phrases": ["stay where you are", "hold your position", "remain in place"],
  "distance_phrases": ["walk {D} meters", "proceed {D} meters", "take {N} small steps"],
  "long_distance_phrases": ["walk {D} meters", "proceed {D} meters", "continue for {D} meters"],
  "surface_phrases": ["along the {S}", "", "on the {S}"],
  "sentence_patterns": ["{DIR}, then {DIST}.", "{DIR} and {DIST}.", "{DIR}. Then {DIST}."],
  "hazard_curb": ["Careful, there is a curb at your {H} o'clock.", "Watch out for the curb at your {H} o'clock.", "Mind the curb at your {H} o'clock; use your cane."],
  "hazard_pole": ["Caution, there is a pole at your {H} o'clock.", "Watch out for a pole at your {H} o'clock.", "Mind the pole at your {H} o'clock; keep your cane in front."],
  "hazard_crossing": ["You are near a crossing; listen for traffic before moving.", "Caution, a crossing is ahead; listen for traffic.", "Listen for traffic at the crossing ahead."],
  "hazard_vehicle": ["Caution, a vehicle may pass nearby; listen before moving.", "Listen for a vehicle nearby before you move.", "A vehicle may be near; be careful and listen."],
  "hazard_generic": ["Be careful and listen for obstacles nearby.", "Use your cane and listen for obstacles.", "Keep alert for obstacles; use caution."],
  "think_patterns": ["The next waypoint is at my {K} o'clock, about {D} meters away.", "Target direction {K} o'clock, distance {D} meters.", "I should head toward {K} o'clock and cover {D} meters."],
  "think_hazard_notes": [" There is a {KIND} nearby, so I will add a warning.", " Noting the {KIND} nearby for safety.", " A {KIND} is close; I will mention it."]
})json";
    return from_json(nlohmann::json::parse(kStandard));
}

Grammar Grammar::from_json(const nlohmann::json& j) {
    Grammar g;
    g.variants_ = j.at("variants").get<int>();
    if (g.variants_ < 2) {
        throw InvalidConfigError("grammar: at least 2 variants required");
    }
    const auto& dirs = j.at("directions");
    for (int clock = 1; clock <= 12; ++clock) {
        g.directions_[clock - 1] = require_list(dirs, std::to_string(clock), g.variants_);
    }
    g.face_phrases_ = require_list(j, "face_phrases", g.variants_);
    g.stop_phrases_ = require_list(j, "stop_phrases", g.variants_);
    g.distance_phrases_ = require_list(j, "distance_phrases", g.variants_);
    g.long_distance_phrases_ = require_list(j, "long_distance_phrases", g.variants_);
    g.surface_phrases_ = require_list(j, "surface_phrases", g.variants_);
    g.sentence_patterns_ = require_list(j, "sentence_patterns", g.variants_);
    g.hazard_curb_ = require_list(j, "hazard_curb", g.variants_);
    g.hazard_pole_ = require_list(j, "hazard_pole", g.variants_);
    g.hazard_crossing_ = require_list(j, "hazard_crossing", g.variants_);
    g.hazard_vehicle_ = require_list(j, "hazard_vehicle", g.variants_);
    g.hazard_generic_ = require_list(j, "hazard_generic", g.variants_);
    g.think_patterns_ = require_list(j, "think_patterns", g.variants_);
    g.think_hazard_notes_ = require_list(j, "think_hazard_notes", g.variants_);
    g.validate();
    return g;
}

Grammar Grammar::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("grammar: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfigError("grammar: " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

nlohmann::json Grammar::to_json() const {
    nlohmann::json dirs;
    for (int clock = 1; clock <= 12; ++clock) {
        dirs[std::to_string(clock)] = directions_[clock - 1];
    }
    return nlohmann::json{{"variants", variants_},
                          {"directions", dirs},
                          {"face_phrases", face_phrases_},
                          {"stop_phrases", stop_phrases_},
                          {"distance_phrases", distance_phrases_},
                          {"long_distance_phrases", long_distance_phrases_},
                          {"surface_phrases", surface_phrases_},
                          {"sentence_patterns", sentence_patterns_},
                          {"hazard_curb", hazard_curb_},
                          {"hazard_pole", hazard_pole_},
                          {"hazard_crossing", hazard_crossing_},
                          {"hazard_vehicle", hazard_vehicle_},
                          {"hazard_generic", hazard_generic_},
                          {"think_patterns", think_patterns_},
                          {"think_hazard_notes", think_hazard_notes_}};
}

void Grammar::validate() const {
    std::size_t n = phrase_count();
    if (n > 200) {
        throw InvalidConfigError("grammar: phrase tables exceed 200 entries (" + std::to_string(n) + ")");
    }
}

std::size_t Grammar::phrase_count() const {
    std::size_t n = 0;
    for (const auto& list : directions_) n += list.size();
    for (const auto* list : {&face_phrases_, &stop_phrases_, &distance_phrases_,
                             &long_distance_phrases_, &surface_phrases_, &sentence_patterns_,
                             &hazard_curb_, &hazard_pole_, &hazard_crossing_, &hazard_vehicle_,
                             &hazard_generic_, &think_patterns_, &think_hazard_notes_}) {
        n += list->size();
    }
    return n;
}

std::string Grammar::render_answer(const ActionInterpretation& action, const SceneDescriptor& scene,
                                   std::uint64_t variant_seed) const {
    const int v = static_cast<int>(variant_seed % static_cast<std::uint64_t>(variants_));

    std::string dir_clause;
    std::string dist_clause;
    if (action.distance_m <= 0.0) {
        dir_clause = face_phrases_[v];
        replace_all(dir_clause, "{K}", std::to_string(action.direction_clock));
        dist_clause = stop_phrases_[v];
    } else {
        dir_clause = directions_[action.direction_clock - 1][v];
        const int small_steps = static_cast<int>(std::llround(action.distance_m * 2.0));
        std::string phrase = distance_phrases_[v];
        if (phrase.find("{N}") != std::string::npos && small_steps > 12) {
            phrase = long_distance_phrases_[v];
        }
        if (phrase.find("{N}") != std::string::npos) {
            if (small_steps == 1) {
                replace_all(phrase, "{N} small steps", "one small step");
            } else {
                replace_all(phrase, "{N}", kNumberWords[small_steps]);
            }
        }
        replace_all(phrase, "{D}", format_metres(action.distance_m));
        dist_clause = phrase;
        if (!surface_phrases_[v].empty()) {
            std::string surf = surface_phrases_[v];
            replace_all(surf, "{S}", to_string(scene.surface));
            dist_clause += " " + surf;
        }
    }

    std::string sentence = sentence_patterns_[v];
    replace_all(sentence, "{DIR}", dir_clause);
    replace_all(sentence, "{DIST}", dist_clause);

    if (action.alert) {
        const std::vector<std::string>* table = &hazard_generic_;
        switch (scene.hazard_kind) {
            case HazardKind::Curb: table = &hazard_curb_; break;
            case HazardKind::Pole: table = &hazard_pole_; break;
            case HazardKind::Crossing: table = &hazard_crossing_; break;
            case HazardKind::Vehicle: table = &hazard_vehicle_; break;
            case HazardKind::None: break;
        }
        std::string hazard = (*table)[v];
        if (scene.hazard_bearing_clock) {
            replace_all(hazard, "{H}", std::to_string(*scene.hazard_bearing_clock));
        }
        sentence += " " + hazard;
    }
    return sentence;
}

std::string Grammar::render(const ActionInterpretation& action, const SceneDescriptor& scene,
                            std::uint64_t variant_seed) const {
    const int v = static_cast<int>(variant_seed % static_cast<std::uint64_t>(variants_));
    std::string think = think_patterns_[v];
    replace_all(think, "{K}", std::to_string(action.direction_clock));
    replace_all(think, "{D}", format_metres(action.distance_m));
    if (action.alert) {
        std::string note = think_hazard_notes_[v];
        replace_all(note, "{KIND}",
                    scene.has_hazard() ? to_string(scene.hazard_kind) : "possible obstacle");
        think += note;
    }
    return "<think>" + think + "</think>\n<answer>" +
           render_answer(action, scene, variant_seed) + "</answer>";
}

std::optional<int> Grammar::match_variant(const ActionInterpretation& action,
                                          const SceneDescriptor& scene,
                                          const std::string& text) const {
    for (int v = 0; v < variants_; ++v) {
        if (render_answer(action, scene, static_cast<std::uint64_t>(v)) == text) return v;
    }
    return std::nullopt;
}

}  // namespace navgen
