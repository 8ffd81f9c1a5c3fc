#pragma once

#include <json.hpp>

#include "liouville/geometry.hpp"
#include "liouville/liouville_map.hpp"

namespace liouville {

inline nlohmann::json to_json(const HypothesisReport& r) {
    return nlohmann::json{
        {"m", r.m},
        {"worst_ratio", r.worst_ratio},
        {"worst_point", {r.worst_point.real(), r.worst_point.imag()}},
        {"pass", r.pass},
        {"samples", r.samples},
    };
}

inline nlohmann::json to_json(const EmbeddingReport& r) {
    nlohmann::json j{
        {"pass", r.pass},
        {"injective", r.injectivity.pass},
        {"pairs_checked", r.injectivity.pairs_checked},
        {"midline_monotone", r.midline_monotone},
        {"midline_span_ratio", r.midline_span_ratio},
        {"tips_ok", r.tips_ok},
        {"gauge", {r.gauge.real(), r.gauge.imag()}},
        {"max_dev_from_translation", r.max_dev},
        {"samples", r.samples},
    };
    if (!r.injectivity.pass) {
        j["witness"] = {r.injectivity.witness_a.real(), r.injectivity.witness_a.imag(),
                        r.injectivity.witness_b.real(), r.injectivity.witness_b.imag()};
    }
    return j;
}

}  // namespace liouville
