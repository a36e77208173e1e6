// Copyright 2026 The detpower Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON encodings for detectors, states and feedback strategies.
//
// A matrix is a row-major array of rows, each entry a [re, im] pair:
//   {"dim": 2, "elements": [ [[[0.4,0],[0,0]], [[0,0],[0.2,0]]], ... ]}
//   {"dim": 2, "state": [[[1,0],[0,0]], [[0,0],[0,0]]]}
//   {"dim": 2, "candidates": [ <matrix>, <matrix>, ... ]}
// A strategy maps histories of 1-based outcome digits to candidate indices:
//   {"depth": 3, "choices": {"": [0,1], "1": [0,1], ...}, "grouping": ["111", ...]}
// The optional grouping lists the full histories that accept H0.

#ifndef DETPOWER_IO_HPP
#define DETPOWER_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "detpower/adaptive.hpp"
#include "detpower/error.hpp"
#include "detpower/matrix.hpp"
#include "detpower/povm.hpp"
#include "detpower/state.hpp"

namespace detpower::io {

using Json = nlohmann::json;

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot read " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Json parse_json(const std::string &text, const std::string &what = "input") {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw ParseError(what + " is not valid JSON: " + e.what());
    }
}

namespace detail {

inline double finite_number(const Json &j, const std::string &what) {
    if (!j.is_number()) {
        throw ParseError(what + ": expected a number");
    }
    double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw ParseError(what + ": NaN and infinity are not allowed");
    }
    return v;
}

inline std::size_t index_value(const Json &j, const std::string &what) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ParseError(what + ": expected a nonnegative integer");
    }
    return j.get<std::size_t>();
}

inline const Json &field(const Json &j, const char *key, const std::string &what) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(what + ": missing \"" + key + "\"");
    }
    return j.at(key);
}

}  // namespace detail

inline ComplexMatrix matrix_from_json(const Json &j, std::size_t d, const std::string &what) {
    if (!j.is_array() || j.size() != d) {
        throw ParseError(what + ": expected " + std::to_string(d) + " rows");
    }
    ComplexMatrix m(d);
    for (std::size_t r = 0; r < d; r++) {
        const auto &row = j[r];
        if (!row.is_array() || row.size() != d) {
            throw ParseError(what + ": row " + std::to_string(r) + " must have " + std::to_string(d) + " entries");
        }
        for (std::size_t c = 0; c < d; c++) {
            const auto &e = row[c];
            std::string at = what + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
            if (!e.is_array() || e.size() != 2) {
                throw ParseError(at + ": expected a [re, im] pair");
            }
            m(r, c) = Complex(detail::finite_number(e[0], at), detail::finite_number(e[1], at));
        }
    }
    return m;
}

inline Json matrix_to_json(const ComplexMatrix &m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.dim(); r++) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.dim(); c++) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::size_t dim_from_json(const Json &j) {
    std::size_t d = detail::index_value(detail::field(j, "dim", "document"), "dim");
    if (d == 0) {
        throw ParseError("dim must be positive");
    }
    return d;
}

/// Shape-checked POVM; physical validity is left to validate_povm.
inline Povm povm_from_json(const Json &j) {
    std::size_t d = dim_from_json(j);
    const auto &els = detail::field(j, "elements", "POVM");
    if (!els.is_array() || els.empty()) {
        throw ParseError("elements must be a nonempty array");
    }
    std::vector<ComplexMatrix> out;
    for (std::size_t k = 0; k < els.size(); k++) {
        out.push_back(matrix_from_json(els[k], d, "elements[" + std::to_string(k) + "]"));
    }
    return Povm(std::move(out));
}

inline Json povm_to_json(const Povm &p) {
    Json els = Json::array();
    for (const auto &e : p.elements()) {
        els.push_back(matrix_to_json(e));
    }
    return {{"dim", p.dim()}, {"elements", std::move(els)}};
}

/// Throws DomainError if the matrix is not a density matrix.
inline DensityMatrix state_from_json(const Json &j) {
    std::size_t d = dim_from_json(j);
    return DensityMatrix(matrix_from_json(detail::field(j, "state", "state document"), d, "state"));
}

inline std::vector<DensityMatrix> candidates_from_json(const Json &j) {
    std::size_t d = dim_from_json(j);
    const auto &list = detail::field(j, "candidates", "candidates document");
    if (!list.is_array() || list.empty()) {
        throw ParseError("candidates must be a nonempty array");
    }
    std::vector<DensityMatrix> out;
    for (std::size_t i = 0; i < list.size(); i++) {
        out.emplace_back(matrix_from_json(list[i], d, "candidates[" + std::to_string(i) + "]"));
    }
    return out;
}

/// History string of 1-based outcome digits -> 0-based indices.
inline std::vector<std::size_t> history_from_string(const std::string &s, std::size_t outcomes) {
    if (outcomes > 9) {
        throw UnsupportedError("history strings support at most 9 outcomes");
    }
    std::vector<std::size_t> h;
    for (char c : s) {
        if (c < '1' || static_cast<std::size_t>(c - '0') > outcomes) {
            throw ParseError("history \"" + s + "\" has an invalid outcome digit");
        }
        h.push_back(static_cast<std::size_t>(c - '1'));
    }
    return h;
}

inline AdaptiveStrategy strategy_from_json(const Json &j, std::size_t outcomes) {
    std::size_t depth = detail::index_value(detail::field(j, "depth", "strategy"), "depth");
    if (depth == 0) {
        throw ParseError("strategy depth must be positive");
    }
    AdaptiveStrategy strat(depth, outcomes);
    const auto &choices = detail::field(j, "choices", "strategy");
    if (!choices.is_object()) {
        throw ParseError("choices must be an object keyed by history");
    }
    for (const auto &[key, value] : choices.items()) {
        auto h = history_from_string(key, outcomes);
        if (h.size() >= depth) {
            throw ParseError("history \"" + key + "\" is not shorter than the depth");
        }
        if (!value.is_array() || value.size() != 2) {
            throw ParseError("choice for \"" + key + "\" must be a [rho, sigma] index pair");
        }
        strat.set(h, ChoicePair{detail::index_value(value[0], "choices[" + key + "]"),
                                detail::index_value(value[1], "choices[" + key + "]")});
    }
    if (j.contains("grouping")) {
        const auto &g = j.at("grouping");
        if (!g.is_array()) {
            throw ParseError("grouping must be an array of histories");
        }
        GroupingMask mask{std::vector<bool>(strat.leaves())};
        for (const auto &entry : g) {
            if (!entry.is_string()) {
                throw ParseError("grouping entries must be history strings");
            }
            auto h = history_from_string(entry.get<std::string>(), outcomes);
            if (h.size() != depth) {
                throw ParseError("grouping history \"" + entry.get<std::string>() + "\" must have length " +
                                 std::to_string(depth));
            }
            std::size_t idx = 0;
            for (auto k : h) {
                idx = idx * outcomes + k;
            }
            mask.accept[idx] = true;
        }
        strat.set_grouping(std::move(mask));
    }
    return strat;
}

inline Json strategy_to_json(const AdaptiveStrategy &s) {
    Json choices = Json::object();
    const std::size_t m = s.outcomes();
    for (std::size_t step = 0; step < s.depth(); step++) {
        for (std::size_t i = 0; i < s.level_size(step); i++) {
            const auto &c = s.choice_at(step, i);
            if (!c) {
                continue;
            }
            std::vector<std::size_t> h(step);
            for (std::size_t t = step, v = i; t-- > 0; v /= m) {
                h[t] = v % m;
            }
            choices[sequence_label(h)] = {c->rho, c->sigma};
        }
    }
    Json out = {{"depth", s.depth()}, {"choices", std::move(choices)}};
    if (s.grouping()) {
        SequenceDistribution shape{m, s.depth(), std::vector<double>(s.leaves())};
        Json g = Json::array();
        for (std::size_t i = 0; i < s.leaves(); i++) {
            if (s.grouping()->accept[i]) {
                g.push_back(sequence_label(shape.sequence(i)));
            }
        }
        out["grouping"] = std::move(g);
    }
    return out;
}

}  // namespace detpower::io

#endif
