// Copyright 2026 The ladder authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "ladder/core/common.hpp"

#include <algorithm>
#include <compare>
#include <string>
#include <vector>

namespace ladder {

/// A labeled tensor factor: one of the two source qutrits or an emitted photon.
///
/// Site lists are little-endian: the first site of a list is the least
/// significant digit of the composite basis index.
struct SiteLabel {
    enum class Kind : std::uint8_t { Source, Photon };

    Kind kind = Kind::Photon;
    int index = 1;

    static SiteLabel source(int i) {
        if (i != 1 && i != 2) throw ConfigError("source index must be 1 or 2, got " + std::to_string(i));
        return {Kind::Source, i};
    }
    static SiteLabel photon(int i) {
        if (i < 1) throw ConfigError("photon index must be >= 1, got " + std::to_string(i));
        return {Kind::Photon, i};
    }

    Index dim() const { return kind == Kind::Source ? 3 : 2; }
    bool is_photon() const { return kind == Kind::Photon; }

    std::string str() const { return (kind == Kind::Source ? "S" : "P") + std::to_string(index); }

    static SiteLabel parse(const std::string& s) {
        if (s.size() < 2 || (s[0] != 'S' && s[0] != 'P'))
            throw ConfigError("bad site label '" + s + "'");
        int i = 0;
        try {
            std::size_t used = 0;
            i = std::stoi(s.substr(1), &used);
            if (used != s.size() - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError("bad site label '" + s + "'");
        }
        return s[0] == 'S' ? source(i) : photon(i);
    }

    auto operator<=>(const SiteLabel&) const = default;
};

using SiteList = std::vector<SiteLabel>;

inline SiteList photon_sites(int count, int first = 1) {
    SiteList out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(SiteLabel::photon(first + i));
    return out;
}

inline Index total_dim(const SiteList& sites) {
    Index d = 1;
    for (const auto& s : sites) d *= s.dim();
    return d;
}

/// Position of `label` in `sites`; throws ConfigError for unknown labels.
inline std::size_t site_position(const SiteList& sites, const SiteLabel& label) {
    auto it = std::find(sites.begin(), sites.end(), label);
    if (it == sites.end()) throw ConfigError("unknown site label " + label.str());
    return static_cast<std::size_t>(it - sites.begin());
}

/// Mixed-radix digit helper for little-endian site lists.
class Radix {
public:
    explicit Radix(const SiteList& sites) {
        dims_.reserve(sites.size());
        for (const auto& s : sites) dims_.push_back(s.dim());
        init();
    }
    explicit Radix(std::vector<Index> dims) : dims_(std::move(dims)) { init(); }

    Index size() const { return size_; }
    std::size_t sites() const { return dims_.size(); }
    Index dim(std::size_t k) const { return dims_[k]; }
    Index stride(std::size_t k) const { return strides_[k]; }
    Index digit(Index idx, std::size_t k) const { return (idx / strides_[k]) % dims_[k]; }

private:
    void init() {
        strides_.resize(dims_.size());
        Index s = 1;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            strides_[k] = s;
            s *= dims_[k];
        }
        size_ = s;
    }

    std::vector<Index> dims_;
    std::vector<Index> strides_;
    Index size_ = 1;
};

}  // namespace ladder
