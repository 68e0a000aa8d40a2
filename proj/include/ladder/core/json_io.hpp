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

#include "ladder/core/density_matrix.hpp"
#include "ladder/core/mpo.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace ladder {

using json = nlohmann::json;

// Complex numbers are encoded as [re, im]; matrices row-major.

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("complex value must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array()) throw ConfigError("matrix must be an array of rows");
    const Index r = static_cast<Index>(j.size());
    const Index c = r ? static_cast<Index>(j[0].size()) : 0;
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        if (static_cast<Index>(j[static_cast<std::size_t>(i)].size()) != c) throw ConfigError("ragged matrix");
        for (Index k = 0; k < c; ++k)
            m(i, k) = complex_from_json(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
    }
    return m;
}

inline json sites_to_json(const SiteList& sites) {
    json a = json::array();
    for (const auto& s : sites) a.push_back(s.str());
    return a;
}

inline SiteList sites_from_json(const json& j) {
    SiteList out;
    for (const auto& s : j) out.push_back(SiteLabel::parse(s.get<std::string>()));
    return out;
}

inline json to_json(const DensityMatrix& rho) {
    return {{"sites", sites_to_json(rho.sites())}, {"data", matrix_to_json(rho.data())}};
}

inline DensityMatrix density_matrix_from_json(const json& j) {
    return {sites_from_json(j.at("sites")), matrix_from_json(j.at("data"))};
}

/// Tensors as nested arrays in (l, k, b, r) order.
inline json to_json(const Mpo& mpo) {
    json tensors = json::array();
    for (std::size_t i = 0; i < mpo.size(); ++i) {
        const auto& t = mpo.tensors()[i];
        const Index d = mpo.sites()[i].dim();
        const Index dl = t.front().rows(), dr = t.front().cols();
        json tl = json::array();
        for (Index l = 0; l < dl; ++l) {
            json tk = json::array();
            for (Index k = 0; k < d; ++k) {
                json tb = json::array();
                for (Index b = 0; b < d; ++b) {
                    json tr = json::array();
                    for (Index r = 0; r < dr; ++r)
                        tr.push_back(complex_to_json(t[static_cast<std::size_t>(k + d * b)](l, r)));
                    tb.push_back(std::move(tr));
                }
                tk.push_back(std::move(tb));
            }
            tl.push_back(std::move(tk));
        }
        tensors.push_back(std::move(tl));
    }
    return {{"sites", sites_to_json(mpo.sites())},
            {"tensors", std::move(tensors)},
            {"max_bond", mpo.max_bond()},
            {"eps", mpo.eps()},
            {"truncation_error", mpo.truncation_error()}};
}

inline Mpo mpo_from_json(const json& j) {
    SiteList sites = sites_from_json(j.at("sites"));
    const json& tj = j.at("tensors");
    if (tj.size() != sites.size()) throw ConfigError("MPO JSON: tensor count does not match sites");
    std::vector<Mpo::SiteTensor> ts;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const json& tl = tj[i];
        const Index d = sites[i].dim();
        const Index dl = static_cast<Index>(tl.size());
        if (dl == 0) throw ConfigError("MPO JSON: empty tensor");
        const Index dr = static_cast<Index>(tl[0][0][0].size());
        Mpo::SiteTensor t(static_cast<std::size_t>(d * d), Matrix(dl, dr));
        for (Index l = 0; l < dl; ++l) {
            const json& tk = tl[static_cast<std::size_t>(l)];
            if (static_cast<Index>(tk.size()) != d) throw ConfigError("MPO JSON: ket dimension mismatch");
            for (Index k = 0; k < d; ++k) {
                const json& tb = tk[static_cast<std::size_t>(k)];
                if (static_cast<Index>(tb.size()) != d) throw ConfigError("MPO JSON: bra dimension mismatch");
                for (Index b = 0; b < d; ++b) {
                    const json& tr = tb[static_cast<std::size_t>(b)];
                    if (static_cast<Index>(tr.size()) != dr) throw ConfigError("MPO JSON: ragged bond");
                    for (Index r = 0; r < dr; ++r)
                        t[static_cast<std::size_t>(k + d * b)](l, r) = complex_from_json(tr[static_cast<std::size_t>(r)]);
                }
            }
        }
        ts.push_back(std::move(t));
    }
    Mpo out(std::move(sites), std::move(ts), j.value("max_bond", Mpo::kDefaultMaxBond), j.value("eps", 1e-12));
    out.set_truncation_error(j.value("truncation_error", 0.0));
    return out;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j, int indent = -1) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(indent) << '\n';
}

}  // namespace ladder
