#pragma once

#include "ringclass/invariants.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace ringclass {
namespace cache {

using invariants::IntPoly;

// One cached minimal polynomial, keyed by (d_K, N). Big integers travel as
// decimal strings; 64-bit JSON numbers cannot hold the j-path coefficients.
struct PolyCacheEntry {
    long d_k = 0;
    long conductor = 0;
    std::vector<std::string> coeffs;  // ascending, last entry "1"
    long precision_bits = 0;
    std::string invariant_approx;                // 50 significant digits
    std::map<std::string, long> spec_exponents;  // divisor -> eta exponent

    friend bool operator==(const PolyCacheEntry& a, const PolyCacheEntry& b) {
        return a.d_k == b.d_k && a.conductor == b.conductor && a.coeffs == b.coeffs &&
               a.precision_bits == b.precision_bits && a.invariant_approx == b.invariant_approx &&
               a.spec_exponents == b.spec_exponents;
    }
};

inline void to_json(nlohmann::json& j, const PolyCacheEntry& e) {
    j = nlohmann::json{{"d_k", e.d_k},
                       {"conductor", e.conductor},
                       {"coeffs", e.coeffs},
                       {"precision_bits", e.precision_bits},
                       {"invariant_approx", e.invariant_approx},
                       {"spec_exponents", e.spec_exponents}};
}

inline void from_json(const nlohmann::json& j, PolyCacheEntry& e) {
    j.at("d_k").get_to(e.d_k);
    j.at("conductor").get_to(e.conductor);
    j.at("coeffs").get_to(e.coeffs);
    j.at("precision_bits").get_to(e.precision_bits);
    j.at("invariant_approx").get_to(e.invariant_approx);
    j.at("spec_exponents").get_to(e.spec_exponents);
}

inline std::filesystem::path entry_path(const std::filesystem::path& dir, long d_k, long N) {
    return dir / ("dk" + std::to_string(d_k) + "_N" + std::to_string(N) + ".json");
}

inline IntPoly poly_from_entry(const PolyCacheEntry& e) {
    IntPoly p;
    for (auto& s : e.coeffs) p.coeffs.emplace_back(s, 10);
    p.monic = !p.coeffs.empty() && p.coeffs.back() == 1;
    return p;
}

inline PolyCacheEntry make_entry(const quadratic::OrderSpec& order, const IntPoly& poly,
                                 long precision_bits, const std::string& invariant_approx,
                                 const modular_forms::EtaQuotientSpec& spec) {
    PolyCacheEntry e;
    e.d_k = order.field.d_K;
    e.conductor = order.conductor;
    for (auto& c : poly.coeffs) e.coeffs.push_back(c.get_str());
    e.precision_bits = precision_bits;
    e.invariant_approx = invariant_approx;
    for (auto& [d, m] : spec.exponents) e.spec_exponents[std::to_string(d)] = m;
    return e;
}

// Atomic write: serialize to a temp file in the same directory, then rename.
inline void save_entry(const std::filesystem::path& dir, const PolyCacheEntry& e) {
    std::filesystem::create_directories(dir);
    auto final_path = entry_path(dir, e.d_k, e.conductor);
    auto tmp = final_path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cache: cannot open " + tmp.string());
        nlohmann::json j = e;
        out << j.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, final_path);
}

// Load and re-verify: the entry must be well-formed, monic, and of the
// degree the class number demands. Anything else is ignored with a warning
// so a corrupt cache can never poison results.
inline std::optional<PolyCacheEntry> load_entry(const std::filesystem::path& dir, long d_k,
                                                long N) {
    auto path = entry_path(dir, d_k, N);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    PolyCacheEntry e;
    try {
        std::ifstream in(path);
        nlohmann::json j = nlohmann::json::parse(in);
        e = j.get<PolyCacheEntry>();
    } catch (const std::exception& ex) {
        std::cerr << "warning: ignoring malformed cache entry " << path.string() << ": "
                  << ex.what() << "\n";
        return std::nullopt;
    }
    if (e.d_k != d_k || e.conductor != N || e.coeffs.empty() || e.coeffs.back() != "1") {
        std::cerr << "warning: ignoring inconsistent cache entry " << path.string() << "\n";
        return std::nullopt;
    }
    try {
        auto field = quadratic::make_field(d_k);
        long expected = galois::class_number_order(field, N);
        if (static_cast<long>(e.coeffs.size()) - 1 != expected) {
            std::cerr << "warning: cache entry " << path.string() << " has degree "
                      << e.coeffs.size() - 1 << ", class number demands " << expected
                      << "; ignoring\n";
            return std::nullopt;
        }
        for (auto& s : e.coeffs)
            if (s.empty() || s.find_first_not_of("-0123456789") != std::string::npos)
                throw std::runtime_error("non-decimal coefficient string");
    } catch (const std::exception& ex) {
        std::cerr << "warning: ignoring cache entry " << path.string() << ": " << ex.what()
                  << "\n";
        return std::nullopt;
    }
    return e;
}

}  // namespace cache
}  // namespace ringclass
