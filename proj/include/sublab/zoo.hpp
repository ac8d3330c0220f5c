#pragma once

#include <variant>

#include "sublab/submersion.hpp"

namespace sublab {

struct model_spec {
    std::string id;
    std::map<std::string, double> params;
    std::map<std::string, std::string> expr_params; // e.g. warped_custom beta
};

struct built_model {
    std::variant<smooth_map, riemannian_submersion> object;
    const_map constants;
    std::optional<einstein_data> einstein;
    std::string id;
    std::map<std::string, double> params;
    std::map<std::string, std::string> expr_params;

    bool is_submersion() const { return std::holds_alternative<riemannian_submersion>(object); }
    const riemannian_submersion& as_submersion() const {
        return std::get<riemannian_submersion>(object);
    }
    // the underlying map either way (pi for submersions)
    const smooth_map& as_map() const {
        return is_submersion() ? as_submersion().pi : std::get<smooth_map>(object);
    }
    const chart& domain_chart() const { return as_map().dom(); }
};

// product, inversion(n), loubeau_ou(c1,c2), warped_custom(beta),
// hopf, berger(eps), flag_local(l,a,b,c,d,A,B,C), cp1_round, s2_round(r),
// su2_round
built_model build_model(const model_spec& spec);
std::vector<std::string> zoo_ids();
std::string zoo_help();

} // namespace sublab
