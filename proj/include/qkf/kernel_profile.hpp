#pragma once

#include <string>

#include "qkf/types.hpp"

namespace qkf {

enum class ProfileKind {
    InnerProduct,  // sum_k alpha_k Tr(rho_k rho_k')
    GaussianSq,    // exp(-gamma * sum_k alpha_k d_HS^2)
    Laplace,       // sum_k exp(-gamma * ||rho_k - rho_k'||_HS)
};

struct KernelProfile {
    ProfileKind kind = ProfileKind::InnerProduct;
    double gamma = 1.0;  // unused for inner-product

    static KernelProfile inner_product() { return {ProfileKind::InnerProduct, 0.0}; }
    static KernelProfile gaussian_sq(double gamma) {
        if (gamma < 0.0) throw invalid_input("KernelProfile: gamma must be >= 0");
        return {ProfileKind::GaussianSq, gamma};
    }
    static KernelProfile laplace(double gamma) {
        if (gamma < 0.0) throw invalid_input("KernelProfile: gamma must be >= 0");
        return {ProfileKind::Laplace, gamma};
    }

    bool shift_invariant() const { return kind != ProfileKind::InnerProduct; }

    // Lipschitz constant of f w.r.t. its scalar argument; for exp(-gamma c)
    // this is gamma.
    double lipschitz() const { return gamma; }
};

inline std::string to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::InnerProduct: return "inner-product";
        case ProfileKind::GaussianSq: return "gaussian-sq";
        case ProfileKind::Laplace: return "laplace";
    }
    return "?";
}

inline ProfileKind profile_kind_from_string(const std::string& s) {
    if (s == "inner-product") return ProfileKind::InnerProduct;
    if (s == "gaussian-sq") return ProfileKind::GaussianSq;
    if (s == "laplace") return ProfileKind::Laplace;
    throw config_error("unknown kernel kind: " + s);
}

}  // namespace qkf
