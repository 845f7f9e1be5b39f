#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sgtomo {

// Invalid or inconsistent user input (bad grid bounds, out-of-range angles,
// contradictory run configuration). CLI exit code 1.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical consistency check failed (realness/positivity violations,
// degenerate likelihoods, unsupported Fisher integrands). CLI exit code 2.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Measurement matrix too close to singular for linear inversion; carries the
// singular values so the caller can see which directions collapsed.
class ill_conditioned_error : public numerical_error {
public:
    ill_conditioned_error(const std::string& what, std::vector<double> sv)
        : numerical_error(what), singular_values(std::move(sv)) {}
    std::vector<double> singular_values;
};

// Observed data sits where the modelled probability vanishes.
class likelihood_degeneracy_error : public numerical_error {
public:
    explicit likelihood_degeneracy_error(const std::string& what) : numerical_error(what) {}
};

// Fisher integrand has |M_mu| above floor at a cell where the intensity is
// below floor: the information integral is not defined there.
class support_violation_error : public numerical_error {
public:
    explicit support_violation_error(const std::string& what) : numerical_error(what) {}
};

}  // namespace sgtomo
