#include "optomech/errors.hpp"

#include <utility>

namespace optomech {

ModelError::ModelError(ModelErrc code, std::string subject, const std::string& what)
    : Error(what), code_(code), subject_(std::move(subject)) {}

SpectralError::SpectralError(SpectralErrc code, const std::string& what,
                             std::optional<std::size_t> required_points)
    : Error(what), code_(code), required_points_(required_points) {}

DynamicsError::DynamicsError(DynamicsErrc code, const std::string& what,
                             std::optional<double> time)
    : Error(what), code_(code), time_(time) {}

}  // namespace optomech
