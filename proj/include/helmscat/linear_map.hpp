#pragma once

#include <functional>
#include <span>

#include "helmscat/grid.hpp"

namespace helmscat {

/// out = L(in); `out` is fully overwritten.
using LinearMap = std::function<void(std::span<const cplx> in, std::span<cplx> out)>;

}  // namespace helmscat
