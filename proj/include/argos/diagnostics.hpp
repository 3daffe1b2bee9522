#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace argos {

/// Non-fatal issue found while parsing or scoring. Offsets index into the
/// source text when the diagnostic is tied to a span, SIZE_MAX otherwise.
struct Diagnostic {
    std::string message;
    std::size_t offset = static_cast<std::size_t>(-1);
};

using Diagnostics = std::vector<Diagnostic>;

inline void add_diag(Diagnostics& diags, std::string message,
                     std::size_t offset = static_cast<std::size_t>(-1)) {
    diags.push_back(Diagnostic{std::move(message), offset});
}

}  // namespace argos
