#pragma once

namespace omegalab {

// Embedded in every artifact (datasets carry it implicitly via format tags,
// run records and checkpoints explicitly).
inline constexpr const char* kVersion = "omega-lab/0.1.0";

}  // namespace omegalab
